//! Dual-annotator Gold labels: adjudicated merge and agreement statistics.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Accept,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub triplet_id: String,
    pub annotator_a: Label,
    pub annotator_b: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjudicator: Option<Label>,
}

impl AnnotationRecord {
    pub fn agrees(&self) -> bool {
        self.annotator_a == self.annotator_b
    }

    /// Final label: the shared one, or the adjudicator's on disagreement.
    pub fn resolve(&self) -> Result<Label> {
        match (self.agrees(), self.adjudicator) {
            (true, None) => Ok(self.annotator_a),
            (true, Some(_)) => Err(Error::UnexpectedAdjudication(self.triplet_id.clone())),
            (false, Some(label)) => Ok(label),
            (false, None) => Err(Error::MissingAdjudication(self.triplet_id.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergedLabel {
    pub triplet_id: String,
    pub label: Label,
}

pub fn merge(records: &[AnnotationRecord]) -> Result<Vec<MergedLabel>> {
    records
        .iter()
        .map(|r| {
            Ok(MergedLabel {
                triplet_id: r.triplet_id.clone(),
                label: r.resolve()?,
            })
        })
        .collect()
}

/// 2x2 contingency counts, indexed `[a][b]` with accept = 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Contingency {
    pub counts: [[u64; 2]; 2],
}

fn slot(label: Label) -> usize {
    match label {
        Label::Accept => 0,
        Label::Reject => 1,
    }
}

impl Contingency {
    pub fn from_records(records: &[AnnotationRecord]) -> Self {
        let mut c = Contingency::default();
        for r in records {
            c.counts[slot(r.annotator_a)][slot(r.annotator_b)] += 1;
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn observed_agreement(&self) -> Result<f64> {
        let n = self.total();
        if n == 0 {
            return Err(Error::EmptyAnnotationSet);
        }
        Ok((self.counts[0][0] + self.counts[1][1]) as f64 / n as f64)
    }

    /// Chance agreement from each annotator's marginal label frequencies.
    pub fn expected_agreement(&self) -> Result<f64> {
        let n = self.total();
        if n == 0 {
            return Err(Error::EmptyAnnotationSet);
        }
        let n = n as f64;
        let a_accept = (self.counts[0][0] + self.counts[0][1]) as f64 / n;
        let b_accept = (self.counts[0][0] + self.counts[1][0]) as f64 / n;
        Ok(a_accept * b_accept + (1.0 - a_accept) * (1.0 - b_accept))
    }

    pub fn kappa(&self) -> Result<f64> {
        let p_o = self.observed_agreement()?;
        let p_e = self.expected_agreement()?;
        if p_e >= 1.0 {
            return Err(Error::DegenerateMarginals);
        }
        Ok((p_o - p_e) / (1.0 - p_e))
    }
}

/// Fraction of records where both annotators gave the same label.
pub fn percent_agreement(records: &[AnnotationRecord]) -> Result<f64> {
    Contingency::from_records(records).observed_agreement()
}

/// Cohen's kappa over the raw (pre-adjudication) label pairs.
pub fn cohens_kappa(records: &[AnnotationRecord]) -> Result<f64> {
    Contingency::from_records(records).kappa()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n: usize,
    pub percent_agreement: f64,
    pub kappa: Option<f64>,
}

/// Agreement summary. Kappa is `None` when chance agreement is 1.
pub fn agreement_report(records: &[AnnotationRecord]) -> Result<AgreementReport> {
    let percent_agreement = percent_agreement(records)?;
    let kappa = match cohens_kappa(records) {
        Ok(k) => Some(k),
        Err(Error::DegenerateMarginals) => None,
        Err(e) => return Err(e),
    };
    Ok(AgreementReport {
        n: records.len(),
        percent_agreement,
        kappa,
    })
}
