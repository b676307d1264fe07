//! Sentence-similarity scoring and Spearman evaluation.
//!
//! For a triplet the expected similarities are `sim(E, E_c) = 1` and
//! `sim(E, E_i) = sim(E_c, E_i)`, the latter measured by the backend under
//! evaluation. Backends are anything implementing [`Scorer`]; embedding
//! backends get one through [`CosineScorer`].

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::augment::TfidfStats;
use crate::lexicon::Lexicon;
use crate::rng::fnv64;
use crate::triplet::Triplet;
use crate::{Error, Result};

/// Dense embedding with its cached Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceEmbedding {
    vector: Vec<f64>,
    norm: f64,
}

impl SentenceEmbedding {
    pub fn new(vector: Vec<f64>) -> Result<Self> {
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEmbedding);
        }
        let norm = libm::sqrt(vector.iter().map(|x| x * x).sum());
        Ok(SentenceEmbedding { vector, norm })
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dimension(&self) -> usize {
        self.vector.len()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.vector.iter().map(|x| x * factor).collect())
    }
}

/// Cosine similarity clamped to [-1, 1].
pub fn similarity(a: &SentenceEmbedding, b: &SentenceEmbedding) -> Result<f64> {
    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch(a.dimension(), b.dimension()));
    }
    if a.norm == 0.0 || b.norm == 0.0 {
        return Err(Error::DegenerateEmbedding(None));
    }
    let dot: f64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum();
    Ok((dot / (a.norm * b.norm)).clamp(-1.0, 1.0))
}

/// Text → embedding. Identical text must give an identical embedding
/// regardless of call order.
pub trait Embedder {
    fn embed(&self, text: &str) -> Result<SentenceEmbedding>;
}

impl<E: Embedder + ?Sized> Embedder for &E {
    fn embed(&self, text: &str) -> Result<SentenceEmbedding> {
        (**self).embed(text)
    }
}

/// Pairwise similarity backend.
pub trait Scorer {
    fn score(&self, a: &str, b: &str) -> Result<f64>;
}

impl<S: Scorer + ?Sized> Scorer for &S {
    fn score(&self, a: &str, b: &str) -> Result<f64> {
        (**self).score(a, b)
    }
}

/// Scores pairs by cosine similarity of their embeddings.
#[derive(Debug, Clone)]
pub struct CosineScorer<E>(pub E);

impl<E: Embedder> Scorer for CosineScorer<E> {
    fn score(&self, a: &str, b: &str) -> Result<f64> {
        similarity(&self.0.embed(a)?, &self.0.embed(b)?)
    }
}

pub const DEFAULT_DIMENSION: usize = 256;

/// Deterministic bag-of-words backend: TF-IDF weights hashed into a fixed
/// number of signed buckets. Known MWEs are collapsed into one token
/// (`guinea_pig`) before weighting.
#[derive(Debug, Clone)]
pub struct HashingEmbedder {
    stats: TfidfStats,
    mwes: Vec<Vec<String>>,
    dimension: usize,
}

impl HashingEmbedder {
    pub fn new(stats: TfidfStats, lexicon: &Lexicon) -> Result<Self> {
        if stats.n_docs() == 0 {
            return Err(Error::DegenerateStats);
        }
        let mut mwes: Vec<Vec<String>> = lexicon
            .entries()
            .iter()
            .map(|e| e.component_words().map(str::to_string).collect())
            .collect();
        mwes.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok(HashingEmbedder {
            stats,
            mwes,
            dimension: DEFAULT_DIMENSION,
        })
    }

    /// Fits document frequencies on `texts` (after MWE collapsing).
    pub fn fit<I, S>(texts: I, lexicon: &Lexicon) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut this = Self::new(TfidfStats::fit_tokens([[""; 0]]), lexicon)?;
        let docs: Vec<Vec<String>> = texts.into_iter().map(|t| this.tokens(t.as_ref())).collect();
        this.stats = TfidfStats::fit_tokens(docs);
        if this.stats.n_docs() == 0 {
            return Err(Error::DegenerateStats);
        }
        Ok(this)
    }

    pub fn with_dimension(mut self, dimension: usize) -> Self {
        self.dimension = dimension.max(1);
        self
    }

    pub fn stats(&self) -> &TfidfStats {
        &self.stats
    }

    /// Lowercased tokens with known MWEs joined by underscores.
    pub fn tokens(&self, text: &str) -> Vec<String> {
        let raw: Vec<String> = text
            .split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\'' || c == '\u{2019}'))
            .map(|t| t.trim_matches(|c| c == '_' || c == '\'' || c == '\u{2019}'))
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .collect();
        let mut out = Vec::with_capacity(raw.len());
        let mut i = 0;
        while i < raw.len() {
            let hit = self.mwes.iter().find(|m| raw[i..].starts_with(m));
            match hit {
                Some(m) => {
                    out.push(m.join("_"));
                    i += m.len();
                }
                None => {
                    out.push(raw[i].clone());
                    i += 1;
                }
            }
        }
        out
    }

    /// Bucket and sign of a token under signed feature hashing.
    pub fn bucket(&self, token: &str) -> (usize, f64) {
        let h = fnv64(token.as_bytes());
        let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
        ((h % self.dimension as u64) as usize, sign)
    }
}

impl Embedder for HashingEmbedder {
    fn embed(&self, text: &str) -> Result<SentenceEmbedding> {
        let mut tf: BTreeMap<String, u64> = BTreeMap::new();
        for t in self.tokens(text) {
            *tf.entry(t).or_insert(0) += 1;
        }
        let mut vector = vec![0.0; self.dimension];
        for (token, count) in &tf {
            let (bucket, sign) = self.bucket(token);
            vector[bucket] += sign * *count as f64 * self.stats.idf(token);
        }
        SentenceEmbedding::new(vector)
    }
}

/// Embeds `text` with the bundled hashing backend.
pub fn embed_default(text: &str, stats: &TfidfStats, lexicon: &Lexicon) -> Result<SentenceEmbedding> {
    HashingEmbedder::new(stats.clone(), lexicon)?.embed(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Portion {
    Sts,
    Mwe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub pair_id: String,
    pub sentence_1: String,
    pub sentence_2: String,
    pub predicted_sim: f64,
    pub gold_sim: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub portion: Option<Portion>,
}

/// A reference pair with a given gold similarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StsPair {
    pub pair_id: String,
    pub sentence_1: String,
    pub sentence_2: String,
    pub gold_sim: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub portion: Option<Portion>,
}

fn score_pair<S: Scorer>(scorer: &S, pair_id: &str, a: &str, b: &str) -> Result<f64> {
    let score = scorer.score(a, b).map_err(|e| match e {
        Error::DegenerateEmbedding(_) => Error::DegenerateEmbedding(Some(pair_id.to_string())),
        other => other,
    })?;
    if !score.is_finite() {
        return Err(Error::NonFiniteEmbedding);
    }
    Ok(score)
}

/// The two records of one triplet: `(E, E_c)` with gold 1 and `(E, E_i)`
/// with gold equal to the backend's own `sim(E_c, E_i)`.
pub fn eval_records_for<S: Scorer>(id: &str, e: &str, e_c: &str, e_i: &str, scorer: &S) -> Result<[EvalRecord; 2]> {
    let correct_id = alloc::format!("{id}#c");
    let incorrect_id = alloc::format!("{id}#i");
    let gold_incorrect = score_pair(scorer, &incorrect_id, e_c, e_i)?;
    Ok([
        EvalRecord {
            predicted_sim: score_pair(scorer, &correct_id, e, e_c)?,
            pair_id: correct_id,
            sentence_1: e.into(),
            sentence_2: e_c.into(),
            gold_sim: 1.0,
            portion: None,
        },
        EvalRecord {
            predicted_sim: score_pair(scorer, &incorrect_id, e, e_i)?,
            pair_id: incorrect_id,
            sentence_1: e.into(),
            sentence_2: e_i.into(),
            gold_sim: gold_incorrect,
            portion: None,
        },
    ])
}

pub fn build_eval_records<S: Scorer>(triplets: &[Triplet], scorer: &S) -> Result<Vec<EvalRecord>> {
    let mut out = Vec::with_capacity(triplets.len() * 2);
    for t in triplets {
        out.extend(eval_records_for(&t.id(), &t.e, &t.e_c, &t.e_i, scorer)?);
    }
    Ok(out)
}

pub fn score_pairs<S: Scorer>(pairs: &[StsPair], scorer: &S) -> Result<Vec<EvalRecord>> {
    pairs
        .iter()
        .map(|p| {
            Ok(EvalRecord {
                predicted_sim: score_pair(scorer, &p.pair_id, &p.sentence_1, &p.sentence_2)?,
                pair_id: p.pair_id.clone(),
                sentence_1: p.sentence_1.clone(),
                sentence_2: p.sentence_2.clone(),
                gold_sim: p.gold_sim,
                portion: p.portion,
            })
        })
        .collect()
}

/// 1-based ranks; tied values share the average of their positions.
pub fn fractional_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // positions i..j (0-based) share rank mean of (i+1)..=j
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::ShapeError(xs.len(), ys.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of fractional ranks.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::ShapeError(xs.len(), ys.len()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::UndefinedCorrelation);
    }
    pearson(&fractional_ranks(xs), &fractional_ranks(ys))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_records: usize,
    pub rho_overall: f64,
    pub rho_sts: Option<f64>,
    pub rho_mwe: Option<f64>,
}

fn rho_of<'a>(records: impl Iterator<Item = &'a EvalRecord>) -> Result<f64> {
    let (pred, gold): (Vec<f64>, Vec<f64>) = records.map(|r| (r.predicted_sim, r.gold_sim)).unzip();
    spearman_rho(&pred, &gold)
}

/// Overall rho plus per-portion rho where the portion has a defined
/// correlation.
pub fn summarize(records: &[EvalRecord]) -> Result<EvalReport> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let portion = |p| rho_of(records.iter().filter(|r| r.portion == Some(p))).ok();
    Ok(EvalReport {
        n_records: records.len(),
        rho_overall: rho_of(records.iter())?,
        rho_sts: portion(Portion::Sts),
        rho_mwe: portion(Portion::Mwe),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalDataset {
    Triplets(Vec<Triplet>),
    Pairs(Vec<StsPair>),
}

impl EvalDataset {
    pub fn len(&self) -> usize {
        match self {
            EvalDataset::Triplets(t) => t.len(),
            EvalDataset::Pairs(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Scores the dataset with `scorer` and summarizes.
pub fn evaluate<S: Scorer>(dataset: &EvalDataset, scorer: &S) -> Result<(Vec<EvalRecord>, EvalReport)> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let records = match dataset {
        EvalDataset::Triplets(t) => build_eval_records(t, scorer)?,
        EvalDataset::Pairs(p) => score_pairs(p, scorer)?,
    };
    let report = summarize(&records)?;
    Ok((records, report))
}
