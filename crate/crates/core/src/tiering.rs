//! Silver tiering: rank Bronze triplets by count-vector cosine against a
//! reference profile per MWE, then keep the top percent.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::text::words;
use crate::triplet::Triplet;
use crate::{Error, Result};

/// Sparse token counts. Zero counts are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyVector {
    counts: BTreeMap<String, u64>,
}

impl FrequencyVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, token: &str, count: u64) {
        if count > 0 {
            *self.counts.entry(token.to_lowercase()).or_insert(0) += count;
        }
    }

    pub fn get(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &FrequencyVector) {
        for (t, &c) in &other.counts {
            *self.counts.entry(t.clone()).or_insert(0) += c;
        }
    }

    pub fn scale(&self, factor: u64) -> FrequencyVector {
        let mut out = FrequencyVector::new();
        for (t, &c) in &self.counts {
            out.add(t, c * factor);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(t, &c)| (t.as_str(), c))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    fn squared_norm(&self) -> f64 {
        self.counts.values().map(|&c| (c as f64) * (c as f64)).sum()
    }
}

impl<'a> FromIterator<(&'a str, u64)> for FrequencyVector {
    fn from_iter<T: IntoIterator<Item = (&'a str, u64)>>(iter: T) -> Self {
        let mut v = FrequencyVector::new();
        for (t, c) in iter {
            v.add(t, c);
        }
        v
    }
}

/// Lowercased word counts of `text`.
pub fn count_vector(text: &str) -> FrequencyVector {
    let mut v = FrequencyVector::new();
    for w in words(text) {
        v.add(w.text, 1);
    }
    v
}

/// Cosine similarity; 0 when either vector is empty.
pub fn cosine(a: &FrequencyVector, b: &FrequencyVector) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small
        .counts
        .iter()
        .map(|(t, &c)| (c as f64) * (large.get(t) as f64))
        .sum();
    (dot / libm::sqrt(a.squared_norm() * b.squared_norm())).clamp(0.0, 1.0)
}

/// Thresholds for [`structural_filter`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub min_alpha_ratio: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_tokens: 5,
            max_tokens: 80,
            min_alpha_ratio: 0.6,
        }
    }
}

fn balanced(text: &str) -> bool {
    let mut depth = [0i64; 4];
    let mut straight_quotes = 0usize;
    for c in text.chars() {
        let (slot, delta) = match c {
            '(' => (0, 1),
            ')' => (0, -1),
            '[' => (1, 1),
            ']' => (1, -1),
            '{' => (2, 1),
            '}' => (2, -1),
            '\u{201C}' => (3, 1),
            '\u{201D}' => (3, -1),
            '"' => {
                straight_quotes += 1;
                continue;
            }
            _ => continue,
        };
        depth[slot] += delta;
        if depth[slot] < 0 {
            return false;
        }
    }
    depth.iter().all(|&d| d == 0) && straight_quotes.is_multiple_of(2)
}

/// Share of alphabetic characters among non-whitespace characters.
pub fn alphabetic_ratio(text: &str) -> f64 {
    let (alpha, total) = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .fold((0usize, 0usize), |(a, t), c| (a + c.is_alphabetic() as usize, t + 1));
    if total == 0 {
        0.0
    } else {
        alpha as f64 / total as f64
    }
}

/// The span must sit on char boundaries inside `e` and must not contain a
/// sentence break (terminator followed by whitespace).
fn span_within_sentence(t: &Triplet) -> bool {
    if t.span_start > t.span_end || t.span_end > t.e.len() {
        return false;
    }
    if !t.e.is_char_boundary(t.span_start) || !t.e.is_char_boundary(t.span_end) {
        return false;
    }
    let span = &t.e[t.span()];
    let mut chars = span.chars().peekable();
    while let Some(c) = chars.next() {
        if matches!(c, '.' | '!' | '?') && chars.peek().is_some_and(|n| n.is_whitespace()) {
            return false;
        }
    }
    true
}

/// Structural sanity checks on the idiom-bearing sentence.
pub fn structural_filter(triplet: &Triplet, config: &FilterConfig) -> bool {
    let tokens = words(&triplet.e).count();
    (config.min_tokens..=config.max_tokens).contains(&tokens)
        && balanced(&triplet.e)
        && alphabetic_ratio(&triplet.e) >= config.min_alpha_ratio
        && span_within_sentence(triplet)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    #[serde(flatten)]
    pub triplet: Triplet,
    pub score: f64,
    pub reference_mwe: String,
}

/// Summed count vectors of the reference sentences, per MWE.
#[derive(Debug, Clone, Default)]
pub struct ReferenceProfiles {
    profiles: BTreeMap<String, FrequencyVector>,
}

impl ReferenceProfiles {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sentence(&mut self, mwe: &str, sentence: &str) {
        self.profiles
            .entry(mwe.to_lowercase())
            .or_default()
            .merge(&count_vector(sentence));
    }

    pub fn profile(&self, mwe: &str) -> Option<&FrequencyVector> {
        self.profiles.get(mwe)
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// Scores the `e` sentence against the profile of its MWE. MWEs without
    /// reference sentences score 0.
    pub fn rank(&self, triplet: Triplet) -> RankedEntry {
        let score = match self.profiles.get(&triplet.mwe) {
            Some(profile) => cosine(&count_vector(&triplet.e), profile),
            None => 0.0,
        };
        RankedEntry {
            reference_mwe: triplet.mwe.clone(),
            triplet,
            score,
        }
    }
}

/// Descending score, then ascending (doc_id, index, mwe).
pub fn sort_ranked(ranked: &mut [RankedEntry]) {
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.triplet.cmp_source(&b.triplet)));
}

/// Number of records kept for `percent` of `n`, rounded up.
pub fn tier_size(n: usize, percent: f64) -> Result<usize> {
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(Error::InvalidPercent(percent));
    }
    Ok((libm::ceil(percent * n as f64 / 100.0) as usize).min(n))
}

/// The top `percent` of `ranked`, best first.
pub fn cut_tier(mut ranked: Vec<RankedEntry>, percent: f64) -> Result<Vec<RankedEntry>> {
    let keep = tier_size(ranked.len(), percent)?;
    sort_ranked(&mut ranked);
    ranked.truncate(keep);
    Ok(ranked)
}

/// Uniform sample of `k` records without replacement, in input order.
pub fn random_sample<T: Clone>(entries: &[T], k: usize, seed: u64) -> Result<Vec<T>> {
    let n = entries.len();
    if k > n {
        return Err(Error::SampleTooLarge { k, n });
    }
    let mut picked = index::sample(&mut rng::rng(seed), n, k).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| entries[i].clone()).collect())
}
