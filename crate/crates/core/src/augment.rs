//! MWE-protected augmentation: spelling mistakes, embedding neighbours and
//! TF-IDF guided insertion or replacement.
//!
//! Edits are planned on the context words of `e` (the words outside the MWE
//! span) and replayed on `e_c` and `e_i`, so the three sentences keep
//! agreeing outside their spans and the span bytes are never touched.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::text::{capitalize_first, starts_uppercase, words, Word};
use crate::triplet::Triplet;
use crate::{Error, Result};

/// Document frequencies over a sentence collection.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TfidfStats {
    df: BTreeMap<String, u64>,
    n_docs: u64,
}

impl TfidfStats {
    pub fn new(n_docs: u64, df: BTreeMap<String, u64>) -> Result<Self> {
        if df.values().any(|&d| d == 0 || d > n_docs) {
            return Err(Error::DegenerateStats);
        }
        Ok(TfidfStats { df, n_docs })
    }

    /// Fits on raw sentences using the shared word tokenizer, lowercased.
    pub fn fit<I, S>(sentences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::fit_tokens(sentences.into_iter().map(|s| {
            words(s.as_ref())
                .map(|w| w.text.to_lowercase())
                .collect::<Vec<_>>()
        }))
    }

    /// Fits on pre-tokenized documents.
    pub fn fit_tokens<I, D, T>(documents: I) -> Self
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut stats = TfidfStats::default();
        for doc in documents {
            stats.n_docs += 1;
            let mut seen: Vec<String> = doc.into_iter().map(|t| t.as_ref().to_string()).collect();
            seen.sort_unstable();
            seen.dedup();
            for token in seen {
                *stats.df.entry(token).or_insert(0) += 1;
            }
        }
        stats
    }

    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    pub fn df(&self, token: &str) -> u64 {
        self.df.get(token).copied().unwrap_or(0)
    }

    /// Smoothed inverse document frequency, `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self, token: &str) -> f64 {
        libm::log((1.0 + self.n_docs as f64) / (1.0 + self.df(token) as f64)) + 1.0
    }

    /// Corpus-wide TF-IDF mass of a token: `df · idf`.
    pub fn mass(&self, token: &str) -> f64 {
        self.df(token) as f64 * self.idf(token)
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.df.keys().map(String::as_str)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.df.len()
    }
}

/// `tf · (ln((1+N)/(1+df)) + 1)`, where tf counts the lowercased token among
/// the sentence's words.
pub fn tfidf_score(token: &str, sentence: &str, stats: &TfidfStats) -> f64 {
    let token = token.to_lowercase();
    let tf = words(sentence).filter(|w| w.text.to_lowercase() == token).count();
    if tf == 0 {
        return 0.0;
    }
    tf as f64 * stats.idf(&token)
}

/// Word → candidate misspellings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpellingDictionary {
    entries: BTreeMap<String, Vec<String>>,
}

impl SpellingDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<I, S>(&mut self, word: &str, misspellings: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let list = self.entries.entry(word.to_lowercase()).or_default();
        for m in misspellings {
            let m = m.into();
            if !list.contains(&m) {
                list.push(m);
            }
        }
    }

    pub fn get(&self, word: &str) -> Option<&[String]> {
        self.entries
            .get(&word.to_lowercase())
            .map(Vec::as_slice)
            .filter(|l| !l.is_empty())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Dense word vectors of one fixed dimension, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    tokens: Vec<String>,
    vectors: Vec<Vec<f64>>,
    norms: Vec<f64>,
    index: BTreeMap<String, usize>,
}

impl EmbeddingTable {
    pub fn new(rows: impl IntoIterator<Item = (String, Vec<f64>)>) -> Result<Self> {
        let mut table = EmbeddingTable {
            tokens: Vec::new(),
            vectors: Vec::new(),
            norms: Vec::new(),
            index: BTreeMap::new(),
        };
        for (token, vector) in rows {
            if let Some(first) = table.vectors.first() {
                if first.len() != vector.len() {
                    return Err(Error::InvalidEmbeddingTable("inconsistent dimensions"));
                }
            } else if vector.is_empty() {
                return Err(Error::InvalidEmbeddingTable("zero dimension"));
            }
            if vector.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidEmbeddingTable("non-finite component"));
            }
            let token = token.to_lowercase();
            if table.index.insert(token.clone(), table.tokens.len()).is_some() {
                return Err(Error::InvalidEmbeddingTable("duplicate token"));
            }
            table.norms.push(libm::sqrt(vector.iter().map(|x| x * x).sum()));
            table.tokens.push(token);
            table.vectors.push(vector);
        }
        if table.tokens.is_empty() {
            return Err(Error::InvalidEmbeddingTable("empty"));
        }
        Ok(table)
    }

    pub fn dimension(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(&token.to_lowercase())
    }

    /// Most cosine-similar other token; ties go to the earlier row.
    pub fn nearest_neighbor(&self, token: &str) -> Option<&str> {
        let &i = self.index.get(&token.to_lowercase())?;
        if self.norms[i] == 0.0 {
            return None;
        }
        let query = &self.vectors[i];
        let mut best: Option<(usize, f64)> = None;
        for (j, v) in self.vectors.iter().enumerate() {
            if j == i || self.norms[j] == 0.0 {
                continue;
            }
            let dot: f64 = query.iter().zip(v).map(|(a, b)| a * b).sum();
            let sim = dot / (self.norms[i] * self.norms[j]);
            if best.is_none_or(|(_, s)| sim > s) {
                best = Some((j, sim));
            }
        }
        best.map(|(j, _)| self.tokens[j].as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TfidfMode {
    Insert,
    Replace,
}

/// A planned replacement of `range` in `e`. Ranges never overlap the span
/// interior; an empty range at a span edge inserts on the outer side.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Edit {
    range: Range<usize>,
    text: String,
}

fn replay(variant: &str, variant_span: Range<usize>, t: &Triplet, edits: &[Edit]) -> (String, Range<usize>) {
    let map = |o: usize| {
        if o <= t.span_start {
            o
        } else {
            o - t.span_end + variant_span.end
        }
    };
    let mut out = String::with_capacity(variant.len() + 16);
    let mut cursor = 0;
    let mut shift: isize = 0;
    for edit in edits {
        let (start, end) = (map(edit.range.start), map(edit.range.end));
        out.push_str(&variant[cursor..start]);
        out.push_str(&edit.text);
        cursor = end;
        if edit.range.end <= t.span_start {
            shift += edit.text.len() as isize - (end - start) as isize;
        }
    }
    out.push_str(&variant[cursor..]);
    let span = (variant_span.start as isize + shift) as usize..(variant_span.end as isize + shift) as usize;
    (out, span)
}

fn apply_edits(t: &Triplet, mut edits: Vec<Edit>, name: &str) -> Triplet {
    edits.sort_by_key(|e| (e.range.start, e.range.end));
    let (e, span) = replay(&t.e, t.span(), t, &edits);
    let (e_c, _) = replay(&t.e_c, t.e_c_span(), t, &edits);
    let (e_i, _) = replay(&t.e_i, t.e_i_span(), t, &edits);
    Triplet {
        e,
        e_c,
        e_i,
        span_start: span.start,
        span_end: span.end,
        augmentation: Some(name.to_string()),
        ..t.clone()
    }
}

/// Words of `e` lying entirely outside the MWE span.
fn context_words(t: &Triplet) -> Vec<Word<'_>> {
    words(&t.e)
        .filter(|w| w.end <= t.span_start || w.start >= t.span_end)
        .collect()
}

fn cased(replacement: &str, original: &str) -> String {
    if starts_uppercase(original) {
        capitalize_first(replacement)
    } else {
        replacement.to_string()
    }
}

fn check_rate(rate: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rate) {
        Ok(())
    } else {
        Err(Error::InvalidRate(rate))
    }
}

/// Replaces context words found in `dictionary` with a uniformly chosen
/// misspelling, each with probability `rate`.
pub fn augment_spelling(t: &Triplet, dictionary: &SpellingDictionary, rate: f64, seed: u64) -> Result<Triplet> {
    check_rate(rate)?;
    let mut rng = rng::rng(seed);
    let mut edits = Vec::new();
    for w in context_words(t) {
        let Some(options) = dictionary.get(w.text) else {
            continue;
        };
        if rng.random_bool(rate) {
            let pick = &options[rng.random_range(0..options.len())];
            edits.push(Edit {
                range: w.start..w.end,
                text: cased(pick, w.text),
            });
        }
    }
    Ok(apply_edits(t, edits, "spelling"))
}

/// Replaces in-vocabulary context words, each with probability `rate`, by
/// their nearest neighbour in `table`.
pub fn augment_embedding(t: &Triplet, table: &EmbeddingTable, rate: f64, seed: u64) -> Result<Triplet> {
    check_rate(rate)?;
    let mut rng = rng::rng(seed);
    let mut edits = Vec::new();
    for w in context_words(t) {
        if !table.contains(w.text) {
            continue;
        }
        if rng.random_bool(rate) {
            if let Some(neighbor) = table.nearest_neighbor(w.text) {
                edits.push(Edit {
                    range: w.start..w.end,
                    text: cased(neighbor, w.text),
                });
            }
        }
    }
    Ok(apply_edits(t, edits, "embed"))
}

/// Draws a vocabulary token weighted by corpus TF-IDF mass, never `exclude`.
fn sample_token<'s, R: RngCore>(stats: &'s TfidfStats, exclude: Option<&str>, rng: &mut R) -> Option<&'s str> {
    let (tokens, weights): (Vec<&str>, Vec<f64>) = stats
        .vocabulary()
        .filter(|t| Some(*t) != exclude)
        .map(|t| (t, stats.mass(t)))
        .unzip();
    let dist = WeightedIndex::new(&weights).ok()?;
    Some(tokens[dist.sample(rng)])
}

/// TF-IDF guided augmentation with exactly `k` edits.
///
/// Replace mode swaps the `k` lowest-scoring context words (leftmost first
/// on ties) for mass-weighted vocabulary draws. Insert mode places `k`
/// mass-weighted draws at distinct word boundaries outside the span.
pub fn augment_tfidf(t: &Triplet, stats: &TfidfStats, mode: TfidfMode, k: usize, seed: u64) -> Result<Triplet> {
    if k == 0 {
        return Err(Error::InvalidAugmentationCount);
    }
    if stats.n_docs() == 0 || stats.vocabulary_size() == 0 {
        return Err(Error::DegenerateStats);
    }
    let mut rng = rng::rng(seed);
    let context = context_words(t);
    let mut edits = Vec::with_capacity(k);
    match mode {
        TfidfMode::Replace => {
            if context.len() < k {
                return Err(Error::AugmentationInfeasible {
                    eligible: context.len(),
                    k,
                });
            }
            let mut scored: Vec<(f64, usize)> = context
                .iter()
                .enumerate()
                .map(|(i, w)| (tfidf_score(w.text, &t.e, stats), i))
                .collect();
            scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(_, i) in &scored[..k] {
                let w = context[i];
                let original = w.text.to_lowercase();
                let token = sample_token(stats, Some(&original), &mut rng)
                    .ok_or(Error::AugmentationInfeasible { eligible: 0, k })?;
                edits.push(Edit {
                    range: w.start..w.end,
                    text: cased(token, w.text),
                });
            }
        }
        TfidfMode::Insert => {
            // Insert before every context word or the span, or after the last one.
            let mut starts: Vec<usize> = context.iter().map(|w| w.start).collect();
            starts.push(t.span_start);
            starts.sort_unstable();
            let last_end = context.iter().map(|w| w.end).chain([t.span_end]).max().unwrap_or(t.span_end);
            let slots = starts.len() + 1;
            if slots < k {
                return Err(Error::AugmentationInfeasible { eligible: slots, k });
            }
            let mut chosen = index::sample(&mut rng, slots, k).into_vec();
            chosen.sort_unstable();
            for slot in chosen {
                let token = sample_token(stats, None, &mut rng).ok_or(Error::AugmentationInfeasible { eligible: 0, k })?;
                let edit = match starts.get(slot) {
                    Some(&at) => Edit {
                        range: at..at,
                        text: alloc::format!("{token} "),
                    },
                    None => Edit {
                        range: last_end..last_end,
                        text: alloc::format!(" {token}"),
                    },
                };
                edits.push(edit);
            }
        }
    }
    let name = match mode {
        TfidfMode::Insert => "tfidf-insert",
        TfidfMode::Replace => "tfidf-replace",
    };
    Ok(apply_edits(t, edits, name))
}

/// One configured augmenter.
#[derive(Debug, Clone, Copy)]
pub enum Augmenter<'a> {
    Spelling { dictionary: &'a SpellingDictionary, rate: f64 },
    Embedding { table: &'a EmbeddingTable, rate: f64 },
    Tfidf { stats: &'a TfidfStats, mode: TfidfMode, k: usize },
}

impl Augmenter<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            Augmenter::Spelling { .. } => "spelling",
            Augmenter::Embedding { .. } => "embed",
            Augmenter::Tfidf { mode: TfidfMode::Insert, .. } => "tfidf-insert",
            Augmenter::Tfidf { mode: TfidfMode::Replace, .. } => "tfidf-replace",
        }
    }

    pub fn apply(&self, t: &Triplet, seed: u64) -> Result<Triplet> {
        match *self {
            Augmenter::Spelling { dictionary, rate } => augment_spelling(t, dictionary, rate, seed),
            Augmenter::Embedding { table, rate } => augment_embedding(t, table, rate, seed),
            Augmenter::Tfidf { stats, mode, k } => augment_tfidf(t, stats, mode, k, seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDataset {
    pub records: Vec<Triplet>,
    /// Records whose augmented copy is an unmodified pass-through because
    /// too few eligible positions existed.
    pub infeasible: usize,
}

/// Augments every record once with a per-record seed derived from `seed`
/// and the record id. With `keep_originals` each original precedes its copy.
pub fn augment_dataset(records: &[Triplet], augmenter: &Augmenter<'_>, seed: u64, keep_originals: bool) -> Result<AugmentedDataset> {
    let mut out = Vec::with_capacity(records.len() * if keep_originals { 2 } else { 1 });
    let mut infeasible = 0;
    for t in records {
        let record_seed = rng::record_seed(seed, &t.id());
        let augmented = match augmenter.apply(t, record_seed) {
            Ok(a) => a,
            Err(Error::AugmentationInfeasible { .. }) => {
                infeasible += 1;
                Triplet {
                    augmentation: Some(augmenter.name().to_string()),
                    ..t.clone()
                }
            }
            Err(e) => return Err(e),
        };
        if keep_originals {
            out.push(t.clone());
        }
        out.push(augmented);
    }
    Ok(AugmentedDataset { records: out, infeasible })
}
