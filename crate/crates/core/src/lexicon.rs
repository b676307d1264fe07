//! Noun-compound substitution lexicon and the word gloss store.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One MWE with the phrases that stand in for its figurative and literal
/// senses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NounCompoundEntry {
    pub mwe: String,
    pub figurative_synonyms: Vec<String>,
    pub literal_paraphrases: Vec<String>,
}

fn is_normalized_phrase(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with(' ')
        && !s.ends_with(' ')
        && !s.contains("  ")
        && !s.chars().any(|c| c.is_uppercase() || (c.is_whitespace() && c != ' '))
}

impl NounCompoundEntry {
    pub fn new(
        mwe: impl Into<String>,
        figurative_synonyms: Vec<String>,
        literal_paraphrases: Vec<String>,
    ) -> Result<Self> {
        let entry = NounCompoundEntry {
            mwe: mwe.into(),
            figurative_synonyms,
            literal_paraphrases,
        };
        entry.validate()?;
        Ok(entry)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason| {
            Err(Error::InvalidEntry {
                mwe: self.mwe.clone(),
                reason,
            })
        };
        if !is_normalized_phrase(&self.mwe) {
            return invalid("mwe must be lowercase and single-space separated");
        }
        if self.component_words().count() < 2 {
            return invalid("mwe needs at least two words");
        }
        if self.figurative_synonyms.is_empty() {
            return invalid("figurative_synonyms is empty");
        }
        if self.literal_paraphrases.is_empty() {
            return invalid("literal_paraphrases is empty");
        }
        for phrase in self.figurative_synonyms.iter().chain(&self.literal_paraphrases) {
            if !is_normalized_phrase(phrase) {
                return invalid("phrases must be lowercase and single-space separated");
            }
            if *phrase == self.mwe {
                return invalid("a synonym or paraphrase equals the mwe");
            }
        }
        Ok(())
    }

    pub fn component_words(&self) -> impl Iterator<Item = &str> {
        self.mwe.split(' ')
    }

    /// The paraphrase used for the incorrect-replacement sentence.
    pub fn literal(&self) -> &str {
        &self.literal_paraphrases[0]
    }
}

/// Validated entries ordered by MWE.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<NounCompoundEntry>,
}

impl Lexicon {
    /// Validates each entry and rejects duplicate MWEs.
    pub fn new(entries: impl IntoIterator<Item = NounCompoundEntry>) -> Result<Self> {
        let mut by_mwe = BTreeMap::new();
        for entry in entries {
            entry.validate()?;
            if by_mwe.contains_key(&entry.mwe) {
                return Err(Error::DuplicateEntry(entry.mwe));
            }
            by_mwe.insert(entry.mwe.clone(), entry);
        }
        Ok(Lexicon {
            entries: by_mwe.into_values().collect(),
        })
    }

    pub fn entries(&self) -> &[NounCompoundEntry] {
        &self.entries
    }

    pub fn get(&self, mwe: &str) -> Option<&NounCompoundEntry> {
        self.entries
            .binary_search_by(|e| e.mwe.as_str().cmp(mwe))
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Ordered glosses per lowercase word. Order stands in for sense ranking.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GlossStore {
    glosses: BTreeMap<String, Vec<String>>,
}

impl GlossStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends glosses for `word`, skipping ones already stored.
    pub fn insert<I, S>(&mut self, word: &str, glosses: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let list = self.glosses.entry(word.to_lowercase()).or_default();
        for gloss in glosses {
            let gloss = gloss.into();
            if !list.contains(&gloss) {
                list.push(gloss);
            }
        }
    }

    /// The first `min(n, available)` glosses of `word`.
    pub fn glosses_for(&self, word: &str, n: usize) -> &[String] {
        let key = word.to_lowercase();
        match self.glosses.get(&key) {
            Some(list) => &list[..n.min(list.len())],
            None => &[],
        }
    }

    pub fn words(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.glosses.iter().map(|(w, g)| (w.as_str(), g.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.glosses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.glosses.is_empty()
    }
}

impl<S: ToString> FromIterator<(S, Vec<String>)> for GlossStore {
    fn from_iter<T: IntoIterator<Item = (S, Vec<String>)>>(iter: T) -> Self {
        let mut store = GlossStore::new();
        for (word, glosses) in iter {
            store.insert(&word.to_string(), glosses);
        }
        store
    }
}
