//! Loaders and writers for the lexicon, gloss, inference, spelling,
//! embedding and reference files.

use std::io::BufRead;
use std::path::Path;

use idiomforge_core::augment::{EmbeddingTable, SpellingDictionary};
use idiomforge_core::enrich::{InferenceRecord, InferenceStore};
use idiomforge_core::lexicon::{GlossStore, Lexicon, NounCompoundEntry};
use idiomforge_core::tiering::ReferenceProfiles;
use serde::{Deserialize, Serialize};

use crate::error::{ForgeError, Result};
use crate::jsonl;

/// Loads and validates a lexicon. Duplicate MWEs are rejected.
pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let mut entries: Vec<NounCompoundEntry> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for row in jsonl::records::<NounCompoundEntry>(path)? {
        let (line, entry) = row?;
        entry.validate().map_err(|e| ForgeError::parse(path, line, e))?;
        if !seen.insert(entry.mwe.clone()) {
            return Err(idiomforge_core::Error::DuplicateEntry(entry.mwe).into());
        }
        entries.push(entry);
    }
    Ok(Lexicon::new(entries)?)
}

pub fn write_lexicon(path: &Path, lexicon: &Lexicon) -> Result<()> {
    jsonl::write(path, lexicon.entries())
}

#[derive(Debug, Serialize, Deserialize)]
struct GlossRow {
    word: String,
    glosses: Vec<String>,
}

pub fn load_gloss_store(path: &Path) -> Result<GlossStore> {
    let mut store = GlossStore::new();
    for row in jsonl::records::<GlossRow>(path)? {
        let (_, row) = row?;
        store.insert(&row.word, row.glosses);
    }
    Ok(store)
}

pub fn load_inference_store(path: &Path) -> Result<InferenceStore> {
    jsonl::records::<InferenceRecord>(path)?
        .map(|r| r.map(|(_, rec)| rec))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct SpellingRow {
    word: String,
    misspellings: Vec<String>,
}

pub fn load_spelling_dictionary(path: &Path) -> Result<SpellingDictionary> {
    let mut dict = SpellingDictionary::new();
    for row in jsonl::records::<SpellingRow>(path)? {
        let (_, row) = row?;
        dict.insert(&row.word, row.misspellings);
    }
    Ok(dict)
}

/// Reads `token v1 v2 ... vd` lines. A leading word2vec `count dim` header
/// line is skipped.
pub fn load_embedding_table(path: &Path) -> Result<EmbeddingTable> {
    let mut rows = Vec::new();
    for (i, line) in jsonl::open(path)?.lines().enumerate() {
        let line = line.map_err(|e| ForgeError::io(path, e))?;
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else {
            continue;
        };
        let values: Vec<&str> = fields.collect();
        if i == 0 && values.len() == 1 && token.parse::<u64>().is_ok() && values[0].parse::<u64>().is_ok() {
            continue;
        }
        let vector = values
            .iter()
            .map(|v| v.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| ForgeError::parse(path, i + 1, e))?;
        rows.push((token.to_string(), vector));
    }
    Ok(EmbeddingTable::new(rows)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub mwe: String,
    pub sentence: String,
}

pub fn load_reference_profiles(path: &Path) -> Result<(ReferenceProfiles, usize)> {
    let mut profiles = ReferenceProfiles::new();
    let mut n = 0;
    for row in jsonl::records::<ReferenceRow>(path)? {
        let (_, row) = row?;
        profiles.add_sentence(&row.mwe, &row.sentence);
        n += 1;
    }
    Ok((profiles, n))
}
