//! Directory of plain-text books to context sentences.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use idiomforge_core::corpus::{segment_sentences, strip_boilerplate, ContextSentence, Document};
use idiomforge_core::Error as CoreError;
use rayon::prelude::*;

use crate::error::{ForgeError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IngestOutput {
    pub documents: usize,
    pub skipped_empty: Vec<String>,
    pub sentences: Vec<ContextSentence>,
}

/// Regular files directly under `dir`, sorted by name.
pub fn list_corpus(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(ForgeError::Input(format!("corpus directory {} does not exist", dir.display())));
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| ForgeError::io(dir, e))? {
        let path = entry.map_err(|e| ForgeError::io(dir, e))?.path();
        if path.is_file() && !is_hidden(&path) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn is_hidden(path: &Path) -> bool {
    path.file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with('.'))
}

/// `Title:` header line, if any.
pub fn header_title(raw: &str) -> Option<&str> {
    raw.lines()
        .take_while(|l| !l.trim_start().starts_with("***"))
        .find_map(|l| l.trim().strip_prefix("Title:"))
        .map(str::trim)
        .filter(|t| !t.is_empty())
}

pub fn load_document(path: &Path) -> Result<Document> {
    let doc_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| ForgeError::Input(format!("{}: file name is not valid UTF-8", path.display())))?
        .to_string();
    let raw = std::fs::read_to_string(path).map_err(|e| ForgeError::io(path, e))?;
    let title = header_title(&raw).unwrap_or(&doc_id).to_string();
    Ok(Document::new(doc_id, title, strip_boilerplate(&raw)))
}

/// Segments every document. Output is ordered by `(doc_id, index)`
/// regardless of thread count.
pub fn ingest_dir(dir: &Path) -> Result<IngestOutput> {
    let files = list_corpus(dir)?;
    let mut seen = BTreeSet::new();
    for f in &files {
        let stem = f.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        if !seen.insert(stem.clone()) {
            return Err(ForgeError::Input(format!("two corpus files share the document id {stem:?}")));
        }
    }
    let mut per_doc: Vec<(String, Option<Vec<ContextSentence>>)> = files
        .par_iter()
        .map(|path| {
            let doc = load_document(path)?;
            match segment_sentences(&doc) {
                Ok(s) => Ok((doc.doc_id, Some(s))),
                Err(CoreError::EmptyDocument(_)) => Ok((doc.doc_id, None)),
                Err(e) => Err(e.into()),
            }
        })
        .collect::<Result<_>>()?;
    per_doc.sort_by(|a, b| a.0.cmp(&b.0));

    let mut out = IngestOutput {
        documents: per_doc.len(),
        ..Default::default()
    };
    for (doc_id, sentences) in per_doc {
        match sentences {
            Some(s) => out.sentences.extend(s),
            None => out.skipped_empty.push(doc_id),
        }
    }
    Ok(out)
}
