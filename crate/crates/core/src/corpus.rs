//! Boilerplate stripping and rule-based sentence segmentation.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::text::collapse_whitespace;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    pub body: String,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, title: impl Into<String>, body: impl Into<String>) -> Self {
        Document {
            doc_id: doc_id.into(),
            title: title.into(),
            body: body.into(),
        }
    }
}

/// A sentence with its immediate neighbours in the source document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSentence {
    pub doc_id: String,
    pub index: usize,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prev: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next: Option<String>,
}

const START_MARKER: &str = "*** start of";
const END_MARKER: &str = "*** end of";

/// Returns the text between the first start-marker line and the first
/// end-marker line after it, trimmed. Without both markers the input comes
/// back unchanged.
pub fn strip_boilerplate(raw: &str) -> String {
    let mut offset = 0;
    let mut body_start = None;
    for line in raw.split_inclusive('\n') {
        let lower = line.to_lowercase();
        match body_start {
            None if lower.contains(START_MARKER) => body_start = Some(offset + line.len()),
            Some(start) if lower.contains(END_MARKER) => {
                return raw[start..offset].trim().to_string();
            }
            _ => {}
        }
        offset += line.len();
    }
    raw.to_string()
}

const ABBREVIATIONS: &[&str] = &["Mr", "Mrs", "Ms", "Dr", "St", "Jr", "Sr", "Prof"];

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '\u{201D}' | '\u{2019}')
}

fn is_opener(c: char) -> bool {
    matches!(c, '"' | '\'' | '(' | '[' | '\u{201C}' | '\u{2018}')
}

/// Whether the text after a sentence break starts a new sentence: an
/// uppercase letter, optionally behind one opening quote or bracket.
fn opens_sentence(rest: &str) -> bool {
    let mut chars = rest.chars();
    match chars.next() {
        Some(c) if c.is_uppercase() => true,
        Some(c) if is_opener(c) => chars.next().is_some_and(char::is_uppercase),
        _ => false,
    }
}

/// True when the single '.' at byte `dot` closes an abbreviation.
fn ends_abbreviation(text: &str, dot: usize) -> bool {
    let before = &text[..dot];
    let word_start = before
        .char_indices()
        .rev()
        .take_while(|&(_, c)| c.is_alphabetic())
        .last()
        .map_or(dot, |(i, _)| i);
    let word = &before[word_start..];
    if word.is_empty() {
        return false;
    }
    if before[..word_start].chars().next_back().is_some_and(char::is_alphanumeric) {
        return false;
    }
    let mut chars = word.chars();
    let single_capital = matches!((chars.next(), chars.next()), (Some(c), None) if c.is_uppercase());
    single_capital || ABBREVIATIONS.contains(&word)
}

/// Splits whitespace-normalized text into sentence strings.
pub fn split_sentences(normalized: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut iter = normalized.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if !is_terminator(c) {
            continue;
        }
        let mut end = i + c.len_utf8();
        let mut run_len = 1;
        while let Some(&(j, n)) = iter.peek() {
            if is_terminator(n) {
                run_len += 1;
            } else if !is_closer(n) {
                break;
            }
            end = j + n.len_utf8();
            iter.next();
        }
        let rest = &normalized[end..];
        let boundary = match rest.strip_prefix(' ') {
            Some(after) => opens_sentence(after),
            None => rest.is_empty(),
        };
        if !boundary || (run_len == 1 && c == '.' && ends_abbreviation(normalized, i)) {
            continue;
        }
        out.push(&normalized[start..end]);
        start = (end + 1).min(normalized.len());
    }
    if start < normalized.len() {
        out.push(&normalized[start..]);
    }
    out
}

/// Segments a document into ordered sentences linked to their neighbours.
pub fn segment_sentences(doc: &Document) -> Result<Vec<ContextSentence>> {
    let normalized = collapse_whitespace(&doc.body);
    if normalized.is_empty() {
        return Err(Error::EmptyDocument(doc.doc_id.clone()));
    }
    let texts = split_sentences(&normalized);
    Ok(link_neighbors(&doc.doc_id, &texts))
}

pub fn link_neighbors(doc_id: &str, texts: &[&str]) -> Vec<ContextSentence> {
    texts
        .iter()
        .enumerate()
        .map(|(index, text)| ContextSentence {
            doc_id: doc_id.to_string(),
            index,
            text: text.to_string(),
            prev: index.checked_sub(1).map(|p| texts[p].to_string()),
            next: texts.get(index + 1).map(|n| n.to_string()),
        })
        .collect()
}
