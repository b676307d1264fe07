//! Bronze triplet generation by synonym substitution.
//!
//! A corpus sentence containing a figurative synonym of an MWE becomes the
//! correct-replacement sentence `e_c`. Swapping the synonym for the MWE gives
//! `e`; swapping it for the first literal paraphrase gives `e_i`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::corpus::ContextSentence;
use crate::lexicon::{Lexicon, NounCompoundEntry};
use crate::text::{capitalize_first, is_word_char, match_prefix_ignore_case, starts_uppercase};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triplet {
    pub mwe: String,
    pub e: String,
    pub e_c: String,
    pub e_i: String,
    /// Byte range of the MWE inside `e`.
    pub span_start: usize,
    pub span_end: usize,
    pub doc_id: String,
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prev: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next: Option<String>,
    /// Name of the augmenter that produced this record, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation: Option<String>,
}

impl Triplet {
    /// Stable identifier `doc_id:index:mwe`.
    pub fn id(&self) -> String {
        format!("{}:{}:{}", self.doc_id, self.index, self.mwe)
    }

    pub fn span(&self) -> Range<usize> {
        self.span_start..self.span_end
    }

    /// The three sentences share their prefix and suffix; only the span
    /// length differs.
    fn variant_span(&self, variant: &str) -> Range<usize> {
        let suffix = self.e.len() - self.span_end;
        self.span_start..variant.len() - suffix
    }

    /// Range of the figurative synonym inside `e_c`.
    pub fn e_c_span(&self) -> Range<usize> {
        self.variant_span(&self.e_c)
    }

    /// Range of the literal paraphrase inside `e_i`.
    pub fn e_i_span(&self) -> Range<usize> {
        self.variant_span(&self.e_i)
    }

    pub fn prefix(&self) -> &str {
        &self.e[..self.span_start]
    }

    pub fn suffix(&self) -> &str {
        &self.e[self.span_end..]
    }

    /// Checks the structural invariants: the span holds the MWE, and all
    /// three sentences agree outside it.
    pub fn is_consistent(&self) -> bool {
        if self.span_start > self.span_end
            || self.span_end > self.e.len()
            || !self.e.is_char_boundary(self.span_start)
            || !self.e.is_char_boundary(self.span_end)
        {
            return false;
        }
        if self.e[self.span()].to_lowercase() != self.mwe {
            return false;
        }
        let (prefix, suffix) = (self.prefix(), self.suffix());
        [&self.e_c, &self.e_i]
            .iter()
            .all(|v| v.len() >= prefix.len() + suffix.len() && v.starts_with(prefix) && v.ends_with(suffix))
    }

    pub fn cmp_source(&self, other: &Triplet) -> Ordering {
        (&self.doc_id, self.index, &self.mwe).cmp(&(&other.doc_id, other.index, &other.mwe))
    }
}

/// A located figurative synonym.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence<'a> {
    pub synonym: &'a str,
    pub start: usize,
    pub end: usize,
}

/// Leftmost whole-word, case-insensitive occurrence of any figurative
/// synonym. At equal positions the longest match wins.
pub fn find_synonym_occurrence<'a>(text: &str, entry: &'a NounCompoundEntry) -> Option<Occurrence<'a>> {
    let mut prev_is_word = false;
    for (start, c) in text.char_indices() {
        let at_word_start = is_word_char(c) && !prev_is_word;
        prev_is_word = is_word_char(c);
        if !at_word_start {
            continue;
        }
        let rest = &text[start..];
        let best = entry
            .figurative_synonyms
            .iter()
            .filter_map(|syn| {
                let len = match_prefix_ignore_case(rest, syn)?;
                let whole_word = !rest[len..].chars().next().is_some_and(is_word_char);
                whole_word.then_some((syn.as_str(), len))
            })
            .max_by_key(|&(_, len)| len);
        if let Some((synonym, len)) = best {
            return Some(Occurrence {
                synonym,
                start,
                end: start + len,
            });
        }
    }
    None
}

fn with_casing(replacement: &str, replaced: &str) -> String {
    if starts_uppercase(replaced) {
        capitalize_first(replacement)
    } else {
        String::from(replacement)
    }
}

fn splice(text: &str, range: Range<usize>, with: &str) -> String {
    let mut out = String::with_capacity(text.len() + with.len());
    out.push_str(&text[..range.start]);
    out.push_str(with);
    out.push_str(&text[range.end..]);
    out
}

/// Builds the triplet for one located synonym. No grammatical repair is done.
pub fn forge_triplet(sentence: &ContextSentence, entry: &NounCompoundEntry, occurrence: &Occurrence<'_>) -> Triplet {
    let text = &sentence.text;
    let range = occurrence.start..occurrence.end;
    let replaced = &text[range.clone()];
    let idiom = with_casing(&entry.mwe, replaced);
    let literal = with_casing(entry.literal(), replaced);
    Triplet {
        mwe: entry.mwe.clone(),
        e: splice(text, range.clone(), &idiom),
        e_c: text.clone(),
        e_i: splice(text, range, &literal),
        span_start: occurrence.start,
        span_end: occurrence.start + idiom.len(),
        doc_id: sentence.doc_id.clone(),
        index: sentence.index,
        prev: sentence.prev.clone(),
        next: sentence.next.clone(),
        augmentation: None,
    }
}

/// All triplets of one sentence, ordered by MWE.
pub fn triplets_for_sentence(sentence: &ContextSentence, lexicon: &Lexicon) -> Vec<Triplet> {
    if sentence.text.is_empty() {
        return Vec::new();
    }
    lexicon
        .entries()
        .iter()
        .filter_map(|entry| {
            find_synonym_occurrence(&sentence.text, entry).map(|occ| forge_triplet(sentence, entry, &occ))
        })
        .collect()
}

/// Streams Bronze triplets. With input sorted by (doc_id, index) the output
/// is sorted by (doc_id, index, mwe).
pub fn generate_bronze<'a, I>(sentences: I, lexicon: &'a Lexicon) -> impl Iterator<Item = Triplet> + 'a
where
    I: IntoIterator<Item = ContextSentence>,
    I::IntoIter: 'a,
{
    sentences
        .into_iter()
        .flat_map(move |s| triplets_for_sentence(&s, lexicon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn entry(mwe: &str, fig: &[&str], lit: &[&str]) -> NounCompoundEntry {
        NounCompoundEntry::new(
            mwe,
            fig.iter().map(|s| s.to_string()).collect(),
            lit.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    fn sentence(text: &str) -> ContextSentence {
        ContextSentence {
            doc_id: "doc".into(),
            index: 3,
            text: text.into(),
            prev: Some("Before.".into()),
            next: None,
        }
    }

    fn guinea_pig() -> NounCompoundEntry {
        entry("guinea pig", &["test subject"], &["animal"])
    }

    #[test]
    fn figure_one_sentence() {
        let s = sentence("I initially feared that taking it would make me a test subject");
        let e = guinea_pig();
        let occ = find_synonym_occurrence(&s.text, &e).unwrap();
        assert_eq!(occ.synonym, "test subject");
        assert_eq!(&s.text[occ.start..occ.end], "test subject");
        let t = forge_triplet(&s, &e, &occ);
        assert_eq!(t.e, "I initially feared that taking it would make me a guinea pig");
        assert_eq!(t.e_c, s.text);
        assert_eq!(t.e_i, "I initially feared that taking it would make me a animal");
        assert_eq!(&t.e[t.span()], "guinea pig");
        assert_eq!(&t.e_c[t.e_c_span()], "test subject");
        assert_eq!(&t.e_i[t.e_i_span()], "animal");
        assert_eq!(t.prev.as_deref(), Some("Before."));
        assert!(t.is_consistent());
    }

    #[test]
    fn whole_word_boundary_required() {
        assert_eq!(find_synonym_occurrence("testing subjects matter", &guinea_pig()), None);
        assert_eq!(find_synonym_occurrence("a test subjects b", &guinea_pig()), None);
        assert_eq!(find_synonym_occurrence("retest subject", &guinea_pig()), None);
    }

    #[test]
    fn leftmost_synonym_wins() {
        let e = entry("silver bullet", &["magic remedy", "simple solution"], &["metal projectile"]);
        let text = "A simple solution beats a magic remedy.";
        let occ = find_synonym_occurrence(text, &e).unwrap();
        assert_eq!(occ.synonym, "simple solution");
        assert_eq!(occ.start, 2);
    }

    #[test]
    fn longest_synonym_wins_at_same_position() {
        let e = entry("hot potato", &["issue", "issue of the day"], &["warm vegetable"]);
        let occ = find_synonym_occurrence("The issue of the day was taxes.", &e).unwrap();
        assert_eq!(occ.synonym, "issue of the day");
        assert_eq!((occ.start, occ.end), (4, 20));
    }

    #[test]
    fn sentence_start_casing_copied() {
        let s = sentence("Test subject fees rose");
        let e = guinea_pig();
        let occ = find_synonym_occurrence(&s.text, &e).unwrap();
        let t = forge_triplet(&s, &e, &occ);
        assert_eq!(t.e, "Guinea pig fees rose");
        assert_eq!(t.e_i, "Animal fees rose");
        assert_eq!((t.span_start, t.span_end), (0, 10));
        assert!(t.is_consistent());
    }

    #[test]
    fn full_sentence_replacement() {
        let s = sentence("test subject");
        let e = guinea_pig();
        let occ = find_synonym_occurrence(&s.text, &e).unwrap();
        let t = forge_triplet(&s, &e, &occ);
        assert_eq!(t.e, "guinea pig");
        assert_eq!((t.span_start, t.span_end), (0, t.e.len()));
        assert_eq!(t.e_c_span(), 0..t.e_c.len());
        assert_eq!(t.e_i, "animal");
    }

    #[test]
    fn bronze_counts() {
        let lex = Lexicon::new([
            guinea_pig(),
            entry("elbow grease", &["hard work"], &["joint lubricant"]),
        ])
        .unwrap();
        let texts = [
            "Nothing here.",
            "Hard work made him a test subject.",
            "Only a test subject.",
        ];
        let sents: Vec<_> = crate::corpus::link_neighbors("d", &texts);
        let out: Vec<_> = generate_bronze(sents.clone(), &lex).collect();
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].mwe, "elbow grease");
        assert_eq!(out[0].e, "Elbow grease made him a test subject.");
        assert_eq!(out[1].mwe, "guinea pig");
        assert_eq!(out[1].index, 1);
        assert_eq!(out[2].index, 2);
        let none: Vec<_> = generate_bronze(vec![sents[0].clone()], &lex).collect();
        assert!(none.is_empty());
    }

    #[test]
    fn empty_sentence_yields_nothing() {
        let lex = Lexicon::new([guinea_pig()]).unwrap();
        assert!(triplets_for_sentence(&sentence(""), &lex).is_empty());
    }
}
