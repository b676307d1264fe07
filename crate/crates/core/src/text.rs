//! Small text utilities shared by every stage.

use alloc::string::String;

/// A word token located by byte offsets into its source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Word<'a> {
    pub start: usize,
    pub end: usize,
    pub text: &'a str,
}

#[inline]
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

#[inline]
fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Iterates maximal alphanumeric runs. An apostrophe joins two runs when it
/// sits directly between word characters ("don't" is one word).
pub fn words(text: &str) -> Words<'_> {
    Words { text, pos: 0 }
}

pub struct Words<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Iterator for Words<'a> {
    type Item = Word<'a>;

    fn next(&mut self) -> Option<Word<'a>> {
        let rest = &self.text[self.pos..];
        let (offset, _) = rest.char_indices().find(|&(_, c)| is_word_char(c))?;
        let start = self.pos + offset;
        let mut end = start;
        let mut chars = self.text[start..].char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if is_word_char(c) {
                end = start + i + c.len_utf8();
            } else if is_apostrophe(c) && matches!(chars.peek(), Some(&(_, n)) if is_word_char(n)) {
                continue;
            } else {
                break;
            }
        }
        self.pos = end;
        Some(Word {
            start,
            end,
            text: &self.text[start..end],
        })
    }
}

/// Collapses every whitespace run to one ASCII space and trims both ends.
pub fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for piece in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(piece);
    }
    out
}

pub fn starts_uppercase(text: &str) -> bool {
    text.chars().next().is_some_and(char::is_uppercase)
}

/// Uppercases the first character, leaving the rest untouched.
pub fn capitalize_first(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Case-insensitive match of `needle` (already lowercase) at the start of
/// `haystack`. Returns the number of haystack bytes consumed.
pub fn match_prefix_ignore_case(haystack: &str, needle: &str) -> Option<usize> {
    let mut hay = haystack.char_indices();
    let mut consumed = 0;
    let mut pending = needle.chars().peekable();
    while pending.peek().is_some() {
        let (i, c) = hay.next()?;
        for lc in c.to_lowercase() {
            if pending.next() != Some(lc) {
                return None;
            }
        }
        consumed = i + c.len_utf8();
    }
    Some(consumed)
}
