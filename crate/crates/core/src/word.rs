//! Letters and words over a terminal alphabet.
//!
//! A [`Letter`] is an opaque, cheaply clonable token. Letters order by their
//! text, which is also the order every grammar uses internally, so sorted
//! output is stable across presentations.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use unicode_normalization::UnicodeNormalization;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(Arc<str>);

impl Letter {
    /// Tokens are stored in NFD, so `ā` and `a\u{304}` are the same letter.
    pub fn new(token: impl AsRef<str>) -> Self {
        Letter(Arc::from(token.as_ref().nfd().collect::<String>()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True when the token is one base character plus combining marks,
    /// so it can be written without separators.
    pub fn is_single_glyph(&self) -> bool {
        glyphs(&self.0).len() == 1
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for Letter {
    fn from(s: &str) -> Self {
        Letter::new(s)
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(Letter::new(s))
    }
}

pub type Word = Vec<Letter>;

fn is_combining(c: char) -> bool {
    matches!(c as u32, 0x0300..=0x036F | 0x1AB0..=0x1AFF | 0x20D0..=0x20FF)
}

/// Splits text into glyphs: a base character followed by any combining marks.
pub fn glyphs(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        if is_combining(c) && start.is_some() {
            continue;
        }
        if let Some(st) = start {
            out.push(&s[st..i]);
        }
        start = Some(i);
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

/// Parses a word without alphabet knowledge: whitespace-separated tokens if
/// the text contains whitespace, otherwise one letter per glyph.
pub fn parse(s: &str) -> Word {
    if s.split_whitespace().count() > 1 {
        s.split_whitespace().map(Letter::new).collect()
    } else {
        glyphs(s.trim()).into_iter().map(Letter::new).collect()
    }
}

/// Parses a word against a known alphabet. Whitespace always separates
/// tokens; a contiguous string is split per glyph only when every alphabet
/// letter is a single glyph, and otherwise taken as one token.
pub fn parse_with_alphabet(s: &str, alphabet: &BTreeSet<Letter>) -> Word {
    let s = s.trim();
    if s.is_empty() {
        return Vec::new();
    }
    if s.contains(char::is_whitespace) {
        return s.split_whitespace().map(Letter::new).collect();
    }
    if alphabet.iter().all(Letter::is_single_glyph) {
        glyphs(s).into_iter().map(Letter::new).collect()
    } else {
        vec![Letter::new(s)]
    }
}

/// Renders a word compactly when every letter is a single glyph and with
/// spaces otherwise.
pub fn display(w: &[Letter]) -> String {
    if w.iter().all(Letter::is_single_glyph) {
        w.iter().map(Letter::as_str).collect()
    } else {
        w.iter().map(Letter::as_str).collect::<Vec<_>>().join(" ")
    }
}

/// Shortlex order: by length, then lexicographically.
pub fn shortlex(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// The set of interleavings of two words.
pub fn interleavings(u: &[Letter], v: &[Letter]) -> BTreeSet<Word> {
    fn go(u: &[Letter], v: &[Letter], acc: &mut Word, out: &mut BTreeSet<Word>) {
        if u.is_empty() && v.is_empty() {
            out.insert(acc.clone());
            return;
        }
        if let Some((h, rest)) = u.split_first() {
            acc.push(h.clone());
            go(rest, v, acc, out);
            acc.pop();
        }
        if let Some((h, rest)) = v.split_first() {
            acc.push(h.clone());
            go(u, rest, acc, out);
            acc.pop();
        }
    }
    let mut out = BTreeSet::new();
    go(u, v, &mut Vec::with_capacity(u.len() + v.len()), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precomposed_letters_normalize() {
        assert_eq!(Letter::new("\u{101}"), Letter::new("a\u{304}"));
        assert_eq!(parse("\u{101}b"), parse("a\u{304}b"));
    }

    #[test]
    fn glyphs_keep_combining_marks() {
        let s = "ab\u{304}c";
        assert_eq!(glyphs(s), vec!["a", "b\u{304}", "c"]);
    }

    #[test]
    fn parse_prefers_whitespace() {
        assert_eq!(parse("ab c").len(), 2);
        assert_eq!(parse("abc").len(), 3);
        assert_eq!(parse("a b c").len(), 3);
    }

    #[test]
    fn multi_glyph_alphabet_disables_splitting() {
        let alphabet: BTreeSet<Letter> = ["ab", "c"].into_iter().map(Letter::new).collect();
        assert_eq!(parse_with_alphabet("abc", &alphabet), vec![Letter::new("abc")]);
        assert_eq!(parse_with_alphabet("ab c", &alphabet).len(), 2);
    }

    #[test]
    fn interleavings_count() {
        let u = parse("ab");
        let v = parse("c");
        let got: Vec<String> = interleavings(&u, &v).iter().map(|w| display(w)).collect();
        assert_eq!(got, vec!["abc", "acb", "cab"]);
    }
}
