//! Alphabets, words and the dense vertex numbering of the tree `X*`.
//!
//! Vertices are numbered in length-then-lexicographic order, so the root is
//! `0`, the children of vertex `i` are `i*k + 1 .. i*k + k`, and the first
//! `|X^(n)|` indices are exactly the words of length `< n`. Every table in
//! the crate (portraits, runs, blocks) is laid out in this order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Letter = u8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet size must be between 1 and 255, got {0}")]
    BadAlphabet(usize),
    #[error("letter {letter} is out of range for an alphabet of size {size}")]
    LetterOutOfRange { letter: usize, size: usize },
    #[error("cannot parse word {0:?}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self, WordError> {
        if size == 0 || size > Letter::MAX as usize {
            return Err(WordError::BadAlphabet(size));
        }
        Ok(Alphabet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `|X^n|`.
    pub fn level_len(&self, n: usize) -> usize {
        self.size.pow(n as u32)
    }

    /// `|X^(n)|`, the number of words of length `< n`.
    pub fn below_len(&self, n: usize) -> usize {
        below_len(self.size, n)
    }

    /// `|X^[n]|`, the number of words of length `<= n`.
    pub fn up_to_len(&self, n: usize) -> usize {
        below_len(self.size, n + 1)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.size).map(|x| x as Letter)
    }

    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        match w.0.iter().find(|&&x| x as usize >= self.size) {
            Some(&x) => Err(WordError::LetterOutOfRange {
                letter: x as usize,
                size: self.size,
            }),
            None => Ok(()),
        }
    }
}

pub(crate) fn below_len(k: usize, n: usize) -> usize {
    if k == 1 {
        n
    } else {
        (k.pow(n as u32) - 1) / (k - 1)
    }
}

#[inline]
pub(crate) fn child_index(k: usize, i: usize, x: usize) -> usize {
    i * k + 1 + x
}

/// Index of the first vertex on level `n`.
#[inline]
pub(crate) fn level_start(k: usize, n: usize) -> usize {
    below_len(k, n)
}

/// Level (word length) of vertex `i`.
pub(crate) fn level_of(k: usize, mut i: usize) -> usize {
    let mut n = 0;
    while i > 0 {
        i = (i - 1) / k;
        n += 1;
    }
    n
}

/// A finite word over an alphabet `{0, .., k-1}`.
///
/// Ordered by length first, then lexicographically.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        Word(letters.into_iter().collect())
    }

    /// The word `x^n`.
    pub fn repeat(x: Letter, n: usize) -> Self {
        Word(vec![x; n])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, x: Letter) {
        self.0.push(x);
    }

    pub fn child(&self, x: Letter) -> Word {
        let mut w = self.clone();
        w.0.push(x);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &Word) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    /// `Some(u)` when `self = prefix · u`.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0.strip_prefix(prefix.0.as_slice()).map(|s| Word(s.to_vec()))
    }

    /// Dense index of this word in the length-then-lex numbering.
    pub fn vertex_index(&self, k: usize) -> usize {
        self.0
            .iter()
            .fold(0, |i, &x| child_index(k, i, x as usize))
    }

    pub fn from_vertex_index(k: usize, mut i: usize) -> Word {
        let mut v = Vec::new();
        while i > 0 {
            v.push(((i - 1) % k) as Letter);
            i = (i - 1) / k;
        }
        v.reverse();
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        if self.0.iter().all(|&x| x < 10) {
            for x in &self.0 {
                write!(f, "{x}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
            f.write_str(&parts.join("."))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Accepts `""`, `"ε"`, `"e"`, digit strings like `"0110"`, or
    /// dot-separated letters like `"10.3"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" {
            return Ok(Word::empty());
        }
        let parse = |t: &str| t.parse::<Letter>().map_err(|_| WordError::Parse(s.to_string()));
        if s.contains('.') {
            s.split('.').map(parse).collect::<Result<Vec<_>, _>>().map(Word)
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as Letter)
                        .ok_or_else(|| WordError::Parse(s.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Word)
        }
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordSet {
    /// `X^n`
    Level,
    /// `X^[n]`, words of length at most `n`
    UpTo,
    /// `X^(n)`, words of length less than `n`
    Below,
}

/// Lists `X^n`, `X^[n]` or `X^(n)` in length-then-lex order.
pub fn enumerate_words(alphabet: Alphabet, n: usize, kind: WordSet) -> Vec<Word> {
    let k = alphabet.size();
    let range = match kind {
        WordSet::Level => level_start(k, n)..level_start(k, n + 1),
        WordSet::UpTo => 0..below_len(k, n + 1),
        WordSet::Below => 0..below_len(k, n),
    };
    range.map(|i| Word::from_vertex_index(k, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn small_enumerations() {
        let x = Alphabet::new(2).unwrap();
        assert_eq!(enumerate_words(x, 0, WordSet::Level), vec![Word::empty()]);
        assert_eq!(
            enumerate_words(x, 2, WordSet::Level),
            vec![w("00"), w("01"), w("10"), w("11")]
        );
        assert_eq!(
            enumerate_words(x, 2, WordSet::Below),
            vec![Word::empty(), w("0"), w("1")]
        );
        assert!(enumerate_words(x, 0, WordSet::Below).is_empty());
        assert_eq!(enumerate_words(x, 1, WordSet::UpTo).len(), 3);
    }

    #[test]
    fn counts_match_closed_forms() {
        for k in 1..=4 {
            let x = Alphabet::new(k).unwrap();
            for n in 0..=5 {
                assert_eq!(enumerate_words(x, n, WordSet::Level).len(), k.pow(n as u32));
                let below = enumerate_words(x, n, WordSet::Below).len();
                let expected = if k == 1 { n } else { (k.pow(n as u32) - 1) / (k - 1) };
                assert_eq!(below, expected);
            }
        }
    }

    #[test]
    fn vertex_numbering_round_trips_and_is_sorted() {
        for k in 1..=3 {
            let x = Alphabet::new(k).unwrap();
            let words = enumerate_words(x, 4, WordSet::UpTo);
            for (i, word) in words.iter().enumerate() {
                assert_eq!(word.vertex_index(k), i);
                assert_eq!(level_of(k, i), word.len());
            }
            assert!(words.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn prefixes_and_parsing() {
        assert!(w("01").is_proper_prefix_of(&w("011")));
        assert!(!w("011").is_prefix_of(&w("01")));
        assert_eq!(w("0110").strip_prefix(&w("01")), Some(w("10")));
        assert_eq!(w("ε"), Word::empty());
        assert_eq!(w("10.2"), Word::from_letters([10, 2]));
        assert_eq!(w("10.2").to_string(), "10.2");
        assert!("0a".parse::<Word>().is_err());
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(2).unwrap().check(&w("012")).is_err());
    }
}
