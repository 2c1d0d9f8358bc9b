//! Exact arithmetic for the free group on two generators: reduced words,
//! the group law, prefix tests, the periodic letter schedule, and
//! Cayley-ball enumeration.
//!
//! A word is stored as its reduced letter sequence; the empty sequence is
//! the identity `e`. Serialization uses one character per letter, with
//! uppercase for inverses: `a`, `A`, `b`, `B`, and the literal `e` for
//! the identity. Canonical ordering is shortlex with `a < A < b < B`.

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// One of the four generator letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Letter {
    A = 0,
    AInv = 1,
    B = 2,
    BInv = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_symbol(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'A' => Some(Letter::AInv),
            'b' => Some(Letter::B),
            'B' => Some(Letter::BInv),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// The letter driving growth at step `n`: period four, `a, A, b, B`.
pub fn letter_schedule(n: usize) -> Letter {
    Letter::ALL[n % 4]
}

type Letters = SmallVec<[Letter; 16]>;

/// A reduced word; the group element it denotes.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Letters,
}

impl Word {
    /// The identity `e`.
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn from_letter(l: Letter) -> Word {
        let mut letters = Letters::new();
        letters.push(l);
        Word { letters }
    }

    /// Builds a word from letters, cancelling adjacent inverse pairs.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(iter: I) -> Word {
        let mut letters = Letters::new();
        for l in iter {
            if letters.last() == Some(&l.inverse()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    /// Wraps a sequence already known to be reduced.
    fn from_reduced(letters: Letters) -> Word {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// Group multiplication: concatenate and reduce.
    pub fn mul(&self, rhs: &Word) -> Word {
        let mut letters = self.letters.clone();
        for &l in rhs.letters.iter() {
            if letters.last() == Some(&l.inverse()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Word { letters }
    }

    /// Group inverse: reverse the letters and invert each.
    pub fn inverse(&self) -> Word {
        Word::from_reduced(self.letters.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Left multiplication by a single letter.
    pub fn left_mul(&self, l: Letter) -> Word {
        if self.letters.first() == Some(&l.inverse()) {
            Word::from_reduced(self.letters[1..].iter().copied().collect())
        } else {
            let mut letters = Letters::with_capacity(self.len() + 1);
            letters.push(l);
            letters.extend_from_slice(&self.letters);
            Word { letters }
        }
    }

    /// True iff the reduced word starts with `l`; false for the identity.
    pub fn begins_with(&self, l: Letter) -> bool {
        self.letters.first() == Some(&l)
    }

    /// Splits the reduced word at `pos` into a (prefix, suffix) pair.
    /// Both parts are reduced, and prefix * suffix multiplies back to
    /// the word without cancellation.
    pub fn split_at(&self, pos: usize) -> (Word, Word) {
        let (u, v) = self.letters.split_at(pos);
        (
            Word::from_reduced(u.iter().copied().collect()),
            Word::from_reduced(v.iter().copied().collect()),
        )
    }

    /// Parses `"e"`, the empty string, or a string over `{a, A, b, B}`,
    /// cancelling as it reads.
    pub fn parse(text: &str) -> Result<Word> {
        if text == "e" || text.is_empty() {
            return Ok(Word::identity());
        }
        let mut letters = Letters::new();
        for (pos, ch) in text.chars().enumerate() {
            let l = Letter::from_symbol(ch).ok_or(Error::ParseWord { ch, pos })?;
            if letters.last() == Some(&l.inverse()) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Ok(Word { letters })
    }

    /// Inverse of [`Word::parse`]: one character per letter, `"e"` for
    /// the identity.
    pub fn render(&self) -> String {
        if self.is_identity() {
            "e".to_string()
        } else {
            self.letters.iter().map(|l| l.symbol()).collect()
        }
    }
}

/// Shortlex: length first, then letter order `a < A < b < B`.
impl Ord for Word {
    fn cmp(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Word) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self.render())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(deserializer)?;
        Word::parse(&s).map_err(D::Error::custom)
    }
}

/// All reduced words of length at most `radius`, in shortlex order.
/// Cardinality is `2 * 3^R - 1` for `R >= 1`.
pub fn ball(radius: usize, cap: usize) -> Result<Vec<Word>> {
    if radius > cap {
        return Err(Error::Resource {
            what: "ball radius",
            requested: radius,
            cap,
        });
    }
    let mut all = vec![Word::identity()];
    let mut level = vec![Word::identity()];
    for _ in 0..radius {
        // Extending a lexicographically sorted level in letter order
        // keeps the next level sorted, so `all` stays shortlex-sorted.
        let mut next = Vec::with_capacity(level.len() * 3 + 1);
        for w in &level {
            for l in Letter::ALL {
                if w.letters().last() == Some(&l.inverse()) {
                    continue;
                }
                let mut letters: Letters = w.letters().iter().copied().collect();
                letters.push(l);
                next.push(Word::from_reduced(letters));
            }
        }
        all.extend_from_slice(&next);
        level = next;
    }
    Ok(all)
}

/// Closed form for the ball cardinality.
pub fn ball_size(radius: usize) -> usize {
    if radius == 0 {
        1
    } else {
        2 * 3usize.pow(radius as u32) - 1
    }
}
