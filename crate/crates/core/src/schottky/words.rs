//! Reduced words in a free group of rank `g` and primitive conjugacy classes.
//!
//! Letters are nonzero integers: `i` is the `i`-th generator and `-i` its
//! inverse. Letters are ordered `1 < -1 < 2 < -2 < ...`, which is the order
//! used for enumeration, canonical cyclic representatives, and shortlex
//! transversals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

pub type Letter = i32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter 0 is not a generator")]
    ZeroLetter,
    #[error("letters at positions {0} and {next} cancel", next = .0 + 1)]
    NotReduced(usize),
    #[error("cannot parse word: {0}")]
    Parse(String),
}

/// Position of a letter in the order `1 < -1 < 2 < -2 < ...`.
#[inline]
pub fn letter_key(l: Letter) -> u32 {
    2 * (l.unsigned_abs() - 1) + u32::from(l < 0)
}

#[inline]
pub fn letter_from_key(k: u32) -> Letter {
    let gen = (k / 2 + 1) as Letter;
    if k.is_multiple_of(2) {
        gen
    } else {
        -gen
    }
}

/// Compares letter sequences lexicographically under the letter order.
pub fn cmp_letters(a: &[Letter], b: &[Letter]) -> Ordering {
    a.iter()
        .map(|&l| letter_key(l))
        .cmp(b.iter().map(|&l| letter_key(l)))
}

/// Shortlex comparison: shorter words first, then lexicographic.
pub fn cmp_shortlex(a: &[Letter], b: &[Letter]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| cmp_letters(a, b))
}

/// A freely reduced word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ReducedWord(Vec<Letter>);

impl ReducedWord {
    /// Validates that `letters` is already reduced.
    pub fn new(letters: Vec<Letter>) -> Result<Self, WordError> {
        if letters.contains(&0) {
            return Err(WordError::ZeroLetter);
        }
        if let Some(i) = letters.windows(2).position(|w| w[0] == -w[1]) {
            return Err(WordError::NotReduced(i));
        }
        Ok(Self(letters))
    }

    /// Freely reduces an arbitrary letter sequence; zeros are dropped.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if l == 0 {
                continue;
            }
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Self(out)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
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

    /// Largest generator index used.
    pub fn max_generator(&self) -> u32 {
        self.0.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Reduced product `self * other`.
    pub fn concat(&self, other: &Self) -> Self {
        Self::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn power(&self, n: u32) -> Self {
        Self::reduce(std::iter::repeat_n(self.0.iter().copied(), n as usize).flatten())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&f), Some(&l)) => self.0.len() == 1 || f != -l,
            _ => true,
        }
    }

    /// Strips cancelling first/last pairs.
    pub fn cyclic_reduction(&self) -> Self {
        let mut lo = 0;
        let mut hi = self.0.len();
        while hi - lo >= 2 && self.0[lo] == -self.0[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        Self(self.0[lo..hi].to_vec())
    }

    pub fn rotated(&self, k: usize) -> Self {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut v = self.0.clone();
        let k = k % v.len();
        v.rotate_left(k);
        Self(v)
    }

    /// Start index of the lexicographically least rotation.
    fn min_rotation_start(&self) -> usize {
        let n = self.0.len();
        let key = |i: usize| letter_key(self.0[i % n]);
        let mut best = 0;
        for start in 1..n {
            for j in 0..n {
                match key(start + j).cmp(&key(best + j)) {
                    Ordering::Less => {
                        best = start;
                        break;
                    }
                    Ordering::Greater => break,
                    Ordering::Equal => {}
                }
            }
        }
        best
    }

    /// Least rotation under the letter order.
    pub fn canonical_rotation(&self) -> Self {
        self.rotated(self.min_rotation_start())
    }

    /// True if no nontrivial rotation is lexicographically smaller.
    pub fn is_min_rotation(&self) -> bool {
        let n = self.0.len();
        (1..n).all(|start| {
            let rotated = self.0[start..].iter().chain(&self.0[..start]);
            rotated
                .map(|&l| letter_key(l))
                .cmp(self.0.iter().map(|&l| letter_key(l)))
                != Ordering::Less
        })
    }

    /// Smallest period `p` with `p | n` and `w[i] = w[i + p]`.
    pub fn primitive_period(&self) -> usize {
        let n = self.0.len();
        (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.0[i] == self.0[i - p]))
            .unwrap_or(0)
    }

    pub fn is_proper_power(&self) -> bool {
        !self.0.is_empty() && self.primitive_period() < self.0.len()
    }

    /// Canonical representative of the conjugacy class together with the
    /// exponent `m` such that the class is `root^m`. `None` for the trivial class.
    pub fn conjugacy_normal_form(&self) -> Option<(PrimitiveClass, u32)> {
        let cyc = self.cyclic_reduction();
        if cyc.is_empty() {
            return None;
        }
        let canon = cyc.canonical_rotation();
        let p = canon.primitive_period();
        let m = (canon.len() / p) as u32;
        let root = ReducedWord(canon.0[..p].to_vec());
        Some((
            PrimitiveClass {
                representative: root,
            },
            m,
        ))
    }
}

impl fmt::Display for ReducedWord {
    /// Generator `i` prints as the `i`-th lowercase letter, its inverse uppercase.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            let idx = l.unsigned_abs() - 1;
            if idx < 26 {
                let base = if l > 0 { b'a' } else { b'A' };
                write!(f, "{}", (base + idx as u8) as char)?;
            } else {
                write!(f, "[{l}]")?;
            }
        }
        Ok(())
    }
}

impl FromStr for ReducedWord {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            let l = match ch {
                'a'..='z' => (ch as u8 - b'a' + 1) as Letter,
                'A'..='Z' => -((ch as u8 - b'A' + 1) as Letter),
                _ => return Err(WordError::Parse(s.to_string())),
            };
            letters.push(l);
        }
        Self::new(letters)
    }
}

impl serde::Serialize for ReducedWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for ReducedWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Iterator over all reduced words of a fixed length (optionally with a fixed
/// prefix) in the letter order.
#[derive(Debug, Clone)]
pub struct ReducedWords {
    alphabet: u32,
    fixed: usize,
    keys: Vec<u32>,
    started: bool,
    done: bool,
}

impl ReducedWords {
    pub fn new(rank: u32, len: usize) -> Self {
        Self::with_prefix(rank, len, &ReducedWord::empty())
    }

    /// Words of length `len` beginning with `prefix`. Empty when the prefix is
    /// longer than `len` or uses generators beyond `rank`.
    pub fn with_prefix(rank: u32, len: usize, prefix: &ReducedWord) -> Self {
        let alphabet = 2 * rank;
        let mut it = Self {
            alphabet,
            fixed: prefix.len(),
            keys: prefix.letters().iter().map(|&l| letter_key(l)).collect(),
            started: false,
            done: rank == 0 && len > 0 || prefix.len() > len || prefix.max_generator() > rank,
        };
        if !it.done {
            it.keys.resize(len, 0);
            it.fill_from(it.fixed);
        }
        it
    }

    fn smallest_after(&self, pos: usize, floor: u32) -> Option<u32> {
        let banned = if pos == 0 {
            None
        } else {
            Some(self.keys[pos - 1] ^ 1)
        };
        (floor..self.alphabet).find(|&k| Some(k) != banned)
    }

    fn fill_from(&mut self, pos: usize) {
        for i in pos..self.keys.len() {
            self.keys[i] = self
                .smallest_after(i, 0)
                .expect("alphabet has at least two letters");
        }
    }

    fn advance(&mut self) -> bool {
        let mut i = self.keys.len();
        while i > self.fixed {
            i -= 1;
            if let Some(k) = self.smallest_after(i, self.keys[i] + 1) {
                self.keys[i] = k;
                self.fill_from(i + 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for ReducedWords {
    type Item = ReducedWord;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(ReducedWord(
            self.keys.iter().map(|&k| letter_from_key(k)).collect(),
        ))
    }
}

/// All reduced words of length `n` in rank `g`, in letter order.
pub fn enumerate_reduced_words(g: u32, n: usize) -> ReducedWords {
    ReducedWords::new(g, n)
}

/// `2g (2g - 1)^(n - 1)` for `n >= 1`.
pub fn reduced_word_count(g: u32, n: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    let a = 2 * g as u64;
    a * (a - 1).pow(n as u32 - 1)
}

/// A primitive conjugacy class, stored by its canonical representative: the
/// least rotation of a cyclically reduced word that is not a proper power.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimitiveClass {
    representative: ReducedWord,
}

impl PrimitiveClass {
    /// Accepts only canonical representatives.
    pub fn from_canonical(w: ReducedWord) -> Option<Self> {
        is_canonical_primitive(&w).then_some(Self { representative: w })
    }

    pub fn representative(&self) -> &ReducedWord {
        &self.representative
    }

    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }
}

impl fmt::Display for PrimitiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.representative.fmt(f)
    }
}

pub fn is_canonical_primitive(w: &ReducedWord) -> bool {
    !w.is_empty() && w.is_cyclically_reduced() && w.is_min_rotation() && !w.is_proper_power()
}

/// Primitive classes of cyclically reduced length exactly `n`.
pub fn primitive_classes_of_length(g: u32, n: usize) -> impl Iterator<Item = PrimitiveClass> {
    ReducedWords::new(g, n)
        .filter(is_canonical_primitive)
        .map(|w| PrimitiveClass { representative: w })
}

/// All primitive conjugacy classes with length `<= n_max`, ordered by length
/// and then by the letter order.
pub fn enumerate_primitive_classes(g: u32, n_max: usize) -> impl Iterator<Item = PrimitiveClass> {
    (1..=n_max).flat_map(move |n| primitive_classes_of_length(g, n))
}

/// Parallel version of [`enumerate_primitive_classes`], partitioned by
/// first letter. Produces the same sequence as the serial enumeration.
pub fn enumerate_primitive_classes_par(g: u32, n_max: usize) -> Vec<PrimitiveClass> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        let blocks: Vec<Vec<PrimitiveClass>> = (0..2 * g)
            .into_par_iter()
            .map(|k| {
                let prefix = ReducedWord(vec![letter_from_key(k)]);
                ReducedWords::with_prefix(g, n, &prefix)
                    .filter(is_canonical_primitive)
                    .map(|w| PrimitiveClass { representative: w })
                    .collect()
            })
            .collect();
        out.extend(blocks.into_iter().flatten());
    }
    out
}
