//! Finite words over the binary alphabet `{a, b}` and over return-letter alphabets.
//!
//! A [`Word`] is a plain sequence of symbols. Occurrences may overlap, and
//! rational powers are handled exactly through [`num_rational::Ratio`].

use std::fmt;
use std::hash::Hash;
use std::ops::{Index, Range};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A symbol that can appear in a [`Word`].
pub trait Symbol: Copy + Eq + Ord + Hash + fmt::Debug {
    /// Printable form; single-character renderings are concatenated without separators.
    fn render(&self) -> String;
}

/// A letter of the binary alphabet. `a` is the periodic letter, `b` the primitive one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Letter {
    A = 0,
    B = 1,
}

impl Symbol for Letter {
    fn render(&self) -> String {
        match self {
            Letter::A => "a".into(),
            Letter::B => "b".into(),
        }
    }
}

impl TryFrom<char> for Letter {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c {
            'a' => Ok(Letter::A),
            'b' => Ok(Letter::B),
            other => Err(Error::InvalidInput(format!("'{other}' is not a letter of {{a, b}}"))),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word<S> {
    letters: Vec<S>,
}

pub type BinaryWord = Word<Letter>;

impl<S: Symbol> Word<S> {
    pub fn new(letters: Vec<S>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn single(s: S) -> Self {
        Word { letters: vec![s] }
    }

    /// `s` repeated `n` times.
    pub fn repeat_symbol(s: S, n: usize) -> Self {
        Word { letters: vec![s; n] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.letters
    }

    pub fn into_vec(self) -> Vec<S> {
        self.letters
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.letters.iter()
    }

    pub fn first(&self) -> Option<S> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<S> {
        self.letters.last().copied()
    }

    pub fn push(&mut self, s: S) {
        self.letters.push(s);
    }

    pub fn extend_from(&mut self, other: &Word<S>) {
        self.letters.extend_from_slice(&other.letters);
    }

    pub fn concat(&self, other: &Word<S>) -> Word<S> {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// The subword on the half-open index range.
    pub fn subword(&self, range: Range<usize>) -> Word<S> {
        Word::new(self.letters[range].to_vec())
    }

    pub fn prefix(&self, n: usize) -> Word<S> {
        self.subword(0..n.min(self.len()))
    }

    pub fn suffix(&self, n: usize) -> Word<S> {
        let n = n.min(self.len());
        self.subword(self.len() - n..self.len())
    }

    /// `u^n` for a nonnegative integer `n`.
    pub fn power(&self, n: usize) -> Word<S> {
        Word::new(self.letters.repeat(n))
    }

    /// Cyclic rotation moving the first `k` letters to the end.
    pub fn rotate(&self, k: usize) -> Word<S> {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let k = k % letters.len();
            letters.rotate_left(k);
        }
        Word { letters }
    }

    pub fn reflect(&self) -> Word<S> {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word { letters }
    }

    pub fn is_palindrome(&self) -> bool {
        is_palindrome(&self.letters)
    }

    /// Overlapping occurrence count of `needle`.
    pub fn count_occurrences(&self, needle: &Word<S>) -> Result<usize> {
        if needle.is_empty() {
            return Err(Error::InvalidInput("empty needle".into()));
        }
        Ok(self.occurrences(needle).count())
    }

    /// Start offsets of all (possibly overlapping) occurrences of `needle`.
    pub fn occurrences<'a>(&'a self, needle: &'a Word<S>) -> impl Iterator<Item = usize> + 'a {
        let n = needle.len();
        self.letters
            .windows(n.max(1))
            .enumerate()
            .filter(move |(_, w)| n > 0 && *w == needle.as_slice())
            .map(|(i, _)| i)
    }

    pub fn contains(&self, needle: &Word<S>) -> bool {
        needle.is_empty() || self.occurrences(needle).next().is_some()
    }

    /// Largest `s` such that the `s`-th power of `base` occurs in `self`, or 0 when
    /// `base` itself does not occur.
    pub fn max_power_of(&self, base: &Word<S>) -> Result<Ratio<usize>> {
        if base.is_empty() {
            return Err(Error::InvalidInput("empty base".into()));
        }
        let m = base.len();
        let h = &self.letters;
        let mut best = 0usize;
        for start in self.occurrences(base) {
            let mut len = m;
            while start + len < h.len() && h[start + len] == base.letters[len % m] {
                len += 1;
            }
            best = best.max(len);
        }
        Ok(Ratio::new(best, m))
    }
}

impl<S> Index<usize> for Word<S> {
    type Output = S;

    fn index(&self, i: usize) -> &S {
        &self.letters[i]
    }
}

impl<S: Symbol> FromIterator<S> for Word<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Word::new(iter.into_iter().collect())
    }
}

impl<'a, S> IntoIterator for &'a Word<S> {
    type Item = &'a S;
    type IntoIter = std::slice::Iter<'a, S>;

    fn into_iter(self) -> Self::IntoIter {
        self.letters.iter()
    }
}

impl<S: Symbol> fmt::Display for Word<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(Symbol::render).collect();
        if parts.iter().all(|p| p.chars().count() == 1) {
            f.write_str(&parts.concat())
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

impl<S: Symbol> Serialize for Word<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars().filter(|c| !c.is_whitespace()).map(Letter::try_from).collect::<Result<Vec<_>>>().map(Word::new)
    }
}

pub fn is_palindrome<S: PartialEq>(letters: &[S]) -> bool {
    letters.iter().eq(letters.iter().rev())
}

/// `v = u^s`: the base repeated `⌊s⌋` times followed by a proper prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPower<S> {
    base: Word<S>,
    exponent: Ratio<usize>,
}

impl<S: Symbol> RationalPower<S> {
    /// Fails unless `exponent · |base|` is an integer.
    pub fn new(base: Word<S>, exponent: Ratio<usize>) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::InvalidInput("empty base".into()));
        }
        let total = exponent * base.len();
        if !total.is_integer() {
            return Err(Error::InvalidInput(format!(
                "exponent {exponent} times |base| = {} is not an integer",
                base.len()
            )));
        }
        Ok(RationalPower { base, exponent })
    }

    pub fn base(&self) -> &Word<S> {
        &self.base
    }

    pub fn exponent(&self) -> Ratio<usize> {
        self.exponent
    }

    pub fn realize(&self) -> Word<S> {
        let total = (self.exponent * self.base.len()).to_integer();
        (0..total).map(|i| self.base[i % self.base.len()]).collect()
    }
}

/// Number of distinct factors of each length `0..=max_len` across `texts`.
///
/// Uses a generalized suffix automaton; factors never straddle two texts.
pub fn distinct_factor_counts<S: Symbol>(texts: &[&[S]], max_len: usize) -> Vec<usize> {
    let mut sam = SuffixAutomaton::new();
    for text in texts {
        let mut last = 0;
        for &c in text.iter() {
            last = sam.extend(last, c);
        }
    }
    let mut diff = vec![0i64; max_len + 2];
    for v in 1..sam.states.len() {
        let lo = sam.states[sam.states[v].link.expect("non-root state has a link")].len + 1;
        let hi = sam.states[v].len.min(max_len);
        if lo <= hi {
            diff[lo] += 1;
            diff[hi + 1] -= 1;
        }
    }
    let mut counts = Vec::with_capacity(max_len + 1);
    let mut acc = 0i64;
    for (n, d) in diff.iter().take(max_len + 1).enumerate() {
        acc += d;
        counts.push(if n == 0 { 1 } else { acc as usize });
    }
    counts
}

struct SamState<S> {
    len: usize,
    link: Option<usize>,
    next: Vec<(S, usize)>,
}

struct SuffixAutomaton<S> {
    states: Vec<SamState<S>>,
}

impl<S: Symbol> SuffixAutomaton<S> {
    fn new() -> Self {
        SuffixAutomaton { states: vec![SamState { len: 0, link: None, next: Vec::new() }] }
    }

    fn go(&self, v: usize, c: S) -> Option<usize> {
        self.states[v].next.iter().find(|(s, _)| *s == c).map(|&(_, t)| t)
    }

    fn set(&mut self, v: usize, c: S, t: usize) {
        match self.states[v].next.iter_mut().find(|(s, _)| *s == c) {
            Some(slot) => slot.1 = t,
            None => self.states[v].next.push((c, t)),
        }
    }

    fn clone_state(&mut self, q: usize, len: usize) -> usize {
        let st = SamState { len, link: self.states[q].link, next: self.states[q].next.clone() };
        self.states.push(st);
        self.states.len() - 1
    }

    fn redirect(&mut self, mut p: Option<usize>, c: S, from: usize, to: usize) {
        while let Some(v) = p {
            if self.go(v, c) != Some(from) {
                break;
            }
            self.set(v, c, to);
            p = self.states[v].link;
        }
    }

    fn extend(&mut self, last: usize, c: S) -> usize {
        if let Some(q) = self.go(last, c) {
            if self.states[last].len + 1 == self.states[q].len {
                return q;
            }
            let clone = self.clone_state(q, self.states[last].len + 1);
            self.redirect(Some(last), c, q, clone);
            self.states[q].link = Some(clone);
            return clone;
        }
        let cur = self.states.len();
        self.states.push(SamState { len: self.states[last].len + 1, link: None, next: Vec::new() });
        let mut p = Some(last);
        while let Some(v) = p {
            if self.go(v, c).is_some() {
                break;
            }
            self.set(v, c, cur);
            p = self.states[v].link;
        }
        match p {
            None => self.states[cur].link = Some(0),
            Some(v) => {
                let q = self.go(v, c).expect("transition exists");
                if self.states[v].len + 1 == self.states[q].len {
                    self.states[cur].link = Some(q);
                } else {
                    let clone = self.clone_state(q, self.states[v].len + 1);
                    self.redirect(Some(v), c, q, clone);
                    self.states[q].link = Some(clone);
                    self.states[cur].link = Some(clone);
                }
            }
        }
        cur
    }
}
