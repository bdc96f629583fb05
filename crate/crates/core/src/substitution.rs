//! Binary substitutions `a ↦ aᵖ, b ↦ ba^{k₁}⋯ba^{k_r}` in normal form.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::returnwords::{self, ReturnLetter, ReturnWord};
use crate::words::{distinct_factor_counts, BinaryWord, Letter, Word};
use crate::Budget;

/// The wire format `{"p": .., "ks": [..]}` before validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionSpec {
    pub p: u64,
    pub ks: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SubstitutionSpec", into = "SubstitutionSpec")]
pub struct Substitution {
    p: u64,
    ks: Vec<u64>,
}

impl TryFrom<SubstitutionSpec> for Substitution {
    type Error = Error;

    fn try_from(spec: SubstitutionSpec) -> Result<Self> {
        Substitution::new(spec.p, spec.ks)
    }
}

impl From<Substitution> for SubstitutionSpec {
    fn from(s: Substitution) -> Self {
        SubstitutionSpec { p: s.p, ks: s.ks }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Classification {
    /// `r = 1`: `b ↦ ba^{k₁}`, the trivial almost-primitive case.
    TrivialAP,
    /// `p = 1` and `k_r = 0`: the subshift is minimal.
    Minimal,
    AlmostPrimitive { type0: bool },
    /// All `kᵢ = 0`: `b ↦ bʳ`.
    Degenerate,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::TrivialAP => f.write_str("trivial almost primitive (r = 1)"),
            Classification::Minimal => f.write_str("minimal (p = 1, k_r = 0)"),
            Classification::AlmostPrimitive { type0: true } => f.write_str("almost primitive, type 0"),
            Classification::AlmostPrimitive { type0: false } => f.write_str("almost primitive"),
            Classification::Degenerate => f.write_str("degenerate (b -> b^r)"),
        }
    }
}

/// Classifies raw parameters, including the degenerate ones that [`Substitution::new`] rejects.
pub fn classify_params(p: u64, ks: &[u64]) -> Classification {
    let r = ks.len();
    let sum: u64 = ks.iter().sum();
    let k_r = ks.last().copied().unwrap_or(0);
    if sum == 0 {
        Classification::Degenerate
    } else if r == 1 {
        Classification::TrivialAP
    } else if p == 1 && k_r == 0 {
        Classification::Minimal
    } else {
        let type0 = k_r == 0 && ks[..r - 1].contains(&0);
        Classification::AlmostPrimitive { type0 }
    }
}

/// `M = [[p, q], [0, r]]` with `M_{xy} = |ϱ(y)|_x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubstitutionMatrix {
    pub entries: [[u128; 2]; 2],
}

impl SubstitutionMatrix {
    pub fn mul(&self, other: &SubstitutionMatrix) -> Option<SubstitutionMatrix> {
        let mut out = [[0u128; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = 0u128;
                for k in 0..2 {
                    acc = acc.checked_add(self.entries[i][k].checked_mul(other.entries[k][j])?)?;
                }
                *cell = acc;
            }
        }
        Some(SubstitutionMatrix { entries: out })
    }

    /// `Mⁿ`, or `None` on `u128` overflow.
    pub fn pow(&self, n: u32) -> Option<SubstitutionMatrix> {
        let mut acc = SubstitutionMatrix { entries: [[1, 0], [0, 1]] };
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Some(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ComplexityClass {
    #[serde(rename = "Θ(n)")]
    Linear,
    #[serde(rename = "Θ(n log log n)")]
    NLogLogN,
    #[serde(rename = "Θ(n log n)")]
    NLogN,
    #[serde(rename = "Θ(n²)")]
    Quadratic,
    #[serde(rename = "bounded-or-linear")]
    BoundedOrLinear,
}

impl fmt::Display for ComplexityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComplexityClass::Linear => "Θ(n)",
            ComplexityClass::NLogLogN => "Θ(n log log n)",
            ComplexityClass::NLogN => "Θ(n log n)",
            ComplexityClass::Quadratic => "Θ(n²)",
            ComplexityClass::BoundedOrLinear => "bounded-or-linear",
        })
    }
}

/// Finite-depth cylinder frequency `|ϱⁿ(b)|_u / |ϱⁿ(b)|_b` and its successor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureSample {
    pub depth: u32,
    pub value: Ratio<u128>,
    pub next: Ratio<u128>,
}

/// Length-`n` legal words together with the hosts they were read from.
#[derive(Clone, Debug)]
pub struct LanguageHosts {
    /// Level `m` of the Toeplitz blocks used; `rᵐ ≥ n`.
    pub depth: u32,
    /// Return letters are capped at `n`; larger letters (and `∞`) look the same in length-`n` windows.
    pub cap: u64,
    pub hosts: Vec<BinaryWord>,
}

impl Substitution {
    /// Builds `a ↦ aᵖ, b ↦ ba^{k₁}⋯ba^{k_r}`. Rejects `p = 0`, empty `ks` and the degenerate `b ↦ bʳ`.
    pub fn new(p: u64, ks: Vec<u64>) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput("p must be positive".into()));
        }
        if ks.is_empty() {
            return Err(Error::InvalidInput("ks must contain at least one exponent".into()));
        }
        if classify_params(p, &ks) == Classification::Degenerate {
            let what = if ks.len() == 1 {
                "r = 1 with k_1 = 0 gives a ↦ a^p, b ↦ b".to_string()
            } else {
                format!("all k_i = 0 gives b ↦ b^{}", ks.len())
            };
            return Err(Error::Degenerate(what));
        }
        Ok(Substitution { p, ks })
    }

    /// Normal form of `a ↦ aᵖ, b ↦ image_of_b`: the leading `a`-run of the image moves to the end.
    pub fn normalize(p: u64, image_of_b: &BinaryWord) -> Result<Self> {
        let lead = image_of_b.iter().take_while(|&&l| l == Letter::A).count();
        if lead == image_of_b.len() {
            return Err(Error::Degenerate(format!("image of b \"{image_of_b}\" contains no b")));
        }
        let rotated = image_of_b.rotate(lead);
        let mut ks = Vec::new();
        for &l in rotated.iter() {
            match l {
                Letter::B => ks.push(0),
                Letter::A => *ks.last_mut().expect("rotated image starts with b") += 1,
            }
        }
        Substitution::new(p, ks)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ks(&self) -> &[u64] {
        &self.ks
    }

    pub fn r(&self) -> usize {
        self.ks.len()
    }

    /// `kᵢ` with 1-based `i`.
    pub fn k(&self, i: usize) -> u64 {
        self.ks[i - 1]
    }

    pub fn k_r(&self) -> u64 {
        *self.ks.last().expect("ks is nonempty")
    }

    /// `max{k₁, …, k_{r−1}}`, or `None` when `r = 1`.
    pub fn k_max(&self) -> Option<u64> {
        self.ks[..self.r() - 1].iter().copied().max()
    }

    pub fn k_min(&self) -> Option<u64> {
        self.ks[..self.r() - 1].iter().copied().min()
    }

    /// `q = Σkᵢ`, the number of `a` in `ϱ(b)`.
    pub fn q(&self) -> u64 {
        self.ks.iter().sum()
    }

    pub fn classify(&self) -> Classification {
        classify_params(self.p, &self.ks)
    }

    pub fn is_almost_primitive(&self) -> bool {
        matches!(self.classify(), Classification::AlmostPrimitive { .. })
    }

    pub fn is_type0(&self) -> bool {
        matches!(self.classify(), Classification::AlmostPrimitive { type0: true })
    }

    pub(crate) fn require_almost_primitive(&self, operation: &str) -> Result<()> {
        if self.is_almost_primitive() {
            Ok(())
        } else {
            Err(Error::NotAlmostPrimitive { kind: self.classify().to_string(), operation: operation.into() })
        }
    }

    pub fn matrix(&self) -> SubstitutionMatrix {
        SubstitutionMatrix { entries: [[self.p as u128, self.q() as u128], [0, self.r() as u128]] }
    }

    pub fn image(&self, letter: Letter) -> BinaryWord {
        match letter {
            Letter::A => Word::repeat_symbol(Letter::A, self.p as usize),
            Letter::B => {
                let mut w = Word::empty();
                for &k in &self.ks {
                    w.push(Letter::B);
                    for _ in 0..k {
                        w.push(Letter::A);
                    }
                }
                w
            }
        }
    }

    /// Applies `ϱ` once, letter by letter.
    pub fn apply(&self, w: &BinaryWord, budget: Budget) -> Result<BinaryWord> {
        let a_count = w.iter().filter(|&&l| l == Letter::A).count() as u128;
        let b_count = w.len() as u128 - a_count;
        let b_len = self.r() as u128 + self.q() as u128;
        budget.check(a_count * self.p as u128 + b_count * b_len)?;
        let (ia, ib) = (self.image(Letter::A), self.image(Letter::B));
        let mut out = Vec::new();
        for &l in w.iter() {
            out.extend_from_slice(if l == Letter::A { ia.as_slice() } else { ib.as_slice() });
        }
        Ok(Word::new(out))
    }

    /// `|ϱⁿ(letter)|`, saturating at `u128::MAX`.
    pub fn length(&self, letter: Letter, n: u32) -> u128 {
        match letter {
            Letter::A => (self.p as u128).checked_pow(n).unwrap_or(u128::MAX),
            Letter::B => {
                let (p, q, r) = (self.p as u128, self.q() as u128, self.r() as u128);
                let mut len = 1u128;
                let mut a_len = 1u128;
                for _ in 0..n {
                    len = match r.checked_mul(len).and_then(|x| q.checked_mul(a_len).and_then(|y| x.checked_add(y))) {
                        Some(v) => v,
                        None => return u128::MAX,
                    };
                    a_len = a_len.saturating_mul(p);
                }
                len
            }
        }
    }

    /// `ϱⁿ(letter)`, refusing to build words longer than the budget.
    pub fn iterate(&self, letter: Letter, n: u32, budget: Budget) -> Result<BinaryWord> {
        budget.check(self.length(letter, n))?;
        let mut w = Word::single(letter);
        for _ in 0..n {
            w = self.apply(&w, budget)?;
        }
        Ok(w)
    }

    pub fn complexity_class(&self) -> ComplexityClass {
        let (p, r) = (self.p as u128, self.r() as u128);
        match self.classify() {
            Classification::TrivialAP | Classification::Degenerate => ComplexityClass::BoundedOrLinear,
            Classification::Minimal => ComplexityClass::Linear,
            Classification::AlmostPrimitive { .. } => {
                if r < p {
                    ComplexityClass::Linear
                } else if r == p {
                    ComplexityClass::NLogLogN
                } else if p > 1 {
                    ComplexityClass::NLogN
                } else {
                    ComplexityClass::Quadratic
                }
            }
        }
    }

    /// Toeplitz hosts whose length-`n` windows are exactly the legal words of length `n`.
    ///
    /// Every length-`n` window of a sequence touches at most `n ≤ rᵐ` return words, so it sits
    /// inside `τ(β⁽ᵐ⁾ k′ β⁽ᵐ⁾)` for the letter `k′` on the level-`m` lattice.
    pub fn language_hosts(&self, n: usize, budget: Budget) -> Result<LanguageHosts> {
        self.require_almost_primitive("legal_words")?;
        if n == 0 {
            return Err(Error::InvalidInput("word length must be positive".into()));
        }
        let r = self.r() as u128;
        let mut m = 0u32;
        while r.pow(m) < n as u128 {
            m += 1;
        }
        let m = m.max(1);
        let cap = n as u64;
        let beta = returnwords::beta(self, m, budget)?;
        let capped: ReturnWord = beta.iter().map(|&k| cap_letter(k, cap)).collect();
        let mut hosts = Vec::new();
        for k in self.lattice_letters_capped(m, cap)? {
            let y = capped.concat(&Word::single(k)).concat(&capped);
            hosts.push(returnwords::tau_expand(&y, returnwords::Side::Right).word);
        }
        Ok(LanguageHosts { depth: m, cap, hosts })
    }

    /// Values `min(fˡ(kᵢ), cap)` for `l ≥ m`, always including `cap` itself.
    fn lattice_letters_capped(&self, m: u32, cap: u64) -> Result<BTreeSet<ReturnLetter>> {
        let mut out = BTreeSet::new();
        out.insert(ReturnLetter::finite(cap));
        for &k in &self.ks[..self.r() - 1] {
            let mut v = returnwords::f_apply_capped(self, k, m, cap);
            while v < cap {
                if !out.insert(ReturnLetter::finite(v)) {
                    break;
                }
                let next = returnwords::f_apply_capped(self, v, 1, cap);
                if next == v {
                    break;
                }
                v = next;
            }
        }
        Ok(out)
    }

    /// `ℒ_ϱ ∩ {a,b}ⁿ`.
    pub fn legal_words(&self, n: usize, budget: Budget) -> Result<BTreeSet<BinaryWord>> {
        let hosts = self.language_hosts(n, budget)?;
        let mut out = BTreeSet::new();
        for h in &hosts.hosts {
            for w in h.as_slice().windows(n) {
                out.insert(Word::new(w.to_vec()));
            }
        }
        Ok(out)
    }

    pub fn is_legal(&self, u: &BinaryWord, budget: Budget) -> Result<bool> {
        if u.is_empty() {
            return Ok(true);
        }
        let hosts = self.language_hosts(u.len(), budget)?;
        Ok(hosts.hosts.iter().any(|h| h.contains(u)))
    }

    /// Iterative enumeration: subwords of `ϱᵐ(b)` for growing `m`, stopping after two consecutive
    /// agreements once `|ϱᵐ(b)| ≥ 4n`, plus `aⁿ`. Returns the set and the depth `m` reached.
    ///
    /// Only a heuristic: long `a`-runs can first appear far deeper than the stopping point.
    pub fn legal_words_by_iteration(&self, n: usize, budget: Budget) -> Result<(BTreeSet<BinaryWord>, u32)> {
        self.require_almost_primitive("legal_words")?;
        if n == 0 {
            return Err(Error::InvalidInput("word length must be positive".into()));
        }
        let windows = |w: &BinaryWord| -> BTreeSet<BinaryWord> {
            let mut set: BTreeSet<BinaryWord> = w.as_slice().windows(n).map(|s| Word::new(s.to_vec())).collect();
            set.insert(Word::repeat_symbol(Letter::A, n));
            set
        };
        let mut w = Word::single(Letter::B);
        let mut prev = windows(&w);
        let mut agreements = 0;
        let mut m = 0u32;
        loop {
            w = self.apply(&w, budget)?;
            m += 1;
            let cur = windows(&w);
            if cur == prev {
                agreements += 1;
            } else {
                agreements = 0;
            }
            if agreements >= 2 && w.len() >= 4 * n {
                return Ok((cur, m));
            }
            prev = cur;
        }
    }

    /// `c(n) = #(ℒ_ϱ ∩ {a,b}ⁿ)`.
    pub fn complexity(&self, n: usize, budget: Budget) -> Result<usize> {
        Ok(self.complexity_profile(n, budget)?[n])
    }

    /// `c(0..=n_max)` from one host set; `c(0) = 1` counts the empty word.
    pub fn complexity_profile(&self, n_max: usize, budget: Budget) -> Result<Vec<usize>> {
        let hosts = self.language_hosts(n_max, budget)?;
        let slices: Vec<&[Letter]> = hosts.hosts.iter().map(|h| h.as_slice()).collect();
        Ok(distinct_factor_counts(&slices, n_max))
    }

    /// `|ϱⁿ(b)|_u / |ϱⁿ(b)|_b` at depths `n` and `n + 1`.
    pub fn measure_cylinder(&self, u: &BinaryWord, n: u32, budget: Budget) -> Result<MeasureSample> {
        if u.is_empty() {
            return Err(Error::InvalidInput("empty cylinder word".into()));
        }
        if !self.is_legal(u, budget)? {
            return Err(Error::IllegalWord(u.to_string()));
        }
        let w = self.iterate(Letter::B, n, budget)?;
        let w_next = self.apply(&w, budget)?;
        let quotient = |w: &BinaryWord| -> Result<Ratio<u128>> {
            let hits = w.count_occurrences(u)? as u128;
            let bs = w.iter().filter(|&&l| l == Letter::B).count() as u128;
            Ok(Ratio::new(hits, bs))
        };
        Ok(MeasureSample { depth: n, value: quotient(&w)?, next: quotient(&w_next)? })
    }

    /// `|ϱⁿ(b)|_b / rⁿ`, read off the matrix power.
    pub fn pf_prefactor(&self, n: u32) -> Result<Ratio<u128>> {
        let mn = self.matrix().pow(n).ok_or(Error::BudgetExceeded { projected: u128::MAX, budget: usize::MAX })?;
        let denom = (self.r() as u128).pow(n);
        Ok(Ratio::new(mn.entries[1][1], denom))
    }

    pub fn eventually_periodic_generators(&self) -> Result<EpGenerators<'_>> {
        self.require_almost_primitive("eventually_periodic_generators")?;
        Ok(EpGenerators { s: self })
    }
}

fn cap_letter(k: ReturnLetter, cap: u64) -> ReturnLetter {
    match k.value() {
        Some(v) if v < cap => k,
        _ => ReturnLetter::finite(cap),
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a -> a^{}, b -> {}", self.p, self.image(Letter::B))
    }
}

/// Window producers for the eventually periodic orbits: `a^ℤ`, the left-eventually periodic
/// `a^∞.ϱ^∞(b)` and the right-eventually periodic `ω⁻.ba^∞`.
pub struct EpGenerators<'a> {
    s: &'a Substitution,
}

impl EpGenerators<'_> {
    pub fn periodic_window(&self, len: usize) -> BinaryWord {
        Word::repeat_symbol(Letter::A, len)
    }

    /// Prefix of `ϱ^∞(b)`, the right half of `a^∞.ϱ^∞(b)`.
    pub fn left_ep_prefix(&self, len: usize, budget: Budget) -> Result<BinaryWord> {
        budget.check(len as u128)?;
        let mut w = Word::single(Letter::B);
        while w.len() < len {
            w = self.s.apply(&w, budget)?;
        }
        Ok(w.prefix(len))
    }

    /// The last `len` letters of `ω⁻` in `ω⁻.ba^∞`, where `ω⁻` is the left-infinite limit of
    /// `τ(β⁽ⁿ⁾)`, i.e. `ϱⁿ(b)` with its trailing block `ba^{fⁿ(0)}` removed.
    pub fn right_ep_suffix(&self, len: usize, budget: Budget) -> Result<BinaryWord> {
        budget.check(len as u128)?;
        let mut n = 1u32;
        loop {
            let beta = returnwords::beta(self.s, n, budget)?;
            let w = returnwords::tau_expand(&beta, returnwords::Side::Right).word;
            if w.len() >= len {
                return Ok(w.suffix(len));
            }
            n += 1;
        }
    }

    /// The right generator is obtained by suffix analysis rather than a closed form.
    pub fn right_is_derived(&self) -> bool {
        true
    }
}
