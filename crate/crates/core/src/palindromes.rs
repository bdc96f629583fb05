//! Palindromes in return-word sequences and their binary images, and the strong-palindrome
//! regime of a substitution.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::returnwords::{self, Address, OdometerPrefix, ReturnLetter, ReturnWord, ToeplitzWindow};
use crate::substitution::Substitution;
use crate::words::{is_palindrome, BinaryWord, Letter, Symbol, Word};
use crate::Budget;

/// An element of `ℤ/2`, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub fn from_int(v: i64) -> Self {
        HalfInt(2 * v)
    }

    pub fn from_twice(t: i64) -> Self {
        HalfInt(t)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn floor(self) -> i64 {
        self.0.div_euclid(2)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("'{s}' is not an integer or half-integer"));
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "2" => Ok(HalfInt(num)),
                "1" => Ok(HalfInt::from_int(num)),
                _ => Err(bad()),
            };
        }
        if let Some(int) = s.strip_suffix(".5") {
            let v: i64 = int.parse().map_err(|_| bad())?;
            let neg = int.starts_with('-');
            return Ok(HalfInt(2 * v + if neg { -1 } else { 1 }));
        }
        s.strip_suffix(".0").unwrap_or(s).parse().map(HalfInt::from_int).map_err(|_| bad())
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.to_f64())
    }
}

/// Parses a plain decimal such as `"1.5"` or `"4"` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("'{s}' is not a decimal number"));
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(num, den);
    Ok(if neg { -v } else { v })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "tag")]
pub enum PalindromeRegime {
    /// `k₁⋯k_{r−1}` is not a palindrome: `a^ℤ` is the only strong palindrome.
    OnlyTrivial,
    /// Strongly palindromic sequences exist for every `B > 1`.
    AllB,
    /// `r` even and `p = 1`: exactly the `B < B′ = r^{2/k_r}` admit strong palindromes.
    CriticalB {
        #[serde(serialize_with = "serialize_ratio")]
        exponent: Ratio<u64>,
        b_prime: f64,
    },
    /// `r` even, `p > 1`, not type 0: no strong palindromes besides `a^ℤ`.
    NoneStrong,
}

fn serialize_ratio<S: Serializer>(r: &Ratio<u64>, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

pub fn prefix_is_palindrome(s: &Substitution) -> bool {
    is_palindrome(&s.ks()[..s.r() - 1])
}

pub fn regime(s: &Substitution) -> Result<PalindromeRegime> {
    s.require_almost_primitive("regime")?;
    let r = s.r();
    Ok(if !prefix_is_palindrome(s) {
        PalindromeRegime::OnlyTrivial
    } else if r % 2 == 1 || s.is_type0() {
        PalindromeRegime::AllB
    } else if s.p() == 1 {
        let exponent = Ratio::new(2, s.k_r());
        let b_prime = (r as f64).powf(2.0 / s.k_r() as f64);
        PalindromeRegime::CriticalB { exponent, b_prime }
    } else {
        PalindromeRegime::NoneStrong
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `c ∈ U_n`.
    Lattice,
    /// `c ∈ U_n + rⁿ/2`.
    HalfLattice,
    /// No approximant is symmetric in `c`.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReflectionLevel {
    pub n_c: usize,
    pub branch: Branch,
    /// `n_c` equals the prefix depth, so the true level may be larger.
    pub capped: bool,
}

fn branch_at(prefix: &OdometerPrefix, c: HalfInt, m: usize) -> Branch {
    let q2 = 2 * prefix.q(m);
    let period = prefix.period(m);
    if (c.twice() - q2).rem_euclid(2 * period) == 0 {
        Branch::Lattice
    } else if (c.twice() - q2 - period).rem_euclid(2 * period) == 0 {
        Branch::HalfLattice
    } else {
        Branch::None
    }
}

/// Largest `m ≤ depth` with `x⁽ᵐ⁾` mirror symmetric about `c`, i.e. `c ∈ U_m ∪ (U_m + rᵐ/2)`.
pub fn reflection_level(s: &Substitution, prefix: &OdometerPrefix, c: HalfInt) -> ReflectionLevel {
    if !prefix_is_palindrome(s) {
        return ReflectionLevel { n_c: 0, branch: Branch::None, capped: false };
    }
    let mut level = ReflectionLevel { n_c: 0, branch: Branch::None, capped: prefix.depth() == 0 };
    for m in 1..=prefix.depth() {
        match branch_at(prefix, c, m) {
            Branch::None => return level,
            b => level = ReflectionLevel { n_c: m, branch: b, capped: m == prefix.depth() },
        }
    }
    level
}

/// A palindrome occurrence `(P, ℓ, c)`; `ℓ = |P|` and `c` is the center position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PalindromeDatum<S> {
    pub word: Word<S>,
    pub center: HalfInt,
    /// `false` when extension stopped at an undetermined cell, so the true palindrome may be longer.
    pub bounded: bool,
}

impl<S: Symbol> PalindromeDatum<S> {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    /// Position of the first letter.
    pub fn start(&self) -> i64 {
        (self.center.twice() - self.word.len() as i64 + 1) / 2
    }
}

/// Maximal palindrome about `c` in a sequence given cell by cell; `None` cells are `?`.
fn maximal_palindrome_with<F>(cell: F, c: HalfInt, limit: usize) -> Result<PalindromeDatum<ReturnLetter>>
where
    F: Fn(i64) -> Result<Option<ReturnLetter>>,
{
    let (mut lo, mut hi) = if c.is_integer() {
        let j = c.floor();
        if cell(j)?.is_none() {
            return Err(Error::Undetermined { position: j });
        }
        (j, j)
    } else {
        (c.floor() + 1, c.floor())
    };
    let bounded = loop {
        if ((hi - lo + 1) as usize) >= limit {
            return Err(Error::BudgetExceeded { projected: (hi - lo + 3) as u128, budget: limit });
        }
        match (cell(lo - 1)?, cell(hi + 1)?) {
            (Some(x), Some(y)) if x == y => {
                lo -= 1;
                hi += 1;
            }
            (Some(_), Some(_)) => break true,
            _ => break false,
        }
    };
    let word = (lo..=hi).map(|j| cell(j).map(|c| c.expect("cells inside the palindrome are determined"))).collect::<Result<Vec<_>>>()?;
    Ok(PalindromeDatum { word: Word::new(word), center: c, bounded })
}

/// The maximal palindrome centered at `c` in the (approximant of the) sequence at `address`.
///
/// A half-integer center with unequal neighbours gives the empty palindrome.
pub fn maximal_palindrome_at(s: &Substitution, address: &Address, c: HalfInt, budget: Budget) -> Result<PalindromeDatum<ReturnLetter>> {
    if !prefix_is_palindrome(s) {
        return Err(Error::RegimeMismatch("maximal palindromes need a palindromic k_1⋯k_{r-1}".into()));
    }
    maximal_palindrome_with(|j| address.cell(s, j), c, budget.0)
}

fn tau_len(k: ReturnLetter, position: i64) -> Result<i64> {
    match k.value() {
        Some(v) => i64::try_from(v).ok().and_then(|v| v.checked_add(1)).ok_or(Error::LetterOverflow),
        None => Err(Error::IllegalWord(format!("cell {position} is ∞; τ needs an ∞-free sequence"))),
    }
}

/// `τ(P, ℓ, c) = (τ(P)b, |τ(P)b|, c′)` for a palindrome in the sequence at `address`.
///
/// `c′` comes from the center formulas and is cross-checked against the binary location of
/// `τ(P)`.
pub fn center_map(s: &Substitution, address: &Address, datum: &PalindromeDatum<ReturnLetter>) -> Result<PalindromeDatum<Letter>> {
    let known = |j: i64| -> Result<ReturnLetter> { address.cell(s, j)?.ok_or(Error::Undetermined { position: j }) };
    // |τ(x_[0,j−1])| for j ≥ 0 and −|τ(x_[j,−1])| for j < 0.
    let offset = |j: i64| -> Result<i64> {
        let mut total = 0i64;
        for i in j.min(0)..j.max(0) {
            total = total.checked_add(tau_len(known(i)?, i)?).ok_or(Error::LetterOverflow)?;
        }
        Ok(if j < 0 { -total } else { total })
    };
    map_center_with(offset, datum)
}

fn map_center_with<F>(offset: F, datum: &PalindromeDatum<ReturnLetter>) -> Result<PalindromeDatum<Letter>>
where
    F: Fn(i64) -> Result<i64>,
{
    let c = datum.center;
    if c.twice() <= 0 {
        return Err(Error::InvalidInput(format!("center {c} must be positive")));
    }
    let twice_c_prime = if c.is_integer() {
        let j = c.floor();
        offset(j)? + offset(j + 1)?
    } else {
        2 * offset(c.floor() + 1)?
    };
    let tau = returnwords::tau_expand(&datum.word, returnwords::Side::Right);
    if tau.truncated {
        return Err(Error::IllegalWord("palindrome contains ∞".into()));
    }
    let mut word = tau.word;
    word.push(Letter::B);
    let m_prime = offset(datum.start())?;
    let located = 2 * m_prime + word.len() as i64 - 1;
    if located != twice_c_prime {
        return Err(Error::MalformedWindow(format!(
            "center formula gives {} but τ(P) sits at {}",
            HalfInt(twice_c_prime),
            HalfInt(located)
        )));
    }
    Ok(PalindromeDatum { word, center: HalfInt(twice_c_prime), bounded: datum.bounded })
}

/// Length of the maximal binary palindrome centred at `c′`, read directly from `τ(x)`.
pub fn binary_palindrome_length(s: &Substitution, address: &Address, c: HalfInt, max_len: usize, budget: Budget) -> Result<usize> {
    let half = (max_len as i64) / 2 + 1;
    let lo = c.floor() - half;
    let hi = c.floor() + half + 1;
    let w = address.binary_window(s, lo, hi, budget)?;
    let at = |j: i64| w[(j - lo) as usize];
    let (mut l, mut h) = if c.is_integer() { (c.floor(), c.floor()) } else { (c.floor() + 1, c.floor()) };
    while l > lo && h < hi && at(l - 1) == at(h + 1) && ((h - l + 3) as usize) <= max_len {
        l -= 1;
        h += 1;
    }
    Ok((h - l + 1) as usize)
}

/// One datum of a strongly palindromic construction: the return-word palindrome and its binary image.
#[derive(Clone, Debug, PartialEq)]
pub struct StrongDatum {
    pub center: HalfInt,
    pub length: usize,
    pub reflection_level: usize,
    pub binary: PalindromeDatum<Letter>,
    /// `ln(B^{c′}/ℓ′)`.
    pub log_ratio: f64,
}

impl StrongDatum {
    pub fn ratio(&self) -> f64 {
        self.log_ratio.exp()
    }
}

/// Constants of the even-`r`, `p = 1` construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalInfo {
    pub b_prime: f64,
    /// Measured `C′ = 2·max_{n≤8} |ϱⁿ(b)|/rⁿ`.
    pub c_prime: f64,
    /// `ln A` for the threshold `A > exp(2C′ ln B · r ln r / (k_r ln(B′/B)))`.
    pub log_a: f64,
}

#[derive(Clone, Debug)]
pub struct StrongPrefix {
    pub prefix: OdometerPrefix,
    pub data: Vec<StrongDatum>,
    pub critical: Option<CriticalInfo>,
    pub nodes: usize,
}

#[derive(Clone, Debug)]
pub struct StrongPrefixOptions {
    pub j_max: usize,
    /// When set, datum `j` must also satisfy `B^{c′_j}/ℓ′_j ≤ κ/j`.
    pub ratio_cap: Option<f64>,
    /// Deepest digit prefix tried; `None` picks the largest depth with `r^depth ≤ 4096`.
    pub max_depth: Option<usize>,
    pub node_limit: usize,
    /// Shuffles the non-lifting digits; `None` keeps them ascending.
    pub seed: Option<u64>,
}

impl Default for StrongPrefixOptions {
    fn default() -> Self {
        StrongPrefixOptions { j_max: 3, ratio_cap: None, max_depth: None, node_limit: 20_000, seed: None }
    }
}

fn critical_info(s: &Substitution, b: f64, b_prime: f64) -> CriticalInfo {
    let r = s.r() as f64;
    let c_prime = 2.0 * (0..=8u32).map(|n| s.length(Letter::B, n) as f64 / r.powi(n as i32)).fold(0.0, f64::max);
    let log_a = 2.0 * c_prime * b.ln() * r * r.ln() / (s.k_r() as f64 * (b_prime / b).ln());
    CriticalInfo { b_prime, c_prime, log_a }
}

/// Searches for a digit prefix whose sequence carries `j_max` palindromes with increasing binary
/// centers `c′_j` and strictly decreasing `B^{c′_j}/ℓ′_j`, each confirmed on the binary sequence.
///
/// Digits that keep the nearest unfinished palindrome center symmetric at the next level are
/// tried first.
pub fn construct_strong_prefix(s: &Substitution, b: &BigRational, opts: &StrongPrefixOptions) -> Result<StrongPrefix> {
    if *b <= BigRational::one() {
        return Err(Error::InvalidInput("B must exceed 1".into()));
    }
    if opts.j_max == 0 {
        return Err(Error::InvalidInput("j_max must be positive".into()));
    }
    let b_f64 = b.to_f64().ok_or_else(|| Error::InvalidInput("B is out of range".into()))?;
    let critical = match regime(s)? {
        PalindromeRegime::OnlyTrivial | PalindromeRegime::NoneStrong => return Err(Error::RegimeForbidden { b_prime: None }),
        PalindromeRegime::AllB => None,
        PalindromeRegime::CriticalB { b_prime, .. } => {
            let k_r = i32::try_from(s.k_r()).map_err(|_| Error::InvalidInput("k_r too large".into()))?;
            let r_sq = BigRational::from_integer(BigInt::from(s.r() * s.r()));
            if num_traits::pow::Pow::pow(b, k_r) >= r_sq {
                return Err(Error::RegimeForbidden { b_prime: Some(b_prime) });
            }
            Some(critical_info(s, b_f64, b_prime))
        }
    };
    let r = s.r();
    let max_depth = opts.max_depth.unwrap_or_else(|| {
        let mut d = 1;
        while (r as u64).pow(d as u32 + 1) <= 4096 {
            d += 1;
        }
        d
    });
    let mut search = Search {
        s,
        log_b: b_f64.ln(),
        opts,
        max_depth,
        nodes: 0,
        rng: opts.seed.map(ChaCha8Rng::seed_from_u64),
    };
    let root = OdometerPrefix::new(r, Vec::new())?;
    let found = search.candidates(&root)?;
    match search.dfs(root, found)? {
        Some((prefix, data)) => Ok(StrongPrefix { prefix, data, critical, nodes: search.nodes }),
        None => Err(Error::NotFound { what: format!("{} strongly palindromic data", opts.j_max), depth: max_depth as u32 }),
    }
}

/// `|τ(x_[0,j−1])|` (or its negative to the left of 0) for each window cell `j`, where every cell
/// in between is determined and finite.
fn tau_offsets(window: &ToeplitzWindow) -> Vec<Option<i64>> {
    let (lo, hi) = window.range();
    let len = |j: i64| window.get(j).flatten().and_then(|k| k.value()).and_then(|v| i64::try_from(v).ok()).map(|v| v + 1);
    let mut out = vec![None; (hi - lo + 1) as usize];
    let mut acc = Some(0i64);
    for j in 0.max(lo)..=hi {
        out[(j - lo) as usize] = acc;
        acc = acc.zip(len(j)).and_then(|(a, l)| a.checked_add(l));
    }
    let mut acc = Some(0i64);
    for j in (lo..0.min(hi + 1)).rev() {
        acc = acc.zip(len(j)).and_then(|(a, l)| a.checked_add(l));
        out[(j - lo) as usize] = acc.map(|a| -a);
    }
    out
}

struct Search<'a> {
    s: &'a Substitution,
    log_b: f64,
    opts: &'a StrongPrefixOptions,
    max_depth: usize,
    nodes: usize,
    rng: Option<ChaCha8Rng>,
}

struct Candidate {
    center: HalfInt,
    length: usize,
    level: usize,
    binary: PalindromeDatum<Letter>,
    log_ratio: f64,
}

impl Search<'_> {
    fn dfs(&mut self, prefix: OdometerPrefix, found: (Vec<Candidate>, Option<HalfInt>)) -> Result<Option<(OdometerPrefix, Vec<StrongDatum>)>> {
        if self.nodes >= self.opts.node_limit {
            return Ok(None);
        }
        self.nodes += 1;
        let (candidates, open) = found;
        if let Some(chain) = self.chain(&candidates) {
            let data: Vec<StrongDatum> = chain
                .into_iter()
                .map(|i| {
                    let c = &candidates[i];
                    StrongDatum { center: c.center, length: c.length, reflection_level: c.level, binary: c.binary.clone(), log_ratio: c.log_ratio }
                })
                .collect();
            if self.verify(&prefix, &data)? {
                return Ok(Some((prefix, data)));
            }
        }
        if prefix.depth() >= self.max_depth {
            return Ok(None);
        }
        drop(candidates);
        // Children that already carry longer admissible chains go first; the digit order breaks ties.
        let mut children = Vec::with_capacity(self.s.r());
        for d in self.digit_order(&prefix, open) {
            let mut digits = prefix.digits().to_vec();
            digits.push(d);
            let child = OdometerPrefix::new(self.s.r(), digits)?;
            let found = self.candidates(&child)?;
            let progress = self.chain_progress(&found.0);
            children.push((progress, child, found));
        }
        children.sort_by_key(|c| std::cmp::Reverse(c.0));
        for (_, child, found) in children {
            if let Some(hit) = self.dfs(child, found)? {
                return Ok(Some(hit));
            }
        }
        Ok(None)
    }

    /// Lifting digits for the open center first, then the others.
    fn digit_order(&mut self, prefix: &OdometerPrefix, open: Option<HalfInt>) -> Vec<usize> {
        let r = self.s.r();
        let mut lifting = Vec::new();
        if let Some(c) = open {
            for d in 0..r {
                let mut digits = prefix.digits().to_vec();
                digits.push(d);
                let next = OdometerPrefix::new(r, digits).expect("digit below radix");
                if reflection_level(self.s, &next, c).n_c == next.depth() {
                    lifting.push(d);
                }
            }
        }
        let mut rest: Vec<usize> = (0..r).filter(|d| !lifting.contains(d)).collect();
        if let Some(rng) = self.rng.as_mut() {
            rest.shuffle(rng);
        }
        lifting.extend(rest);
        lifting
    }

    /// Palindromes with centers in `(0, 2r^depth]`, and the smallest center whose palindrome is
    /// still open.
    fn candidates(&self, prefix: &OdometerPrefix) -> Result<(Vec<Candidate>, Option<HalfInt>)> {
        let s = self.s;
        let span = prefix.period(prefix.depth()).max(s.r() as i64);
        let window = returnwords::approximant_window(s, prefix, -span - 1, 2 * span + 1, Budget::DEFAULT)?;
        let cell = |j: i64| -> Result<Option<ReturnLetter>> { Ok(window.get(j).flatten()) };
        let inside = |j: i64| window.get(j).is_some();
        let offsets = tau_offsets(&window);
        let offset = |j: i64| -> Result<i64> {
            let (lo, _) = window.range();
            offsets.get((j - lo) as usize).copied().flatten().ok_or(Error::Undetermined { position: j })
        };
        let mut out = Vec::new();
        let mut open = None;
        for twice in 1..=2 * span {
            let c = HalfInt(twice);
            if c.is_integer() && cell(c.floor())?.is_none() {
                open = open.or(Some(c));
                continue;
            }
            let p = maximal_palindrome_with(cell, c, usize::MAX)?;
            let start = p.start();
            if !inside(start - 1) || !inside(start + p.length() as i64) {
                continue;
            }
            // An open palindrome still counts with its determined part, which is a palindrome
            // in every completion of the approximant.
            if !p.bounded && p.length() > 0 {
                open = open.or(Some(c));
            }
            if p.word.iter().any(|k| k.is_infinite()) {
                continue;
            }
            let binary = match map_center_with(offset, &p) {
                Ok(b) => b,
                Err(Error::Undetermined { .. }) => continue,
                Err(e) => return Err(e),
            };
            let log_ratio = binary.center.to_f64() * self.log_b - (binary.length() as f64).ln();
            let level = reflection_level(s, prefix, c).n_c;
            out.push(Candidate { center: c, length: p.length(), level, binary, log_ratio });
        }
        Ok((out, open))
    }

    /// Length of the longest admissible chain, capped at `j_max`.
    fn chain_progress(&self, cands: &[Candidate]) -> usize {
        (1..=self.opts.j_max).rev().find(|&j| self.chain_of(cands, j).is_some()).unwrap_or(0)
    }

    fn chain(&self, cands: &[Candidate]) -> Option<Vec<usize>> {
        self.chain_of(cands, self.opts.j_max)
    }

    /// First chain (by binary center) of `j_max` candidates with increasing `c′` and strictly
    /// decreasing ratio, honouring the optional cap.
    fn chain_of(&self, cands: &[Candidate], j_max: usize) -> Option<Vec<usize>> {
        let fits = |i: usize, j: usize| match self.opts.ratio_cap {
            Some(kappa) => cands[i].log_ratio <= (kappa / j as f64).ln(),
            None => true,
        };
        // prev[j][i]: predecessor of candidate i when it is the (j+1)-th datum.
        let n = cands.len();
        let mut reach = vec![vec![false; n]; j_max];
        let mut prev = vec![vec![usize::MAX; n]; j_max];
        for i in 0..n {
            reach[0][i] = fits(i, 1);
        }
        for j in 1..j_max {
            for i in 0..n {
                if !fits(i, j + 1) {
                    continue;
                }
                for k in 0..i {
                    if reach[j - 1][k] && cands[k].binary.center < cands[i].binary.center && cands[k].log_ratio > cands[i].log_ratio {
                        reach[j][i] = true;
                        prev[j][i] = k;
                        break;
                    }
                }
            }
        }
        let last = (0..n).find(|&i| reach[j_max - 1][i])?;
        let mut chain = vec![last];
        let mut cur = last;
        for j in (1..j_max).rev() {
            cur = prev[j][cur];
            chain.push(cur);
        }
        chain.reverse();
        Some(chain)
    }

    fn verify(&self, prefix: &OdometerPrefix, data: &[StrongDatum]) -> Result<bool> {
        let address = Address::Prefix(prefix.clone());
        for d in data {
            let lo = d.binary.start();
            let hi = lo + d.binary.length() as i64 - 1;
            let w = address.binary_window(self.s, lo, hi, Budget::DEFAULT)?;
            if w != d.binary.word || !w.is_palindrome() || w.first() != Some(Letter::B) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `d_b(aʲ)`: the shortest distance between two occurrences of `aʲ` with a `b` in between.
///
/// Read off the Toeplitz hosts of length-`L` legal words, doubling `L` until the pair fits.
pub fn d_b(s: &Substitution, j: usize, budget: Budget) -> Result<usize> {
    if j == 0 {
        return Err(Error::InvalidInput("j must be positive".into()));
    }
    let mut len = 4 * j + 4;
    loop {
        let hosts = match s.language_hosts(len, budget) {
            Ok(h) => h,
            Err(Error::BudgetExceeded { .. }) => {
                return Err(Error::NotFound { what: format!("d_b(a^{j})"), depth: len as u32 });
            }
            Err(e) => return Err(e),
        };
        let best = hosts.hosts.iter().filter_map(|h| min_separation(h, j)).min();
        if let Some(d) = best {
            if d + j <= len {
                return Ok(d);
            }
        }
        len *= 2;
    }
}

/// Minimum of `s₂ − (e₁ − j + 1)` over consecutive `a`-runs `[s₁, e₁]`, `[s₂, e₂]` of length `≥ j`.
pub fn min_separation(w: &BinaryWord, j: usize) -> Option<usize> {
    let mut runs = Vec::new();
    let mut i = 0;
    let v = w.as_slice();
    while i < v.len() {
        if v[i] == Letter::A {
            let start = i;
            while i < v.len() && v[i] == Letter::A {
                i += 1;
            }
            if i - start >= j {
                runs.push((start, i - 1));
            }
        } else {
            i += 1;
        }
    }
    runs.windows(2).map(|p| p[1].0 - (p[0].1 + 1 - j)).min()
}

/// One entry of the palindrome report.
#[derive(Clone, Debug, Serialize)]
pub struct PalindromeReportEntry {
    pub center: HalfInt,
    pub length: usize,
    pub word_prefix: String,
    pub ratio: f64,
}

impl From<&StrongDatum> for PalindromeReportEntry {
    fn from(d: &StrongDatum) -> Self {
        PalindromeReportEntry {
            center: d.binary.center,
            length: d.binary.length(),
            word_prefix: d.binary.word.prefix(64).to_string(),
            ratio: d.ratio(),
        }
    }
}

/// Longest palindrome among the subwords of `words` (return alphabet), by direct expansion.
pub fn longest_palindrome(word: &ReturnWord) -> usize {
    let v = word.as_slice();
    let n = v.len() as i64;
    let mut best = 0;
    for twice in 0..(2 * n - 1).max(0) {
        let (mut l, mut h) = if twice % 2 == 0 { (twice / 2, twice / 2) } else { (twice / 2 + 1, twice / 2) };
        while l > 0 && h + 1 < n && v[(l - 1) as usize] == v[(h + 1) as usize] {
            l -= 1;
            h += 1;
        }
        best = best.max((h - l + 1) as usize);
    }
    best
}

/// `true` when `B^{k_r} < r²`, i.e. `B < B′`, decided exactly.
pub fn below_critical(s: &Substitution, b: &BigRational) -> bool {
    let r_sq = BigRational::from_integer(BigInt::from(s.r() * s.r()));
    let k_r = s.k_r() as i32;
    if k_r == 0 || b.is_zero() {
        return true;
    }
    num_traits::pow::Pow::pow(b, k_r) < r_sq
}
