//! Powers of `b`-leading words: the `b`-index, its finite decision procedure over short
//! return words, and the Gordon-type repetition criterion.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::returnwords::{self, ReturnLetter, ReturnWord, Side};
use crate::substitution::Substitution;
use crate::words::{BinaryWord, Letter, Word};
use crate::Budget;

/// A return word `y` whose power is realized inside `host`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerWitness {
    pub y: ReturnWord,
    /// `β⁽²⁾`, or a rotation of `β⁽²⁾k` with `k ∈ f²(𝒩)`.
    pub host: ReturnWord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexVerdict {
    pub threshold: usize,
    /// `Ind_b(ℒ_ϱ) > threshold`.
    pub exceeded: bool,
    #[serde(skip)]
    pub witness: Option<PowerWitness>,
    #[serde(rename = "witness_y")]
    witness_y: Option<String>,
    #[serde(rename = "host")]
    host_str: Option<String>,
}

impl IndexVerdict {
    fn new(threshold: usize, witness: Option<PowerWitness>) -> Self {
        let witness_y = witness.as_ref().map(|w| w.y.to_string());
        let host_str = witness.as_ref().map(|w| w.host.to_string());
        IndexVerdict { threshold, exceeded: witness.is_some(), witness, witness_y, host_str }
    }
}

/// Letters `k ≤ k_max` of `f²(𝒩)`.
pub fn short_host_letters(s: &Substitution) -> Vec<ReturnLetter> {
    let k_max = s.k_max().unwrap_or(0);
    (0..=k_max)
        .map(ReturnLetter::finite)
        .filter(|&k| returnwords::in_f_power_image(s, k, 2) && returnwords::in_return_alphabet(s, k))
        .collect()
}

/// The host words searched for short powers: `β⁽²⁾` and every rotation of `β⁽²⁾k`.
pub fn power_hosts(s: &Substitution) -> Result<Vec<ReturnWord>> {
    let beta2 = returnwords::beta(s, 2, Budget::DEFAULT)?;
    let mut hosts = vec![beta2.clone()];
    for k in short_host_letters(s) {
        let base = beta2.concat(&Word::single(k));
        for i in 0..base.len() {
            hosts.push(base.rotate(i));
        }
    }
    Ok(hosts)
}

fn find_power(host: &ReturnWord, len: usize, n: usize) -> Option<ReturnWord> {
    let h = host.as_slice();
    let total = len * n;
    if total > h.len() {
        return None;
    }
    (0..=h.len() - total).find(|&i| (i + len..i + total).all(|j| h[j] == h[j - len])).map(|i| Word::new(h[i..i + len].to_vec()))
}

/// Decides `Ind_b(ℒ_ϱ) > n` by searching `yⁿ` with `|y| ≤ r − 1` in the short hosts.
pub fn index_b_exceeds(s: &Substitution, n: usize) -> Result<IndexVerdict> {
    s.require_almost_primitive("index_b_exceeds")?;
    if n == 0 {
        return Err(Error::InvalidInput("threshold must be positive".into()));
    }
    let hosts = power_hosts(s)?;
    for len in 1..s.r() {
        for host in &hosts {
            if let Some(y) = find_power(host, len, n) {
                return Ok(IndexVerdict::new(n, Some(PowerWitness { y, host: host.clone() })));
            }
        }
    }
    Ok(IndexVerdict::new(n, None))
}

/// Integer bracket on `Ind_b(ℒ_ϱ)` with a witnessed rational lower bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexBounds {
    /// Largest `n` with `Ind_b > n`.
    pub exceeds: usize,
    /// Largest power `u^s` (`u₁ = b`) realized in the binary image of a host.
    #[serde(serialize_with = "serialize_ratio")]
    pub witnessed: Ratio<usize>,
    /// `Ind_b ≤ upper`, when the test at `exceeds + 1` failed within `n_max`.
    pub upper: Option<usize>,
}

impl IndexBounds {
    pub fn is_exact(&self) -> bool {
        self.upper.is_some_and(|u| self.witnessed == Ratio::from_integer(u))
    }
}

impl fmt::Display for IndexBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) if self.is_exact() => write!(f, "= {u}"),
            Some(u) => write!(f, "(>{}, ≤{u})", self.exceeds),
            None => write!(f, "(>{}, unbounded below n_max)", self.exceeds),
        }
    }
}

fn serialize_ratio<S: Serializer>(r: &Ratio<usize>, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(&format_args!("{}/{}", r.numer(), r.denom()))
}

/// Runs the threshold test for `n = 1, …, n_max + 1` and brackets the index.
pub fn index_b_bounds(s: &Substitution, n_max: usize) -> Result<IndexBounds> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be positive".into()));
    }
    let mut exceeds = 0;
    let mut last = None;
    let mut upper = None;
    for n in 1..=n_max + 1 {
        let v = index_b_exceeds(s, n)?;
        match v.witness {
            Some(w) => {
                exceeds = n;
                last = Some(w);
            }
            None => {
                upper = Some(n);
                break;
            }
        }
    }
    if upper.is_none() {
        exceeds = exceeds.min(n_max);
    }
    let mut witnessed = Ratio::from_integer(0);
    if let Some(w) = &last {
        // Every host is followed by b in the language, so τ(host)b is legal.
        let mut text = returnwords::tau_expand(&w.host, Side::Right).word;
        text.push(Letter::B);
        let base = returnwords::tau_expand(&w.y, Side::Right).word;
        witnessed = text.max_power_of(&base)?;
    }
    Ok(IndexBounds { exceeds, witnessed, upper })
}

/// Locates `w` inside a legal host `β⁽ᵐ⁾` or `β⁽ᵐ⁾kβ⁽ᵐ⁾`; lattice cells of the host sit at
/// indices `≡ r − 1 (mod r)`.
fn locate(s: &Substitution, w: &ReturnWord) -> Result<Option<(ReturnWord, usize)>> {
    let mut m = 1u32;
    while (s.r() as u128).pow(m) < w.len() as u128 {
        m += 1;
    }
    let b = returnwords::beta(s, m, Budget::DEFAULT)?;
    let found = b.occurrences(w).next();
    if let Some(i) = found {
        return Ok(Some((b, i)));
    }
    let letters: BTreeSet<ReturnLetter> = w.iter().copied().collect();
    for k in letters {
        if k.is_infinite() || !returnwords::in_f_power_image(s, k, m) {
            continue;
        }
        let host = b.concat(&Word::single(k)).concat(&b);
        let found = host.occurrences(w).next();
        if let Some(i) = found {
            return Ok(Some((host, i)));
        }
    }
    Ok(None)
}

/// Shortens a legal power `yⁿ` to `(y′)ⁿ` with `|y′| ≤ r − 1`.
///
/// Divides by `r` when `r | |y|`, collapses to the `r`-periodic prefix when `n ≥ 3`, and for
/// `n = 2` uses the offset between the level-1 lattice cells of the two copies.
pub fn reduce_power_witness(s: &Substitution, y: &ReturnWord, n: usize) -> Result<ReturnWord> {
    s.require_almost_primitive("reduce_power_witness")?;
    if y.is_empty() || n == 0 {
        return Err(Error::InvalidInput("need a non-empty word and a positive power".into()));
    }
    let r = s.r();
    let mut y = y.clone();
    loop {
        let power = y.power(n);
        let Some((host, start)) = locate(s, &power)? else {
            return Err(Error::IllegalWord(format!("({y})^{n} is not legal")));
        };
        if n == 1 {
            return Ok(y.prefix(1));
        }
        let len = y.len();
        if len < r {
            return Ok(y);
        }
        let first_lattice = (r - 1 + r - start % r) % r;
        if len.is_multiple_of(r) {
            let ell = len / r;
            let cells: Vec<ReturnLetter> = (0..ell).map(|j| host[start + first_lattice + r * j]).collect();
            let inv = cells
                .iter()
                .map(|&k| returnwords::f_inverse(s, k).ok_or_else(|| Error::IllegalWord(format!("lattice letter {k} is not in f(𝒩)"))))
                .collect::<Result<Vec<_>>>()?;
            y = Word::new(inv);
        } else if n >= 3 {
            y = power.prefix(r);
        } else {
            // The two copies meet U_1 at offsets s0 and s1; their difference is a period of
            // the window around the occurrence.
            let s1 = (r - 1 + r - (start + len) % r) % r;
            return Ok(y.prefix(first_lattice.abs_diff(s1)));
        }
    }
}

/// `Ind_b(ℒ_ϱ) > 3`: some `u` with `u₁ = b` has `uuuu₁` legal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GordonVerdict {
    pub holds: bool,
    /// `u = τ(y)`.
    pub witness: Option<BinaryWord>,
    #[serde(skip)]
    pub y: Option<ReturnWord>,
}

pub fn gordon_criterion(s: &Substitution) -> Result<GordonVerdict> {
    let v = index_b_exceeds(s, 3)?;
    let y = v.witness.map(|w| w.y);
    let witness = y.as_ref().map(|y| returnwords::tau_expand(y, Side::Right).word);
    Ok(GordonVerdict { holds: v.exceeded, witness, y })
}
