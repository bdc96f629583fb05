//! Return words `baᵏ ↔ k`, the return-word substitution `ϱ̄(k) = k₁⋯k_{r−1} f(k)` with
//! `f(k) = k_r + pk`, the expansion `τ(k) = baᵏ`, and the generalized Toeplitz structure of
//! `𝕏_ϱ̄` indexed by odometer addresses.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::substitution::Substitution;
use crate::words::{BinaryWord, Letter, Symbol, Word};
use crate::Budget;

/// An element of `N̄ = ℕ₀ ∪ {∞}`. `∞` sorts after every finite value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReturnLetter(u64);

impl ReturnLetter {
    pub const INFINITY: ReturnLetter = ReturnLetter(u64::MAX);

    /// Panics on `u64::MAX`, which is reserved for `∞`.
    pub fn finite(v: u64) -> Self {
        assert!(v != u64::MAX, "u64::MAX is reserved for the infinite return letter");
        ReturnLetter(v)
    }

    pub fn value(self) -> Option<u64> {
        (self.0 != u64::MAX).then_some(self.0)
    }

    pub fn is_infinite(self) -> bool {
        self.0 == u64::MAX
    }
}

impl fmt::Debug for ReturnLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Display for ReturnLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Symbol for ReturnLetter {
    fn render(&self) -> String {
        match self.value() {
            Some(v) => v.to_string(),
            None => "∞".into(),
        }
    }
}

impl std::str::FromStr for ReturnLetter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "∞" | "inf" | "oo" => Ok(ReturnLetter::INFINITY),
            _ => s
                .parse::<u64>()
                .ok()
                .filter(|&v| v != u64::MAX)
                .map(ReturnLetter)
                .ok_or_else(|| Error::InvalidInput(format!("'{s}' is not a return letter"))),
        }
    }
}

pub type ReturnWord = Word<ReturnLetter>;

/// Parses `"0102"` (one digit per letter) or whitespace/comma separated letters such as `"0 3 0 7"`.
pub fn parse_return_word(s: &str) -> Result<ReturnWord> {
    let s = s.trim();
    if s.contains(|c: char| c.is_whitespace() || c == ',') {
        s.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Word::new)
    } else {
        s.chars().map(|c| c.to_string().parse()).collect::<Result<Vec<_>>>().map(Word::new)
    }
}

/// `f(k) = k_r + pk`, with `f(∞) = ∞`.
pub fn f(s: &Substitution, k: ReturnLetter) -> Result<ReturnLetter> {
    match k.value() {
        None => Ok(k),
        Some(v) => s
            .p()
            .checked_mul(v)
            .and_then(|x| x.checked_add(s.k_r()))
            .filter(|&x| x != u64::MAX)
            .map(ReturnLetter)
            .ok_or(Error::LetterOverflow),
    }
}

/// `fᵐ(k)`.
pub fn f_apply(s: &Substitution, k: ReturnLetter, m: u32) -> Result<ReturnLetter> {
    let mut k = k;
    for _ in 0..m {
        let next = f(s, k)?;
        if next == k {
            break;
        }
        k = next;
    }
    Ok(k)
}

/// `min(fᵐ(k), cap)`; never overflows because `f` is nondecreasing.
pub fn f_apply_capped(s: &Substitution, k: u64, m: u32, cap: u64) -> u64 {
    let mut k = k.min(cap);
    for _ in 0..m {
        if k >= cap {
            return cap;
        }
        k = s.p().saturating_mul(k).saturating_add(s.k_r()).min(cap);
    }
    k
}

/// The preimage of `k` under `f`, if any.
pub fn f_inverse(s: &Substitution, k: ReturnLetter) -> Option<ReturnLetter> {
    match k.value() {
        None => Some(k),
        Some(v) => {
            let d = v.checked_sub(s.k_r())?;
            (d % s.p() == 0).then(|| ReturnLetter(d / s.p()))
        }
    }
}

/// Membership in `𝒩 = {fᵐ(kᵢ) | m ≥ 0, i < r}`.
pub fn in_return_alphabet(s: &Substitution, k: ReturnLetter) -> bool {
    let prefix = &s.ks()[..s.r() - 1];
    let mut k = k;
    loop {
        match k.value() {
            None => return false,
            Some(v) if prefix.contains(&v) => return true,
            Some(_) => match f_inverse(s, k) {
                Some(u) if u != k => k = u,
                _ => return false,
            },
        }
    }
}

/// Membership in `fᵐ(N̄)` where `N̄ = 𝒩 ∪ {∞}`.
pub fn in_f_power_image(s: &Substitution, k: ReturnLetter, m: u32) -> bool {
    if k.is_infinite() {
        return true;
    }
    let mut k = k;
    for _ in 0..m {
        match f_inverse(s, k) {
            Some(u) => k = u,
            None => return false,
        }
    }
    in_return_alphabet(s, k)
}

/// `ϱ̄` applied letterwise.
pub fn rbar_apply(s: &Substitution, y: &ReturnWord) -> Result<ReturnWord> {
    let prefix: Vec<ReturnLetter> = s.ks()[..s.r() - 1].iter().map(|&k| ReturnLetter(k)).collect();
    let mut out = Vec::with_capacity(y.len() * s.r());
    for &k in y.iter() {
        out.extend_from_slice(&prefix);
        out.push(f(s, k)?);
    }
    Ok(Word::new(out))
}

pub fn rbar_iterate(s: &Substitution, y: &ReturnWord, n: u32, budget: Budget) -> Result<ReturnWord> {
    budget.check((y.len() as u128).saturating_mul((s.r() as u128).saturating_pow(n)))?;
    let mut y = y.clone();
    for _ in 0..n {
        y = rbar_apply(s, &y)?;
    }
    Ok(y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Reads left to right; an `∞` contributes `b` followed by `a^∞`, so output stops there.
    Right,
    /// Reads right to left; an `∞` block is `…aaa` to the left, so everything before it is `a^∞`.
    Left,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauExpansion {
    pub word: BinaryWord,
    /// `true` when an `∞` cut the expansion; the omitted side is an infinite `a`-run.
    pub truncated: bool,
}

/// `τ(y)`, the concatenation of the blocks `baᵏ`.
pub fn tau_expand(y: &ReturnWord, side: Side) -> TauExpansion {
    let block = |out: &mut Vec<Letter>, k: u64| {
        out.push(Letter::B);
        out.extend(std::iter::repeat_n(Letter::A, k as usize));
    };
    let mut out = Vec::new();
    match side {
        Side::Right => {
            for &k in y.iter() {
                match k.value() {
                    Some(v) => block(&mut out, v),
                    None => {
                        out.push(Letter::B);
                        return TauExpansion { word: Word::new(out), truncated: true };
                    }
                }
            }
            TauExpansion { word: Word::new(out), truncated: false }
        }
        Side::Left => {
            let start = y.iter().rposition(|k| k.is_infinite());
            let from = start.map_or(0, |i| i + 1);
            for &k in &y.as_slice()[from..] {
                block(&mut out, k.value().expect("no ∞ right of the cut"));
            }
            TauExpansion { word: Word::new(out), truncated: start.is_some() }
        }
    }
}

/// `β⁽ⁿ⁾`, of length `rⁿ − 1`, with `ϱ̄ⁿ(k) = β⁽ⁿ⁾ fⁿ(k)`.
pub fn beta(s: &Substitution, n: u32, budget: Budget) -> Result<ReturnWord> {
    if n == 0 {
        return Ok(Word::empty());
    }
    let r = s.r() as u128;
    budget.check(r.saturating_pow(n) - 1)?;
    let mut b: ReturnWord = s.ks()[..s.r() - 1].iter().map(|&k| ReturnLetter(k)).collect();
    for level in 1..n {
        let mut next = b.clone();
        for &k in &s.ks()[..s.r() - 1] {
            next.push(f_apply(s, ReturnLetter(k), level)?);
            next.extend_from(&b);
        }
        b = next;
    }
    Ok(b)
}

/// A digit prefix `(p₁, …, pₙ)` of an odometer address in `ℤ_r`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OdometerPrefix {
    radix: usize,
    digits: Vec<usize>,
}

impl OdometerPrefix {
    pub fn new(radix: usize, digits: Vec<usize>) -> Result<Self> {
        if radix < 2 {
            return Err(Error::InvalidInput("odometer radix must be at least 2".into()));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= radix) {
            return Err(Error::InvalidInput(format!("digit {d} is not below the radix {radix}")));
        }
        if (radix as u128).checked_pow(digits.len() as u32).is_none_or(|v| v > (1u128 << 62)) {
            return Err(Error::InvalidInput(format!("{} digits in radix {radix} exceed the supported depth", digits.len())));
        }
        Ok(OdometerPrefix { radix, digits })
    }

    /// The first `n` digits of the `r`-adic expansion of `m ≥ 0`.
    pub fn from_integer(radix: usize, m: u64, n: usize) -> Result<Self> {
        let mut digits = Vec::with_capacity(n);
        let mut m = m;
        for _ in 0..n {
            digits.push((m % radix as u64) as usize);
            m /= radix as u64;
        }
        OdometerPrefix::new(radix, digits)
    }

    pub fn radix(&self) -> usize {
        self.radix
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    pub fn truncate(&self, n: usize) -> OdometerPrefix {
        OdometerPrefix { radix: self.radix, digits: self.digits[..n.min(self.depth())].to_vec() }
    }

    /// `rⁿ` for level `n ≤ depth`.
    pub fn period(&self, n: usize) -> i64 {
        (self.radix as i64).pow(n as u32)
    }

    /// `q_n = −1 − Σ_{m ≤ n} p_m r^{m−1}` for `n ≤ depth`.
    pub fn q(&self, n: usize) -> i64 {
        let mut q = -1i64;
        let mut w = 1i64;
        for &d in &self.digits[..n] {
            q -= d as i64 * w;
            w *= self.radix as i64;
        }
        q
    }

    /// Whether `j ∈ U_n = rⁿℤ + q_n`.
    pub fn in_lattice(&self, j: i64, n: usize) -> bool {
        (j - self.q(n)).rem_euclid(self.period(n)) == 0
    }

    /// Address `+1` with carry, the action of the shift.
    pub fn successor(&self) -> OdometerPrefix {
        let mut digits = self.digits.clone();
        for d in digits.iter_mut() {
            *d += 1;
            if *d < self.radix {
                break;
            }
            *d = 0;
        }
        OdometerPrefix { radix: self.radix, digits }
    }
}

impl fmt::Display for OdometerPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.digits.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn q_of(prefix: &OdometerPrefix) -> i64 {
    prefix.q(prefix.depth())
}

/// A point of `𝕏_ϱ̄`, or the approximant of one, given by its address.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Address {
    /// The approximant `x⁽ⁿ⁾`; cells in `U_n` are undetermined.
    Prefix(OdometerPrefix),
    /// `S^shift x*` where `x* = lim ϱ̄ⁿ(k₁)` with `extension` at position `−1`: `∞` for `x*`,
    /// `0` for the second fixed point of a type-0 substitution.
    FixedPoint { shift: u64, extension: ReturnLetter },
}

impl Address {
    pub fn fixed_point() -> Self {
        Address::FixedPoint { shift: 0, extension: ReturnLetter::INFINITY }
    }

    /// Cell `j`, or `None` for `?`.
    pub fn cell(&self, s: &Substitution, j: i64) -> Result<Option<ReturnLetter>> {
        let r = s.r() as i64;
        match self {
            Address::Prefix(prefix) => {
                if prefix.radix() != s.r() {
                    return Err(Error::InvalidInput(format!("address radix {} differs from r = {}", prefix.radix(), r)));
                }
                let mut j = j;
                for (level, &p) in prefix.digits().iter().enumerate() {
                    let t = (j + p as i64).rem_euclid(r);
                    if t != r - 1 {
                        return f_apply(s, ReturnLetter(s.k(t as usize + 1)), level as u32).map(Some);
                    }
                    j = (j + p as i64 - (r - 1)).div_euclid(r);
                }
                Ok(None)
            }
            Address::FixedPoint { shift, extension } => {
                let mut j = j.checked_add(*shift as i64).ok_or(Error::InvalidInput("position overflow".into()))?;
                let mut level = 0u32;
                loop {
                    if j == -1 {
                        return Ok(Some(*extension));
                    }
                    let t = j.rem_euclid(r);
                    if t != r - 1 {
                        return f_apply(s, ReturnLetter(s.k(t as usize + 1)), level).map(Some);
                    }
                    j = (j - (r - 1)).div_euclid(r);
                    level += 1;
                }
            }
        }
    }

    pub fn window(&self, s: &Substitution, lo: i64, hi: i64, budget: Budget) -> Result<ToeplitzWindow> {
        if hi < lo {
            return Err(Error::InvalidInput(format!("empty range {lo}..{hi}")));
        }
        budget.check((hi - lo + 1) as u128)?;
        let cells = (lo..=hi).map(|j| self.cell(s, j)).collect::<Result<Vec<_>>>()?;
        Ok(ToeplitzWindow { offset: lo, cells })
    }

    /// The binary sequence `τ(x)` on `[lo, hi]`, with position `0` at the `b` opening cell `0`.
    pub fn binary_window(&self, s: &Substitution, lo: i64, hi: i64, budget: Budget) -> Result<BinaryWord> {
        if hi < lo {
            return Err(Error::InvalidInput(format!("empty range {lo}..{hi}")));
        }
        let len = budget.check((hi - lo + 1) as u128)?;
        let mut out = vec![Letter::A; len];
        let mut mark = |pos: i64| {
            if (lo..=hi).contains(&pos) {
                out[(pos - lo) as usize] = Letter::B;
            }
        };
        let mut pos = 0i64;
        let mut cell = 0i64;
        while pos <= hi {
            // The opening b is there whatever the cell holds.
            mark(pos);
            if pos == hi {
                break;
            }
            let k = self.cell(s, cell)?.ok_or(Error::Undetermined { position: cell })?;
            match k.value() {
                None => break,
                Some(v) => pos = pos.saturating_add(1).saturating_add(v.min(i64::MAX as u64) as i64),
            }
            cell += 1;
        }
        let mut end = -1i64;
        let mut cell = -1i64;
        while end >= lo {
            let k = self.cell(s, cell)?.ok_or(Error::Undetermined { position: cell })?;
            match k.value() {
                None => break,
                Some(v) => {
                    let start = end.saturating_sub(v.min(i64::MAX as u64) as i64);
                    mark(start);
                    end = start.saturating_sub(1);
                }
            }
            cell -= 1;
        }
        Ok(Word::new(out))
    }
}

/// Cells of an approximant or sequence on `[offset, offset + len)`; `None` is `?`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzWindow {
    pub offset: i64,
    pub cells: Vec<Option<ReturnLetter>>,
}

impl ToeplitzWindow {
    pub fn get(&self, j: i64) -> Option<Option<ReturnLetter>> {
        let i = j.checked_sub(self.offset)?;
        usize::try_from(i).ok().and_then(|i| self.cells.get(i).copied())
    }

    pub fn range(&self) -> (i64, i64) {
        (self.offset, self.offset + self.cells.len() as i64 - 1)
    }

    /// One `index<TAB>value` line per cell.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.cells.iter().enumerate() {
            out.push_str(&format!("{}\t{}\n", self.offset + i as i64, render_cell(*c)));
        }
        out
    }

    /// The cells as a return word; fails on any `?`.
    pub fn to_word(&self) -> Result<ReturnWord> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| c.ok_or(Error::Undetermined { position: self.offset + i as i64 }))
            .collect::<Result<Vec<_>>>()
            .map(Word::new)
    }
}

fn render_cell(c: Option<ReturnLetter>) -> String {
    c.map_or_else(|| "?".into(), |k| k.render())
}

impl fmt::Display for ToeplitzWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cells.iter().map(|c| render_cell(*c)).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `x⁽ⁿ⁾` on `[lo, hi]` for the address prefix of depth `n`.
pub fn approximant_window(s: &Substitution, prefix: &OdometerPrefix, lo: i64, hi: i64, budget: Budget) -> Result<ToeplitzWindow> {
    Address::Prefix(prefix.clone()).window(s, lo, hi, budget)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AddressReport {
    /// All depth-`n` prefixes consistent with the window, sorted.
    pub candidates: Vec<OdometerPrefix>,
    /// Type 0 only: window positions on the deepest lattice holding `0` or `∞`. Swapping `0` and
    /// `∞` there keeps the address, which is how the 2:1 ambiguity shows up.
    pub twin_cells: Vec<i64>,
}

impl AddressReport {
    pub fn unique(&self) -> Option<&OdometerPrefix> {
        match self.candidates.as_slice() {
            [one] => Some(one),
            _ => None,
        }
    }
}

/// Recovers the depth-`n` address prefix from a window of a sequence. `?` cells constrain nothing.
pub fn address_of(s: &Substitution, window: &ToeplitzWindow, depth: usize) -> Result<AddressReport> {
    let cells: Vec<(i64, ReturnLetter)> = window
        .cells
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.map(|k| (window.offset + i as i64, k)))
        .collect();
    let mut found = Vec::new();
    let mut digits = Vec::new();
    search_address(s, &cells, 0, depth, &mut digits, &mut found);
    if found.is_empty() {
        return Err(Error::MalformedWindow(format!("no address of depth {depth} is consistent with the window")));
    }
    let candidates: Vec<OdometerPrefix> = found
        .into_iter()
        .map(|d| OdometerPrefix::new(s.r(), d))
        .collect::<Result<BTreeSet<_>>>()?
        .into_iter()
        .collect();
    let mut twin_cells = Vec::new();
    if s.is_type0() {
        for c in &candidates {
            for &(j, k) in &cells {
                if c.in_lattice(j, depth) && (k.is_infinite() || k.value() == Some(0)) && !twin_cells.contains(&j) {
                    twin_cells.push(j);
                }
            }
        }
        twin_cells.sort_unstable();
    }
    Ok(AddressReport { candidates, twin_cells })
}

fn search_address(
    s: &Substitution,
    cells: &[(i64, ReturnLetter)],
    level: u32,
    depth: usize,
    digits: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    if digits.len() == depth {
        found.push(digits.clone());
        return;
    }
    let r = s.r() as i64;
    'digit: for p in 0..s.r() {
        let mut next = Vec::new();
        for &(j, k) in cells {
            let t = (j + p as i64).rem_euclid(r);
            if t == r - 1 {
                next.push(((j + p as i64 - (r - 1)).div_euclid(r), k));
            } else {
                match f_apply(s, ReturnLetter(s.k(t as usize + 1)), level) {
                    Ok(expected) if expected == k => {}
                    _ => continue 'digit,
                }
            }
        }
        digits.push(p);
        search_address(s, &next, level + 1, depth, digits, found);
        digits.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InducedStep {
    /// `t_b = 1 + k` symbols to the next `b`, which opens cell `next`.
    Return { time: u64, next: i64 },
    /// The cursor sits on `ba^∞`: the point is `w⁻.ba^∞` and its `S_b`-image is `a^∞.ϱ^∞(b)`.
    Exceptional,
}

/// One step of the first-return map to `[b]`, read off the return-letter cell at `position`.
pub fn induced_shift(window: &ToeplitzWindow, position: i64) -> Result<InducedStep> {
    let cell = window
        .get(position)
        .ok_or_else(|| Error::InvalidInput(format!("position {position} outside the window")))?
        .ok_or(Error::Undetermined { position })?;
    Ok(match cell.value() {
        Some(k) => InducedStep::Return { time: k + 1, next: position + 1 },
        None => InducedStep::Exceptional,
    })
}

/// Legality in `ℒ′_ϱ̄`, the `∞`-free language of `ϱ̄`: with `rᵐ ≥ |y|`, `y` touches at most one level-`m` lattice cell, so it is
/// legal iff it occurs in `β⁽ᵐ⁾` or in `β⁽ᵐ⁾k′β⁽ᵐ⁾` for a letter `k′ ∈ fᵐ(N̄)` of `y`.
pub fn is_legal_return_word(s: &Substitution, y: &ReturnWord, budget: Budget) -> Result<bool> {
    s.require_almost_primitive("return-word legality")?;
    if y.is_empty() {
        return Ok(true);
    }
    if y.iter().any(|k| k.is_infinite()) {
        return Ok(false);
    }
    let mut m = 1u32;
    while (s.r() as u128).pow(m) < y.len() as u128 {
        m += 1;
    }
    let b = beta(s, m, budget)?;
    if b.contains(y) {
        return Ok(true);
    }
    let letters: BTreeSet<ReturnLetter> = y.iter().copied().collect();
    for k in letters {
        if in_f_power_image(s, k, m) && b.concat(&Word::single(k)).concat(&b).contains(y) {
            return Ok(true);
        }
    }
    Ok(false)
}
