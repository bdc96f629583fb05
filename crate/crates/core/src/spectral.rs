//! Schrödinger operators `(Hψ)ₙ = ψₙ₊₁ + ψₙ₋₁ + V(wₙ)ψₙ` over the subshift: transfer matrices,
//! spectral envelopes, and the eigenvalue construction on eventually periodic points.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::palindromes::{regime, PalindromeRegime};
use crate::returnwords::{Address, ReturnLetter};
use crate::substitution::Substitution;
use crate::words::{BinaryWord, Letter, Word};
use crate::Budget;

/// Potential values `V(a)`, `V(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CouplingConfig {
    pub v_a: f64,
    pub v_b: f64,
}

impl CouplingConfig {
    /// Rejects `V(a) = V(b)` unless `allow_degenerate` is set.
    pub fn new(v_a: f64, v_b: f64, allow_degenerate: bool) -> Result<Self> {
        if !v_a.is_finite() || !v_b.is_finite() {
            return Err(Error::InvalidInput("potential values must be finite".into()));
        }
        if v_a == v_b && !allow_degenerate {
            return Err(Error::InvalidInput("V(a) = V(b) gives a non-injective potential".into()));
        }
        Ok(CouplingConfig { v_a, v_b })
    }

    pub fn potential(&self, c: Letter) -> f64 {
        match c {
            Letter::A => self.v_a,
            Letter::B => self.v_b,
        }
    }
}

/// A product of transfer matrices, stored as `e^{log_scale} · entries`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix {
    pub entries: [[f64; 2]; 2],
    pub log_scale: f64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix { entries: [[1.0, 0.0], [0.0, 1.0]], log_scale: 0.0 };

    /// `T(x) = ((x, −1), (1, 0))` with `x = E − V(c)`.
    pub fn letter(x: f64) -> Self {
        TransferMatrix { entries: [[x, -1.0], [1.0, 0.0]], log_scale: 0.0 }
    }

    /// `self · other`.
    pub fn mul(&self, other: &TransferMatrix) -> TransferMatrix {
        let (a, b) = (&self.entries, &other.entries);
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        TransferMatrix { entries: m, log_scale: self.log_scale + other.log_scale }.renormalized()
    }

    fn renormalized(mut self) -> Self {
        let max = self.entries.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if max > 0.0 && !(1e-64..=1e64).contains(&max) {
            for v in self.entries.iter_mut().flatten() {
                *v /= max;
            }
            self.log_scale += max.ln();
        }
        self
    }

    /// Left multiplication by a single letter matrix, `T(x) · self`.
    fn push_letter(&mut self, x: f64) {
        let [r0, r1] = self.entries;
        self.entries = [[x * r0[0] - r1[0], x * r0[1] - r1[1]], r0];
        *self = self.renormalized();
    }

    /// Entries with the scale applied; may overflow to infinity.
    pub fn to_plain(&self) -> [[f64; 2]; 2] {
        let f = self.log_scale.exp();
        self.entries.map(|row| row.map(|v| v * f))
    }

    pub fn trace(&self) -> f64 {
        let t = self.entries[0][0] + self.entries[1][1];
        if t == 0.0 {
            0.0
        } else {
            t.signum() * (t.abs().ln() + self.log_scale).exp()
        }
    }

    pub fn det(&self) -> f64 {
        let m = &self.entries;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * (2.0 * self.log_scale).exp()
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = self.to_plain();
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

/// `T_E(w) = T_E(w_n) ⋯ T_E(w_1)`.
pub fn transfer(e: f64, cfg: &CouplingConfig, w: &BinaryWord) -> TransferMatrix {
    let xa = e - cfg.v_a;
    let xb = e - cfg.v_b;
    let mut m = TransferMatrix::IDENTITY;
    for &c in w.iter() {
        m.push_letter(if c == Letter::A { xa } else { xb });
    }
    m
}

/// Exact transfer product over rationals.
pub fn transfer_exact(e: &BigRational, v_a: &BigRational, v_b: &BigRational, w: &BinaryWord) -> [[BigRational; 2]; 2] {
    let xa = e - v_a;
    let xb = e - v_b;
    let zero = BigRational::zero;
    let one = BigRational::one;
    let mut m = [[one(), zero()], [zero(), one()]];
    for &c in w.iter() {
        let x = if c == Letter::A { &xa } else { &xb };
        let [r0, r1] = m;
        let top = [x * &r0[0] - &r1[0], x * &r0[1] - &r1[1]];
        m = [top, r0];
    }
    m
}

/// `‖T(x)‖² = (x² + 2 + √((x² + 2)² − 4))/2`.
pub fn letter_norm_sq(x: f64) -> f64 {
    let t = x * x + 2.0;
    (t + (t * t - 4.0).max(0.0).sqrt()) / 2.0
}

/// `B_E = max_c ‖T_E(c)‖²`.
pub fn b_norm_bound(e: f64, cfg: &CouplingConfig) -> f64 {
    letter_norm_sq(e - cfg.v_a).max(letter_norm_sq(e - cfg.v_b))
}

/// `{E | B_E < B′}` for the critical regime, as open intervals.
pub fn exclusion_window(s: &Substitution, cfg: &CouplingConfig) -> Result<Vec<(f64, f64)>> {
    let b_prime = match regime(s)? {
        PalindromeRegime::CriticalB { b_prime, .. } => b_prime,
        PalindromeRegime::AllB => {
            return Err(Error::RegimeMismatch(
                "strong palindromes exist for every B here, so generic absence of eigenvalues needs no window".into(),
            ))
        }
        other => return Err(Error::RegimeMismatch(format!("no generic exclusion window in regime {other:?}"))),
    };
    // ‖T(x)‖² < B′ exactly when |x| < √B′ − 1/√B′.
    let half = b_prime.sqrt() - 1.0 / b_prime.sqrt();
    let lo = (cfg.v_a - half).max(cfg.v_b - half);
    let hi = (cfg.v_a + half).min(cfg.v_b + half);
    Ok(if lo < hi { vec![(lo, hi)] } else { Vec::new() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub e: f64,
    pub in_spectrum: bool,
    pub trace_b_period: f64,
    pub trace_a: f64,
}

/// Periodic-approximant proxy for the spectrum; not a computation of `Σ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    pub depth: u32,
    pub heuristic: bool,
    pub points: Vec<SpectrumPoint>,
}

/// Marks `E` when `|tr T_E(a)| ≤ 2`, or when `|tr T_E(ϱⁿ(b))| ≤ 2` and `E` lies in the envelope
/// `[−2, 2] + {V(a), V(b)}` that contains every spectrum of the subshift.
pub fn spectrum_estimate(s: &Substitution, cfg: &CouplingConfig, grid: &[f64], depth: u32, budget: Budget) -> Result<SpectrumEstimate> {
    let w = s.iterate(Letter::B, depth, budget)?;
    let points = grid
        .par_iter()
        .map(|&e| {
            let trace_a = e - cfg.v_a;
            let trace_b_period = transfer(e, cfg, &w).trace();
            let envelope = (e - cfg.v_a).abs() <= 2.0 || (e - cfg.v_b).abs() <= 2.0;
            let in_spectrum = trace_a.abs() <= 2.0 || (envelope && trace_b_period.abs() <= 2.0);
            SpectrumPoint { e, in_spectrum, trace_b_period, trace_a }
        })
        .collect();
    Ok(SpectrumEstimate { depth, heuristic: true, points })
}

/// Evenly spaced grid `lo, lo + step, …` up to `hi` (inclusive within rounding).
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::InvalidInput(format!("bad grid {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointClass {
    /// `a^ℤ`.
    Periodic,
    EventuallyPeriodic,
    Aperiodic,
}

/// The absolutely continuous spectrum `V(a) + [−2, 2]` where it is present.
pub fn ac_spectrum_class(class: PointClass, cfg: &CouplingConfig) -> Option<(f64, f64)> {
    match class {
        PointClass::Periodic | PointClass::EventuallyPeriodic => Some((cfg.v_a - 2.0, cfg.v_a + 2.0)),
        PointClass::Aperiodic => None,
    }
}

/// A coupling for which `T_E(ϱ(b))` swaps the eigendirections of `T_E(a)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenSolution {
    pub mu: f64,
    pub x_a: f64,
    pub x_b: f64,
    pub residuals: [f64; 2],
}

fn mu_of(x_a: f64) -> Result<f64> {
    if x_a.abs() <= 2.0 {
        return Err(Error::NonHyperbolic);
    }
    let d = (x_a * x_a - 4.0).sqrt();
    Ok(if x_a > 0.0 { (x_a + d) / 2.0 } else { (x_a - d) / 2.0 })
}

fn require_switch_family(s: &Substitution) -> Result<()> {
    s.require_almost_primitive("the eigenvalue construction")?;
    if s.k_r() != 0 {
        return Err(Error::InvalidInput("the block splitting needs k_r = 0, i.e. ϱ(b) ending in b".into()));
    }
    Ok(())
}

impl EigenSolution {
    pub fn from_params(s: &Substitution, x_a: f64, x_b: f64) -> Result<Self> {
        let mu = mu_of(x_a)?;
        Ok(EigenSolution { mu, x_a, x_b, residuals: switch_residuals(s, mu, x_b) })
    }

    /// The same coupling at `E + delta`.
    pub fn shifted(&self, s: &Substitution, delta: f64) -> Result<Self> {
        EigenSolution::from_params(s, self.x_a + delta, self.x_b + delta)
    }
}

fn switch_matrix(s: &Substitution, mu: f64, x_b: f64) -> [[f64; 2]; 2] {
    let cfg = CouplingConfig { v_a: -(mu + 1.0 / mu), v_b: -x_b };
    transfer(0.0, &cfg, &s.image(Letter::B)).to_plain()
}

/// `((−μ, 1) M (μ, 1)ᵀ, (1, −μ) M (1, μ)ᵀ)` with `M = T_E(ϱ(b))`.
pub fn switch_residuals(s: &Substitution, mu: f64, x_b: f64) -> [f64; 2] {
    let m = switch_matrix(s, mu, x_b);
    let u = [m[0][0] * mu + m[0][1], m[1][0] * mu + m[1][1]];
    let v = [m[0][0] + m[0][1] * mu, m[1][0] + m[1][1] * mu];
    [-mu * u[0] + u[1], v[0] - mu * v[1]]
}

/// All switch solutions with `x_a ∈ (2, 4)`, `x_b ∈ (0, 3)`: a 400×400 sign-change scan followed
/// by damped Newton refinement; roots closer than `10⁻⁶` are merged.
pub fn solve_switch_system(s: &Substitution) -> Result<Vec<EigenSolution>> {
    require_switch_family(s)?;
    const N: usize = 400;
    let (xa_lo, xa_hi, xb_lo, xb_hi) = (2.0, 4.0, 0.0, 3.0);
    let xa = |i: usize| xa_lo + (xa_hi - xa_lo) * (i as f64 + 0.5) / N as f64;
    let xb = |j: usize| xb_lo + (xb_hi - xb_lo) * j as f64 / N as f64;
    let values: Vec<Vec<[f64; 2]>> = (0..=N)
        .into_par_iter()
        .map(|i| (0..=N).map(|j| switch_residuals(s, mu_of(xa(i)).expect("grid is hyperbolic"), xb(j))).collect())
        .collect();
    let changes = |k: usize, i: usize, j: usize| {
        let c = [values[i][j][k], values[i + 1][j][k], values[i][j + 1][k], values[i + 1][j + 1][k]];
        c.iter().any(|v| *v <= 0.0) && c.iter().any(|v| *v >= 0.0)
    };
    let seeds: Vec<(f64, f64)> = (0..N)
        .flat_map(|i| (0..N).map(move |j| (i, j)))
        .filter(|&(i, j)| changes(0, i, j) && changes(1, i, j))
        .map(|(i, j)| ((xa(i) + xa(i + 1)) / 2.0, (xb(j) + xb(j + 1)) / 2.0))
        .collect();
    let mut out: Vec<EigenSolution> = Vec::new();
    for (a0, b0) in seeds {
        let Some((mu, x_b)) = refine(s, mu_of(a0)?, b0) else { continue };
        let x_a = mu + 1.0 / mu;
        if !(mu > 1.0 && x_a > xa_lo && x_a < xa_hi && x_b > xb_lo && x_b < xb_hi) {
            continue;
        }
        if out.iter().any(|o| (o.x_a - x_a).hypot(o.x_b - x_b) < 1e-6) {
            continue;
        }
        out.push(EigenSolution { mu, x_a, x_b, residuals: switch_residuals(s, mu, x_b) });
    }
    out.sort_by(|a, b| b.x_a.total_cmp(&a.x_a));
    Ok(out)
}

fn refine(s: &Substitution, mu: f64, x_b: f64) -> Option<(f64, f64)> {
    let (mut mu, mut x_b) = (mu, x_b);
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut r = switch_residuals(s, mu, x_b);
    for _ in 0..100 {
        if norm(r) < 1e-13 {
            break;
        }
        let h = 1e-7;
        let dm = switch_residuals(s, mu + h, x_b);
        let dmm = switch_residuals(s, mu - h, x_b);
        let db = switch_residuals(s, mu, x_b + h);
        let dbm = switch_residuals(s, mu, x_b - h);
        let j = [[(dm[0] - dmm[0]) / (2.0 * h), (db[0] - dbm[0]) / (2.0 * h)], [(dm[1] - dmm[1]) / (2.0 * h), (db[1] - dbm[1]) / (2.0 * h)]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let step_mu = (j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let step_b = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let mut t = 1.0;
        loop {
            let (m2, b2) = (mu - t * step_mu, x_b - t * step_b);
            let r2 = switch_residuals(s, m2, b2);
            if norm(r2) < norm(r) || t < 1e-6 {
                mu = m2;
                x_b = b2;
                r = r2;
                break;
            }
            t /= 2.0;
        }
    }
    (norm(r) < 1e-9 && mu.is_finite() && x_b.is_finite()).then_some((mu, x_b))
}

/// Prefix `x₁ … x_len` of `x = ϱ̄^∞(k₁)`.
fn fixed_point_letters(s: &Substitution, len: usize) -> Result<Vec<u64>> {
    let addr = Address::fixed_point();
    (0..len as i64)
        .map(|j| {
            let k = addr.cell(s, j)?.expect("fixed point cells are determined");
            k.value().ok_or(Error::LetterOverflow)
        })
        .collect()
}

/// Exact `h(n) = Σ_{j ≤ n} (−1)^{j+1} f(x_j)` along `x = ϱ̄^∞(k₁)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightProfile {
    pub p: u64,
    /// `values[n − 1] = h(n)`.
    pub values: Vec<i128>,
}

impl HeightProfile {
    pub fn h(&self, n: usize) -> i128 {
        self.values[n - 1]
    }

    /// First `n` violating `p^{k+1} ≤ h(n) ≤ Σ_{m=1}^{k+1} pᵐ` for `r^k ≤ n < r^{k+1}`.
    pub fn first_bound_violation(&self, r: usize) -> Option<usize> {
        let p = self.p as i128;
        let mut k = 0u32;
        let mut block_end = r;
        (1..=self.values.len()).find(|&n| {
            while n >= block_end {
                k += 1;
                block_end *= r;
            }
            let lower = p.pow(k + 1);
            let upper: i128 = (1..=k + 1).map(|m| p.pow(m)).sum();
            !(lower <= self.h(n) && self.h(n) <= upper)
        })
    }
}

pub fn height_profile(s: &Substitution, n: usize) -> Result<HeightProfile> {
    require_switch_family(s)?;
    Budget::DEFAULT.check(n as u128)?;
    let x = fixed_point_letters(s, n)?;
    let mut h = 0i128;
    let mut values = Vec::with_capacity(n);
    for (j, &xj) in x.iter().enumerate() {
        let f = crate::returnwords::f(s, ReturnLetter::finite(xj))?.value().ok_or(Error::LetterOverflow)? as i128;
        h += if j % 2 == 0 { f } else { -f };
        values.push(h);
    }
    Ok(HeightProfile { p: s.p(), values })
}

/// A vector `e^{log} · (u₀, u₁)` with `max |uᵢ| = 1`.
#[derive(Clone, Copy, Debug)]
struct LogVec {
    u: [f64; 2],
    log: f64,
}

impl LogVec {
    fn from_parts(log0: f64, s0: f64, log1: f64, s1: f64) -> Self {
        let l = log0.max(log1);
        if l == f64::NEG_INFINITY {
            return LogVec { u: [0.0, 0.0], log: l };
        }
        LogVec { u: [s0 * (log0 - l).exp(), s1 * (log1 - l).exp()], log: l }
    }

    fn norm_log(&self, basis: &[[f64; 2]; 2]) -> f64 {
        let v = [basis[0][0] * self.u[0] + basis[0][1] * self.u[1], basis[1][0] * self.u[0] + basis[1][1] * self.u[1]];
        self.log + v[0].hypot(v[1]).ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayPoint {
    pub m: usize,
    pub ell: u128,
    pub log_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub series: Vec<DecayPoint>,
    /// Largest relative weight of the wrong eigendirection right after a switch.
    pub switch_leakage: f64,
    /// Whether the leakage stayed under the tolerance and was projected out.
    pub projected: bool,
    /// Smallest `m₀` with `s_m < 1` for all recorded `m ≥ m₀`.
    pub m0: Option<usize>,
    /// `min_{m ≥ m₀} (−ln s_m)/ℓ_m`.
    pub gamma: Option<f64>,
}

impl DecayReport {
    pub fn grows(&self) -> bool {
        self.series.last().is_some_and(|p| p.log_s > 0.0)
    }
}

pub const LEAKAGE_TOLERANCE: f64 = 1e-8;

/// Transports `(ψ₀, ψ₋₁) = (μ, 1)` along `w_m = ϱ(b)a^{f(x₁)} ⋯ ϱ(b)a^{f(x_m)}` in the eigenbasis
/// of `T_E(a)`, recording `s_m = ‖(ψ_{ℓ_m}, ψ_{ℓ_m−1})‖/‖(ψ₀, ψ₋₁)‖` in log form.
///
/// When the switch leaks less than [`LEAKAGE_TOLERANCE`] into the wrong eigendirection the
/// leak is treated as rounding and projected out; otherwise it is carried along.
pub fn eigenstate_decay(s: &Substitution, sol: &EigenSolution, m_max: usize) -> Result<DecayReport> {
    require_switch_family(s)?;
    if s.p() <= s.r() as u64 {
        return Err(Error::InvalidInput(format!("decay needs p > {} = |ϱ(b)|_b", s.r())));
    }
    let mu = mu_of(sol.x_a)?;
    let basis = [[mu, 1.0], [1.0, mu]];
    let det = mu * mu - 1.0;
    let inv = [[mu / det, -1.0 / det], [-1.0 / det, mu / det]];
    let m = switch_matrix(s, mu, sol.x_b);
    let mut sw = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            sw[i][j] = (0..2).map(|k| (0..2).map(|l| inv[i][k] * m[k][l] * basis[l][j]).sum::<f64>()).sum();
        }
    }
    let leak = (sw[0][0].abs() / sw[1][0].abs()).max(sw[1][1].abs() / sw[0][1].abs());
    let projected = leak < LEAKAGE_TOLERANCE;
    let x = fixed_point_letters(s, m_max)?;
    let block = s.image(Letter::B).len() as u128;
    let ln_mu = mu.abs().ln();
    let sign_mu = mu.signum();
    let log_norm0 = LogVec { u: [1.0, 0.0], log: 0.0 }.norm_log(&basis);
    let mut v = LogVec { u: [1.0, 0.0], log: 0.0 };
    let mut ell = 0u128;
    let mut series = Vec::with_capacity(m_max);
    let mut max_leak = 0.0f64;
    for (idx, &xj) in x.iter().enumerate() {
        let mut w = [sw[0][0] * v.u[0] + sw[0][1] * v.u[1], sw[1][0] * v.u[0] + sw[1][1] * v.u[1]];
        let big = w[0].abs().max(w[1].abs());
        let small = w[0].abs().min(w[1].abs());
        max_leak = max_leak.max(small / big);
        if projected {
            let keep = usize::from(w[1].abs() > w[0].abs());
            w[1 - keep] = 0.0;
        }
        let f = crate::returnwords::f(s, ReturnLetter::finite(xj))?.value().ok_or(Error::LetterOverflow)?;
        let fl = f as f64 * ln_mu;
        let sign = if f % 2 == 1 { sign_mu } else { 1.0 };
        let (l0, l1) = (v.log + w[0].abs().ln() + fl, v.log + w[1].abs().ln() - fl);
        v = LogVec::from_parts(l0, w[0].signum() * sign, l1, w[1].signum() * sign);
        ell += block + f as u128;
        series.push(DecayPoint { m: idx + 1, ell, log_s: v.norm_log(&basis) - log_norm0 });
    }
    let m0 = series.iter().rposition(|p| p.log_s >= 0.0).map_or(Some(1), |i| (i + 1 < series.len()).then_some(i + 2));
    let gamma = m0.map(|m0| series[m0 - 1..].iter().map(|p| -p.log_s / p.ell as f64).fold(f64::INFINITY, f64::min));
    Ok(DecayReport { series, switch_leakage: max_leak, projected, m0, gamma })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub e: f64,
    pub mu: f64,
    /// `ln ‖T_E(prefix)(μ, 1)ᵀ‖` at prefix lengths `10, 100, …`.
    pub unstable_log_norms: Vec<(usize, f64)>,
    /// `ln |c_n|` for `T_E(w_n)` in the eigenbasis, `w_n = τ(β⁽ⁿ⁾)b`.
    pub log_c: Vec<f64>,
    pub decay_observed: bool,
}

/// Follows the unstable solution along `ϱ^∞(b)` for `a ↦ aᵖ, b ↦ bba`, together with the
/// stable entries `c_n` of `T_E(w_n)`, `w_{n+1} = w_n a^{fⁿ(0)} w_n`.
pub fn growth_refutation(s: &Substitution, cfg: &CouplingConfig, e: f64, n_max: usize, prefix_len: usize) -> Result<GrowthReport> {
    if s.ks() != [0, 1] || s.p() < 2 {
        return Err(Error::InvalidInput("growth refutation is stated for a ↦ aᵖ, b ↦ bba with p ≥ 2".into()));
    }
    let mu = mu_of(e - cfg.v_a)?;
    let basis = TransferMatrix { entries: [[mu, 1.0], [1.0, mu]], log_scale: 0.0 };
    let det = mu * mu - 1.0;
    let inv = TransferMatrix { entries: [[mu / det, -1.0 / det], [-1.0 / det, mu / det]], log_scale: 0.0 };

    let mut w = transfer(e, cfg, &"bb".parse()?);
    let mut log_c = Vec::with_capacity(n_max);
    let mut fn0 = 0u64;
    for n in 1..=n_max {
        let eig = inv.mul(&w).mul(&basis);
        let c = eig.entries[1][0];
        log_c.push(if c == 0.0 { f64::NEG_INFINITY } else { c.abs().ln() + eig.log_scale });
        if n == n_max {
            break;
        }
        // fⁿ(0) for n ≥ 1, then w_{n+1} = w_n a^{fⁿ(0)} w_n.
        fn0 = fn0.checked_mul(s.p()).and_then(|v| v.checked_add(1)).ok_or(Error::LetterOverflow)?;
        let ap = power(&TransferMatrix::letter(e - cfg.v_a), fn0);
        w = w.mul(&ap).mul(&w);
    }

    let mut text = Word::single(Letter::B);
    while text.len() < prefix_len {
        text = s.apply(&text, Budget::DEFAULT)?;
    }
    let mut m = TransferMatrix::IDENTITY;
    let v0 = [mu, 1.0];
    let log_norm0 = v0[0].hypot(v0[1]).ln();
    let mut unstable_log_norms = Vec::new();
    let mut checkpoint = 10;
    for (i, &c) in text.iter().take(prefix_len).enumerate() {
        m.push_letter(e - cfg.potential(c));
        if i + 1 == checkpoint || i + 1 == prefix_len {
            let u = [m.entries[0][0] * v0[0] + m.entries[0][1] * v0[1], m.entries[1][0] * v0[0] + m.entries[1][1] * v0[1]];
            unstable_log_norms.push((i + 1, u[0].hypot(u[1]).ln() + m.log_scale - log_norm0));
            checkpoint *= 10;
        }
    }
    let decay_observed = unstable_log_norms.last().is_some_and(|&(_, l)| l < 0.0);
    Ok(GrowthReport { e, mu, unstable_log_norms, log_c, decay_observed })
}

fn power(m: &TransferMatrix, n: u64) -> TransferMatrix {
    let mut result = TransferMatrix::IDENTITY;
    let mut base = *m;
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            result = result.mul(&base);
        }
        base = base.mul(&base);
        n >>= 1;
    }
    result
}
