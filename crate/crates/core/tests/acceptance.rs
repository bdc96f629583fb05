use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant};

use aperiodic_spectra::palindromes::{self, PalindromeRegime, StrongPrefixOptions};
use aperiodic_spectra::repetition;
use aperiodic_spectra::returnwords::{self, Address, OdometerPrefix, ReturnLetter, ReturnWord};
use aperiodic_spectra::spectral::{self, CouplingConfig};
use aperiodic_spectra::substitution::ComplexityClass;
use aperiodic_spectra::{BinaryWord, Budget, Error, Letter, Substitution};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn sub(p: u64, ks: &[u64]) -> Substitution {
    Substitution::new(p, ks.to_vec()).unwrap()
}

fn bba() -> Substitution {
    sub(1, &[0, 1])
}

fn bab4(p: u64) -> Substitution {
    sub(p, &[1, 0, 0, 0, 0])
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn e<E: std::fmt::Debug>(err: E) -> String {
    format!("{err:?}")
}

fn tau(y: &[u64]) -> String {
    y.iter().map(|&k| format!("b{}", "a".repeat(k as usize))).collect()
}

fn text(w: &BinaryWord) -> Vec<u8> {
    w.to_string().into_bytes()
}

fn crit1() -> Outcome {
    let t = Instant::now();
    let g = bba();
    let w2 = g.iterate(Letter::B, 2, Budget::DEFAULT).map_err(e)?.to_string();
    let w3 = g.iterate(Letter::B, 3, Budget::DEFAULT).map_err(e)?.to_string();
    ensure(w2 == "bbabbaa", || format!("ϱ²(b) = {w2}"))?;
    ensure(w3 == "bbabbaabbabbaaa", || format!("ϱ³(b) = {w3}"))?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("{w2}, {w3}"))
}

fn crit2() -> Outcome {
    let g = bba();
    let m = g.matrix().entries;
    ensure(m == [[1, 1], [0, 2]], || format!("matrix {m:?}"))?;
    // Powers by plain integer multiplication; |ϱⁿ(b)| is the column sum for b.
    let mut pow = [[1u128, 0], [0, 1]];
    for n in 0..=12u32 {
        let from_matrix = pow[0][1] + pow[1][1];
        let direct = g.iterate(Letter::B, n, Budget::DEFAULT).map_err(e)?.len() as u128;
        let formula = g.length(Letter::B, n);
        ensure(from_matrix == direct && direct == formula, || format!("n = {n}: M^n {from_matrix}, word {direct}, length() {formula}"))?;
        let mut next = [[0u128; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                next[i][j] = (0..2).map(|k| m[i][k] * pow[k][j]).sum();
            }
        }
        pow = next;
    }
    Ok("matrix [[1,1],[0,2]], lengths agree for n ≤ 12".into())
}

fn crit3() -> Outcome {
    let t = Instant::now();
    let beta = returnwords::beta(&bba(), 2, Budget::DEFAULT).map_err(e)?.to_string();
    ensure(beta == "010", || format!("β⁽²⁾ = {beta}"))?;
    let battery = [bba(), sub(2, &[0, 1]), sub(2, &[1, 1, 0]), sub(2, &[0, 3, 0, 1]), sub(7, &[1, 0, 0, 0, 0]), sub(3, &[2, 0, 1])];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in &battery {
        for _ in 0..1000 {
            let len = rng.gen_range(1..=8);
            let y: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=20)).collect();
            let yw = ReturnWord::new(y.iter().map(|&k| ReturnLetter::finite(k)).collect());
            let img = returnwords::rbar_apply(s, &yw).map_err(e)?;
            let img: Vec<u64> = img.iter().map(|k| k.value().unwrap()).collect();
            let lhs = tau(&img);
            let rhs = s.apply(&tau(&y).parse().map_err(e)?, Budget::DEFAULT).map_err(e)?.to_string();
            ensure(lhs == rhs, || format!("{s}: y = {y:?}: τϱ̄(y) = {lhs}, ϱτ(y) = {rhs}"))?;
        }
    }
    within(t, Duration::from_secs(10))?;
    Ok("β⁽²⁾ = 010; conjugacy on 6000 random words".into())
}

/// Fills the Toeplitz skeletons level by level: the level-`n` holes, counted from `q_n`, take the
/// pattern `fⁿ(k₁) ⋯ fⁿ(k_{r−1}) ?` shifted by the digit `p_{n+1}`.
fn brute_fill(p: u64, ks: &[u64], digits: &[usize], lo: i64, hi: i64) -> (Vec<Option<u64>>, Vec<i64>) {
    let r = ks.len() as i64;
    let k_r = ks[ks.len() - 1];
    let mut cells = vec![None; (hi - lo + 1) as usize];
    let mut q = -1i64;
    let mut period = 1i64;
    let mut pattern: Vec<u64> = ks[..ks.len() - 1].to_vec();
    let mut qs = vec![q];
    for &d in digits {
        for j in lo..=hi {
            if (j - q).rem_euclid(period) != 0 {
                continue;
            }
            let t = (j - q).div_euclid(period);
            let i = (t + d as i64).rem_euclid(r);
            if i != 0 {
                cells[(j - lo) as usize] = Some(pattern[i as usize - 1]);
            }
        }
        q -= d as i64 * period;
        period *= r;
        qs.push(q);
        pattern = pattern.iter().map(|&k| k_r + p * k).collect();
    }
    (cells, qs)
}

fn check_prefix(s: &Substitution, digits: &[usize]) -> Result<(), String> {
    let r = s.r();
    let n = digits.len();
    let span = 2 * (r as i64).pow(n as u32);
    let prefix = OdometerPrefix::new(r, digits.to_vec()).map_err(e)?;
    let (cells, qs) = brute_fill(s.p(), s.ks(), digits, -span, span);
    for (level, &q) in qs.iter().enumerate() {
        ensure(prefix.q(level) == q, || format!("{s}, digits {digits:?}: q_{level} = {} vs fill {q}", prefix.q(level)))?;
    }
    let window = Address::Prefix(prefix).window(s, -span, span, Budget::DEFAULT).map_err(e)?;
    let got: Vec<Option<u64>> = window.cells.iter().map(|c| c.map(|k| k.value().unwrap())).collect();
    ensure(got == cells, || format!("{s}, digits {digits:?}: window differs from brute fill"))
}

fn crit4() -> Outcome {
    let battery = [bba(), sub(2, &[1, 1, 0]), sub(2, &[0, 3, 0, 1]), sub(7, &[1, 0, 0, 0, 0])];
    let mut exhaustive = 0;
    let mut random = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for s in &battery {
        let r = s.r();
        for depth in 0..=4u32 {
            for code in 0..r.pow(depth) {
                let digits: Vec<usize> = (0..depth).map(|i| code / r.pow(i) % r).collect();
                check_prefix(s, &digits)?;
                exhaustive += 1;
            }
        }
        for _ in 0..1000 {
            let depth = rng.gen_range(5..=6);
            let digits: Vec<usize> = (0..depth).map(|_| rng.gen_range(0..r)).collect();
            check_prefix(s, &digits)?;
            random += 1;
        }
    }
    Ok(format!("{exhaustive} exhaustive and {random} random prefixes"))
}

/// Largest `n` with `uⁿu₁` (`u₁ = b`) inside `w`, over periods `|u| ≤ max_period`.
fn scan_index(w: &[u8], max_period: usize) -> usize {
    let mut best = 0;
    let mut run = vec![0usize; w.len() + 1];
    for l in 1..=max_period.min(w.len()) {
        run[w.len() - l] = 0;
        for j in (0..w.len() - l).rev() {
            run[j] = if w[j] == w[j + l] { run[j + 1] + 1 } else { 0 };
        }
        for j in 0..w.len() - l {
            if w[j] == b'b' && run[j] >= 1 {
                best = best.max(1 + (run[j] - 1) / l);
            }
        }
    }
    best
}

fn crit5() -> Outcome {
    let t = Instant::now();
    let mut out = Vec::new();
    for (s, exceeds, not_exceeds) in [(bba(), 1, 2), (sub(2, &[0, 3, 0, 1]), 3, 4)] {
        let yes = repetition::index_b_exceeds(&s, exceeds).map_err(e)?;
        let no = repetition::index_b_exceeds(&s, not_exceeds).map_err(e)?;
        ensure(yes.exceeded && !no.exceeded, || format!("{s}: exceeds({exceeds}) = {}, exceeds({not_exceeds}) = {}", yes.exceeded, no.exceeded))?;
        let w = text(&s.iterate(Letter::B, 8, Budget::DEFAULT).map_err(e)?);
        let scanned = scan_index(&w, 64);
        ensure(scanned == exceeds, || format!("{s}: ϱ⁸(b) scan reaches n = {scanned}, expected {exceeds}"))?;
        for n in 1..=5 {
            let v = repetition::index_b_exceeds(&s, n).map_err(e)?.exceeded;
            ensure(v == (n <= scanned), || format!("{s}: exceeds({n}) = {v} disagrees with the scan"))?;
        }
        out.push(format!("{} ({})", repetition::index_b_bounds(&s, 6).map_err(e)?, s.ks().iter().map(u64::to_string).collect::<Vec<_>>().join(",")));
    }
    within(t, Duration::from_secs(30))?;
    Ok(out.join("; "))
}

fn longest_palindrome_brute(v: &[u64]) -> usize {
    let mut best = 0;
    for i in 0..v.len() {
        for j in (i + best..v.len()).rev() {
            let w = &v[i..=j];
            if w.iter().eq(w.iter().rev()) {
                best = best.max(w.len());
                break;
            }
        }
    }
    best
}

fn crit6() -> Outcome {
    let t = Instant::now();
    use PalindromeRegime as R;
    let critical = |k_r: u64| R::CriticalB { exponent: num_rational::Ratio::new(2, k_r), b_prime: 4f64.powf(1.0 / k_r as f64) };
    let battery: Vec<(Substitution, PalindromeRegime)> = vec![
        (bba(), critical(1)),
        (sub(1, &[1, 1, 1, 2]), R::CriticalB { exponent: num_rational::Ratio::new(1, 1), b_prime: 4.0 }),
        (sub(2, &[1, 1, 0]), R::AllB),
        (sub(2, &[0, 1, 0, 0]), R::AllB),
        (sub(3, &[2, 2, 1]), R::AllB),
        (sub(3, &[2, 0, 2, 1]), R::NoneStrong),
        (sub(2, &[0, 1]), R::NoneStrong),
        (sub(3, &[2, 5, 2, 1]), R::NoneStrong),
        (sub(2, &[0, 1, 1]), R::OnlyTrivial),
        (sub(1, &[1, 0, 1]), R::OnlyTrivial),
        (sub(2, &[0, 3, 0, 1]), R::NoneStrong),
    ];
    let mut tags = HashSet::new();
    for (s, expected) in &battery {
        let got = palindromes::regime(s).map_err(e)?;
        ensure(got == *expected, || format!("{s}: regime {got:?}, expected {expected:?}"))?;
        tags.insert(std::mem::discriminant(&got));
        let r = s.r();
        let prefix_pal = {
            let k = &s.ks()[..r - 1];
            k.iter().eq(k.iter().rev())
        };
        let window = Address::fixed_point().window(s, 0, 3 * (r as i64).pow(4), Budget::DEFAULT).map_err(e)?;
        let x: Vec<u64> = window.cells.iter().map(|c| c.unwrap().value().unwrap()).collect();
        let longest = longest_palindrome_brute(&x);
        if prefix_pal {
            ensure(longest > 2 * r * r, || format!("{s}: longest palindrome {longest} ≤ 2r²"))?;
            for n in 1..=6u32 {
                if r.pow(n) > 20_000 {
                    break;
                }
                let b = returnwords::beta(s, n, Budget::DEFAULT).map_err(e)?;
                ensure(b.is_palindrome(), || format!("{s}: β⁽{n}⁾ is not a palindrome"))?;
            }
        } else {
            ensure(longest <= 2 * r * r, || format!("{s}: palindrome of length {longest} > 2r²"))?;
        }
    }
    ensure(tags.len() == 4, || "battery misses a branch".into())?;
    within(t, Duration::from_secs(60))?;
    Ok(format!("{} substitutions, all four branches", battery.len()))
}

fn crit7() -> Outcome {
    let s = sub(2, &[1, 1, 0]);
    let b = BigRational::new(BigInt::from(3), BigInt::from(2));
    let mut verified = 0;
    for seed in [None, Some(1), Some(2), Some(3), Some(4)] {
        let opts = StrongPrefixOptions { j_max: 3, ratio_cap: Some(1.0), seed, ..StrongPrefixOptions::default() };
        let found = palindromes::construct_strong_prefix(&s, &b, &opts).map_err(e)?;
        ensure(found.data.len() == 3, || format!("seed {seed:?}: {} data", found.data.len()))?;
        let address = Address::Prefix(found.prefix.clone());
        for (idx, d) in found.data.iter().enumerate() {
            let j = idx as u64 + 1;
            let w = &d.binary.word;
            let start = d.binary.start();
            let end = start + w.len() as i64 - 1;
            let scanned = address.binary_window(&s, start, end, Budget::DEFAULT).map_err(e)?;
            ensure(scanned == *w && w.is_palindrome() && w.first() == Some(Letter::B), || {
                format!("seed {seed:?}, datum {j}: window [{start}, {end}] = {scanned}, datum {w}")
            })?;
            ensure(2 * start + w.len() as i64 - 1 == d.binary.center.twice(), || format!("datum {j}: center off"))?;
            // ℓ′ ≥ j·(3/2)^{c′}  ⟺  ℓ′²·2^{2c′} ≥ j²·3^{2c′}.
            let twice = d.binary.center.twice();
            ensure(twice >= 0, || "negative center".into())?;
            let l = BigInt::from(w.len());
            let lhs = &l * &l * BigInt::from(2).pow(twice as u32);
            let rhs = BigInt::from(j * j) * BigInt::from(3).pow(twice as u32);
            ensure(lhs >= rhs, || format!("seed {seed:?}, datum {j}: ℓ′ = {} < j·B^(c′), c′ = {}", w.len(), d.binary.center))?;
            verified += 1;
        }
    }
    let forbidden = palindromes::construct_strong_prefix(&bba(), &BigRational::from_integer(BigInt::from(4)), &StrongPrefixOptions::default());
    ensure(matches!(forbidden, Err(Error::RegimeForbidden { b_prime: Some(bp) }) if bp == 4.0), || format!("bba at B = 4: {forbidden:?}"))?;
    Ok(format!("{verified} data verified; bba at B = 4 forbidden"))
}

type M2 = [[f64; 2]; 2];

fn mat_mul(a: &M2, b: &M2) -> M2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// `T(w_n) ⋯ T(w_1)` with `T(x) = [[x, −1], [1, 0]]`, by plain multiplication.
fn plain_transfer(word: &str, x_a: f64, x_b: f64) -> M2 {
    word.chars().fold([[1.0, 0.0], [0.0, 1.0]], |acc, c| {
        let x = if c == 'a' { x_a } else { x_b };
        mat_mul(&[[x, -1.0], [1.0, 0.0]], &acc)
    })
}

fn apply(m: &M2, v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn crit8() -> Outcome {
    let t = Instant::now();
    let sols = spectral::solve_switch_system(&bab4(7)).map_err(e)?;
    ensure(sols.len() == 2, || format!("{} roots", sols.len()))?;
    let expected = [(2.3247, 1.2660), (2.0702, 1.9072)];
    for (sol, (xa, xb)) in sols.iter().zip(expected) {
        ensure((sol.x_a - xa).abs() < 1e-3 && (sol.x_b - xb).abs() < 1e-3, || format!("root ({}, {}) vs ({xa}, {xb})", sol.x_a, sol.x_b))?;
        ensure(sol.residuals.iter().all(|r| r.abs() < 1e-9), || format!("residuals {:?}", sol.residuals))?;
        ensure(sol.mu > 1.0 && (sol.mu + 1.0 / sol.mu - sol.x_a).abs() < 1e-12, || format!("μ = {}", sol.mu))?;
        // ϱ(b) = babbbb sends (μ, 1) onto the line of (1, μ) and back.
        let m = plain_transfer("babbbb", sol.x_a, sol.x_b);
        let u = apply(&m, [sol.mu, 1.0]);
        let v = apply(&m, [1.0, sol.mu]);
        let cross_u = (u[0] * sol.mu - u[1]).abs() / u[0].hypot(u[1]);
        let cross_v = (v[0] - v[1] * sol.mu).abs() / v[0].hypot(v[1]);
        ensure(cross_u < 1e-9 && cross_v < 1e-9, || format!("switch defect {cross_u:e}, {cross_v:e}"))?;
    }
    within(t, Duration::from_secs(10))?;
    Ok(format!("({:.4}, {:.4}), ({:.4}, {:.4})", sols[0].x_a, sols[0].x_b, sols[1].x_a, sols[1].x_b))
}

/// `x₁x₂⋯ = ϱ̄^∞(1)` for `b ↦ bab⁴`, i.e. `ϱ̄(k) = 1 0 0 0 pk`.
fn bab4_letters(p: u64, n: usize) -> Vec<u64> {
    let mut x = vec![1u64];
    while x.len() < n {
        x = x.iter().flat_map(|&k| [1, 0, 0, 0, p * k]).collect();
    }
    x.truncate(n);
    x
}

fn crit9() -> Outcome {
    let t = Instant::now();
    let n_max = 5usize.pow(5);
    for p in [6u64, 7, 11] {
        let profile = spectral::height_profile(&bab4(p), n_max).map_err(e)?;
        let x = bab4_letters(p, n_max);
        let p = p as i128;
        let mut h = 0i128;
        for (idx, &xj) in x.iter().enumerate() {
            let n = idx + 1;
            let f = p * xj as i128;
            h += if idx % 2 == 0 { f } else { -f };
            ensure(profile.h(n) == h, || format!("p = {p}: h({n}) = {} vs {h}", profile.h(n)))?;
            let k = (0..).find(|&k| 5usize.pow(k + 1) > n).unwrap();
            let lower = p.pow(k + 1);
            let upper: i128 = (1..=k + 1).map(|m| p.pow(m)).sum();
            ensure(lower <= h && h <= upper, || format!("p = {p}: h({n}) = {h} outside [{lower}, {upper}]"))?;
            if n == 5usize.pow(k) {
                ensure(h == upper, || format!("p = {p}: h(5^{k}) = {h} ≠ {upper}"))?;
            }
        }
        ensure(profile.h(5) == p + p * p, || format!("h(5) = {}", profile.h(5)))?;
        ensure(profile.first_bound_violation(5).is_none(), || "library bound check disagrees".into())?;
    }
    within(t, Duration::from_secs(5))?;
    Ok(format!("p ∈ {{6, 7, 11}}, n ≤ {n_max}"))
}

fn crit10() -> Outcome {
    let s = bab4(7);
    let sols = spectral::solve_switch_system(&s).map_err(e)?;
    let sol = sols.first().ok_or("no switch solution")?;
    let m_max = 5usize.pow(5);
    let report = spectral::eigenstate_decay(&s, sol, m_max).map_err(e)?;
    let gamma = report.gamma.ok_or("no decay rate")?;
    let m0 = report.m0.ok_or("no m₀")?;
    ensure(gamma > 0.0, || format!("γ = {gamma}"))?;
    let last = report.series.last().unwrap();
    ensure(last.ell >= 100_000, || format!("ℓ_m only reaches {}", last.ell))?;
    for pt in &report.series[m0 - 1..] {
        ensure(pt.log_s <= -0.9 * gamma * pt.ell as f64, || format!("m = {}: ln s_m = {} above −0.9γℓ_m", pt.m, pt.log_s))?;
    }
    // Plain transfer products from (μ, 1). Past m = 4 the block a^{f(x₅)} = a⁴⁹ amplifies the
    // rounding left in the switch by μ⁴⁹, which swamps s_m in double precision.
    let x = bab4_letters(7, 4);
    let mut word = String::new();
    for (pt, &xj) in report.series.iter().zip(&x) {
        word.push_str("babbbb");
        word.push_str(&"a".repeat((7 * xj) as usize));
        ensure(pt.ell as usize == word.len(), || format!("ℓ_{} = {} vs {}", pt.m, pt.ell, word.len()))?;
        let v = apply(&plain_transfer(&word, sol.x_a, sol.x_b), [sol.mu, 1.0]);
        let log_s = v[0].hypot(v[1]).ln() - sol.mu.hypot(1.0).ln();
        ensure((log_s - pt.log_s).abs() < 1e-6, || format!("m = {}: ln s_m {} vs plain {log_s}", pt.m, pt.log_s))?;
    }
    let control = spectral::eigenstate_decay(&s, &sol.shifted(&s, 1e-3).map_err(e)?, m_max).map_err(e)?;
    ensure(!control.projected && control.grows(), || "perturbed energy does not grow".into())?;
    Ok(format!("γ = {gamma:.4e}, m₀ = {m0}, ℓ_max = {}", last.ell))
}

fn norm_sq(x: f64) -> f64 {
    let t = x * x + 2.0;
    (t + (t * t - 4.0).sqrt()) / 2.0
}

fn crit11() -> Outcome {
    let g = bba();
    let step = 0.01;
    for (va, vb) in [(0.0, 4.0), (0.0, 1.0), (-1.0, 2.5)] {
        let t = Instant::now();
        let cfg = CouplingConfig::new(va, vb, false).map_err(e)?;
        let lo = va.min(vb) - 3.0;
        let hi = va.max(vb) + 3.0;
        let grid = spectral::grid(lo, hi, step).map_err(e)?;
        for depth in 1..=6 {
            let est = spectral::spectrum_estimate(&g, &cfg, &grid, depth, Budget::DEFAULT).map_err(e)?;
            for pt in &est.points {
                if (pt.e - va).abs() <= 2.0 {
                    ensure(pt.in_spectrum, || format!("V = ({va}, {vb}), depth {depth}: E = {} inside V_a + [−2, 2] not marked", pt.e))?;
                }
                if (pt.e - va).abs() > 2.0 + 1e-9 && (pt.e - vb).abs() > 2.0 + 1e-9 {
                    ensure(!pt.in_spectrum, || format!("V = ({va}, {vb}), depth {depth}: E = {} outside the envelope marked", pt.e))?;
                }
            }
        }
        within(t, Duration::from_secs(30))?;
    }
    // B_E < B′ = 4 on the grid, from singular values, against the exclusion window.
    let cfg = CouplingConfig::new(0.0, 0.5, false).map_err(e)?;
    let grid = spectral::grid(-4.0, 4.0, step).map_err(e)?;
    let inside: Vec<f64> = grid.iter().copied().filter(|&en| norm_sq(en - 0.0).max(norm_sq(en - 0.5)) < 4.0).collect();
    let (first, last) = (inside[0], inside[inside.len() - 1]);
    let window = spectral::exclusion_window(&g, &cfg).map_err(e)?;
    ensure(window.len() == 1, || format!("window {window:?}"))?;
    let (wl, wh) = window[0];
    ensure((first - wl).abs() <= step + 1e-9 && (last - wh).abs() <= step + 1e-9, || format!("grid boundary [{first}, {last}] vs window ({wl}, {wh})"))?;
    ensure((wl + 1.0).abs() < 1e-12 && (wh - 1.5).abs() < 1e-12, || format!("window ({wl}, {wh}) is not (−3/2, 3/2) ∩ (0.5 − 3/2, 0.5 + 3/2)"))?;
    ensure((norm_sq(1.5) - 4.0).abs() < 1e-12, || "‖T(3/2)‖² ≠ 4".into())?;
    Ok(format!("envelopes at depths ≤ 6; B_E window [{first}, {last}] on the grid"))
}

fn crit12() -> Outcome {
    let g = bba();
    let profile = g.complexity_profile(200, Budget::DEFAULT).map_err(e)?;
    let mut k_fit = 0.0f64;
    for n in 2..=200usize {
        let c = profile[n] as f64;
        let nf = n as f64;
        k_fit = k_fit.max((c - nf * nf / 2.0).abs() / (nf * nf.ln()));
    }
    ensure(k_fit <= 5.0, || format!("fitted K = {k_fit}"))?;
    // Factor counts read directly off ϱ¹⁶(b), which holds every legal word of length ≤ 15
    // (the run a^k followed by b first shows up in ϱ^{k+1}(b)).
    let w = text(&g.iterate(Letter::B, 16, Budget::DEFAULT).map_err(e)?);
    for n in 1..=15 {
        let direct = w.windows(n).collect::<HashSet<_>>().len();
        ensure(direct == profile[n], || format!("c({n}) = {} vs scan {direct}", profile[n]))?;
    }
    let classes = [
        (sub(3, &[0, 1]), ComplexityClass::Linear),
        (sub(2, &[0, 1]), ComplexityClass::NLogLogN),
        (sub(2, &[0, 3, 0, 1]), ComplexityClass::NLogN),
        (bba(), ComplexityClass::Quadratic),
    ];
    for (s, class) in &classes {
        ensure(s.complexity_class() == *class, || format!("{s}: {} vs {class}", s.complexity_class()))?;
    }
    Ok(format!("K = {k_fit:.3}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exact iterates", crit1),
        ("substitution matrix and lengths", crit2),
        ("β⁽²⁾ and τ-conjugacy", crit3),
        ("qₙ and Toeplitz fill", crit4),
        ("b-index verdicts", crit5),
        ("palindrome regimes", crit6),
        ("strong palindrome constructor", crit7),
        ("switch system roots", crit8),
        ("height bounds", crit9),
        ("eigenstate decay", crit10),
        ("spectrum envelopes", crit11),
        ("complexity scaling", crit12),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        let line = match &outcome {
            Ok(detail) => format!("criterion {}: PASS {name} ({dt:.2?}): {detail}", idx + 1),
            Err(why) => {
                failed.push(idx + 1);
                format!("criterion {}: FAIL {name} ({dt:.2?}): {why}", idx + 1)
            }
        };
        // Written past the test harness capture so the summary always shows.
        writeln!(err, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
