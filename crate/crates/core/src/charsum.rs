//! Explicit Pólya–Vinogradov type bounds and exhaustive oracles for
//! quadratic character sums.
//!
//! Interval conventions follow the estimates they check: closed intervals
//! `A <= n <= B` for the uniform bounds, half-open windows `M < n <= M + N`
//! for the odd window bound, prefixes `1 <= n <= N` for the even one, and
//! `M <= n <= M + 2N` with tent weight `max(0, 1 - |t - 1|)` for the
//! smoothed bound.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::character::{Parity, QuadChar};
use crate::error::{invalid, Error, Result};
use crate::rounding::round_up;

/// Default cap on `|d|` for the exhaustive oracles.
pub const DEFAULT_ORACLE_CAP: u64 = 3000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharSumKind {
    FrolenkovSoundararajan,
    LapkovaEven,
    LapkovaOdd,
    SmoothedTent,
    WindowOdd,
    WindowEven,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharSumParams {
    pub n: Option<f64>,
    pub m: Option<f64>,
    pub from_zero: bool,
}

/// An evaluated bound together with what it was evaluated for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharSumBound {
    pub kind: CharSumKind,
    pub value: f64,
    pub q: f64,
    pub params: Option<CharSumParams>,
}

/// Uniform bound `V = √q (log q + 6) / (π√2) + √q` for any non-principal
/// character modulo `q >= 100`.
pub fn pv_bound_fs(q: f64) -> Result<f64> {
    if !(q >= 100.0) {
        return Err(Error::OutOfDomain {
            bound: "Frolenkov-Soundararajan V",
            domain: "q >= 100",
            x: q,
        });
    }
    let s = q.sqrt();
    Ok(round_up(s * (q.ln() + 6.0) / (PI * 2f64.sqrt()) + s))
}

/// `log V` for the uniform bound, computed without forming `√q`.
pub fn ln_pv_bound_fs(ln_q: f64) -> f64 {
    let ratio = (ln_q + 6.0) / (PI * 2f64.sqrt()) + 1.0;
    round_up(0.5 * ln_q + ratio.ln())
}

/// Parity-dependent bound for primitive characters modulo `q >= 2`. With
/// `from_zero` (sums starting at `n = 0`, even characters only) the bound is
/// halved.
pub fn pv_bound_lapkova(q: f64, parity: Parity, from_zero: bool) -> Result<f64> {
    if !(q >= 2.0) {
        return Err(Error::OutOfDomain {
            bound: "Lapkova V",
            domain: "q >= 2",
            x: q,
        });
    }
    if from_zero && parity == Parity::Odd {
        return Err(invalid("the halved bound for sums from 0 needs an even character"));
    }
    let s = q.sqrt();
    let l = q.ln();
    let v = match parity {
        Parity::Even => 2.0 / (PI * PI) * s * l + 0.9467 * s + 1.668,
        Parity::Odd => 1.0 / (2.0 * PI) * s * l + 0.8204 * s + 1.0286,
    };
    Ok(round_up(if from_zero { v / 2.0 } else { v }))
}

pub fn ln_pv_bound_lapkova(ln_q: f64, parity: Parity) -> f64 {
    // V / √q, then add back log √q
    let s_inv = (-0.5 * ln_q).exp();
    let ratio = match parity {
        Parity::Even => 2.0 / (PI * PI) * ln_q + 0.9467 + 1.668 * s_inv,
        Parity::Odd => 1.0 / (2.0 * PI) * ln_q + 0.8204 + 1.0286 * s_inv,
    };
    round_up(0.5 * ln_q + ratio.ln())
}

fn check_length(q: f64, n: f64) -> Result<()> {
    if !(q >= 2.0) {
        return Err(invalid(format!("modulus must be >= 2, got {q}")));
    }
    if !(n > 0.0 && n <= q) {
        return Err(invalid(format!("length N must lie in (0, q] = (0, {q}], got {n}")));
    }
    Ok(())
}

/// `√q - N/√q`, bounding tent-weighted sums of length `2N`.
pub fn smoothed_pv_bound(q: f64, n: f64) -> Result<f64> {
    check_length(q, n)?;
    let s = q.sqrt();
    Ok(round_up(s - n / s).max(0.0))
}

/// Window bound: `√(2N) q^{1/4} + √q` for odd characters (any window of
/// length `N`), `√N q^{1/4} + √q / 2` for even characters (prefix sums).
pub fn window_bound(q: f64, n: f64, parity: Parity) -> Result<f64> {
    check_length(q, n)?;
    let q4 = q.powf(0.25);
    let v = match parity {
        Parity::Odd => (2.0 * n).sqrt() * q4 + q.sqrt(),
        Parity::Even => n.sqrt() * q4 + 0.5 * q.sqrt(),
    };
    Ok(round_up(v))
}

/// Block decomposition estimate `K√q - N/√q + N/(2K) + 1` at
/// `K = 1 + ⌊q^{-1/4} √(N/2)⌋`.
pub fn block_tent_bound(q: f64, n: f64) -> f64 {
    let k = 1.0 + (q.powf(-0.25) * (n / 2.0).sqrt()).floor();
    let s = q.sqrt();
    round_up(k * s - n / s + n / (2.0 * k) + 1.0)
}

/// Largest `|Σ_{A≤n≤B} χ(n)|` over all intervals, and one interval
/// attaining it (`B` may exceed `q` when the interval wraps a period).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalMax {
    pub max_abs: i64,
    pub start: u64,
    pub end: u64,
}

fn check_cap(chi: &QuadChar, cap: u64) -> Result<()> {
    if chi.modulus() > cap {
        return Err(Error::CapExceeded {
            what: "|d|",
            value: chi.modulus() as f64,
            cap: cap as f64,
        });
    }
    Ok(())
}

/// `P[k] = Σ_{0≤n<k} χ(n)` for `k = 0..=len`.
fn prefix(values: &[i8], len: usize) -> Vec<i64> {
    let q = values.len();
    let mut p = Vec::with_capacity(len + 1);
    let mut s = 0i64;
    p.push(0);
    for k in 0..len {
        s += values[k % q] as i64;
        p.push(s);
    }
    p
}

/// Exhaustive interval maximum from one period of prefix sums. The full
/// period sums to zero, so every interval sum is a difference of two prefix
/// values inside one period and the answer is `max P - min P`.
pub fn brute_max_interval_sum(chi: &QuadChar, cap: u64) -> Result<IntervalMax> {
    check_cap(chi, cap)?;
    let q = chi.modulus() as usize;
    let p = prefix(&chi.period(), q);
    let (mut imax, mut imin) = (0usize, 0usize);
    for k in 0..q {
        if p[k] > p[imax] {
            imax = k;
        }
        if p[k] < p[imin] {
            imin = k;
        }
    }
    // sum over [A, B] is P[B+1] - P[A]; take A at the minimum
    let end = if imax > imin { imax - 1 } else { imax + q - 1 };
    Ok(IntervalMax {
        max_abs: p[imax] - p[imin],
        start: imin as u64,
        end: end as u64,
    })
}

/// `w[N-1] = max_M |Σ_{M<n≤M+N} χ(n)|` for `N = 1..=q` (integer `M`).
pub fn max_window_sums(chi: &QuadChar, cap: u64) -> Result<Vec<i64>> {
    check_cap(chi, cap)?;
    let q = chi.modulus() as usize;
    // S[k] = Σ_{1≤n≤k} χ(n) = P[k+1] (χ(0) = 0), over two periods
    let p = prefix(&chi.period(), 2 * q + 1);
    let s = &p[1..];
    Ok((1..=q)
        .map(|n| (0..q).map(|m| (s[m + n] - s[m]).abs()).max().unwrap_or(0))
        .collect())
}

/// `|Σ_{1≤n≤N} χ(n)|` for `N = 1..=q`.
pub fn prefix_abs_sums(chi: &QuadChar, cap: u64) -> Result<Vec<i64>> {
    check_cap(chi, cap)?;
    let q = chi.modulus() as usize;
    let p = prefix(&chi.period(), q + 1);
    Ok((1..=q).map(|n| p[n + 1].abs()).collect())
}

/// Tent weight `max(0, 1 - |t - 1|)`, zero at `t = 0` and `t = 2`.
#[inline]
pub fn tent(t: f64) -> f64 {
    (1.0 - (t - 1.0).abs()).max(0.0)
}

/// `Σ_{M≤n≤M+2N} χ(n) H((n - M)/N)` for real `M` and `N > 0`.
pub fn tent_sum(chi: &QuadChar, m: f64, n: f64) -> f64 {
    let start = m.ceil().max(0.0) as u64;
    let end = (m + 2.0 * n).floor().max(0.0) as u64;
    let q = chi.modulus();
    let period = chi.period();
    (start..=end)
        .map(|k| period[(k % q) as usize] as f64 * tent((k as f64 - m) / n))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::fundamental_discriminants;
    use rand::{Rng, SeedableRng};

    /// O(q²) scan over every interval of one doubled period.
    fn brute_force_max(chi: &QuadChar) -> i64 {
        let q = chi.modulus();
        let mut best = 0;
        for a in 0..q {
            let mut s = 0i64;
            for b in a..a + q {
                s += chi.eval(b) as i64;
                best = best.max(s.abs());
            }
        }
        best
    }

    #[test]
    fn fs_values() {
        let v = pv_bound_fs(100.0).unwrap();
        let expected = 10.0 * (100f64.ln() + 6.0) / (PI * 2f64.sqrt()) + 10.0;
        assert!((v - expected).abs() < 1e-10);
        assert!((v - 33.87).abs() < 0.01);
        assert!(pv_bound_fs(99.0).is_err());
        for q in [100.0, 7e22, 2e23, 5e50, 1e300] {
            let direct = pv_bound_fs(q).unwrap().ln();
            assert!((ln_pv_bound_fs(q.ln()) - direct).abs() <= 3e-12 * direct);
        }
    }

    #[test]
    fn lapkova_values() {
        let s = 5f64.sqrt();
        let generic = 2.0 / (PI * PI) * s * 5f64.ln() + 0.9467 * s + 1.668;
        let v = pv_bound_lapkova(5.0, Parity::Even, false).unwrap();
        assert!((v - generic).abs() < 1e-10);
        assert!((v - 4.51).abs() < 0.01);
        let half = pv_bound_lapkova(5.0, Parity::Even, true).unwrap();
        assert!((half - v / 2.0).abs() < 1e-10);
        assert!(pv_bound_lapkova(3.0, Parity::Odd, true).is_err());
        assert!(pv_bound_lapkova(3.0, Parity::Odd, false).unwrap() >= 1.0);
        assert!(pv_bound_lapkova(1.0, Parity::Odd, false).is_err());
        for q in [3.0, 5e3, 2e23] {
            for parity in [Parity::Even, Parity::Odd] {
                let direct = pv_bound_lapkova(q, parity, false).unwrap().ln();
                assert!((ln_pv_bound_lapkova(q.ln(), parity) - direct).abs() <= 3e-12 * direct);
            }
        }
    }

    #[test]
    fn smoothed_and_window_values() {
        assert_eq!(smoothed_pv_bound(101.0, 101.0).unwrap(), 0.0);
        let v = smoothed_pv_bound(101.0, 50.0).unwrap();
        assert!((v - (101f64.sqrt() - 50.0 / 101f64.sqrt())).abs() < 1e-10);
        assert!((v - 5.074).abs() < 1e-3);
        assert!(smoothed_pv_bound(101.0, 0.0).is_err());
        assert!(smoothed_pv_bound(101.0, 102.0).is_err());

        let w = window_bound(5.0, 5.0, Parity::Odd).unwrap();
        assert!((w - (10f64.sqrt() * 5f64.powf(0.25) + 5f64.sqrt())).abs() < 1e-10);
        assert!((w - 6.965).abs() < 1e-3);
        assert!(window_bound(5.0, 6.0, Parity::Odd).is_err());
        for q in [2.0, 3.0, 1000.0] {
            assert!(window_bound(q, 1e-9, Parity::Odd).unwrap() >= q.sqrt());
            assert!(window_bound(q, 1e-9, Parity::Even).unwrap() >= 0.5 * q.sqrt());
        }
    }

    #[test]
    fn monotonicity_in_n() {
        let q = 997.0;
        let ns: Vec<f64> = (1..=100).map(|i| i as f64 * q / 100.0).collect();
        for w in ns.windows(2) {
            assert!(smoothed_pv_bound(q, w[1]).unwrap() < smoothed_pv_bound(q, w[0]).unwrap());
            for p in [Parity::Even, Parity::Odd] {
                assert!(window_bound(q, w[1], p).unwrap() > window_bound(q, w[0], p).unwrap());
            }
        }
    }

    #[test]
    fn small_characters() {
        let m3 = brute_max_interval_sum(&QuadChar::new(-3).unwrap(), 100).unwrap();
        assert_eq!(m3.max_abs, 1);
        let m4 = brute_max_interval_sum(&QuadChar::new(-4).unwrap(), 100).unwrap();
        assert_eq!(m4.max_abs, 1);
        let big = QuadChar::new(-3011).unwrap();
        assert!(matches!(
            brute_max_interval_sum(&big, DEFAULT_ORACLE_CAP),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn prefix_trick_matches_quadratic_scan() {
        for d in fundamental_discriminants(400) {
            let chi = QuadChar::new(d).unwrap();
            let fast = brute_max_interval_sum(&chi, 400).unwrap();
            assert_eq!(fast.max_abs, brute_force_max(&chi), "d = {d}");
            let s: i64 = (fast.start..=fast.end).map(|n| chi.eval(n) as i64).sum();
            assert_eq!(s.abs(), fast.max_abs, "argmax interval, d = {d}");
            let windows = max_window_sums(&chi, 400).unwrap();
            assert_eq!(*windows.iter().max().unwrap(), fast.max_abs);
        }
    }

    #[test]
    fn tent_weight_support() {
        assert_eq!(tent(0.0), 0.0);
        assert_eq!(tent(2.0), 0.0);
        assert_eq!(tent(1.0), 1.0);
        assert_eq!(tent(-0.5), 0.0);
        assert_eq!(tent(0.25), 0.25);
        let chi = QuadChar::new(-4).unwrap();
        // n = 1, 2, 3 with weights 1/2, 1, 1/2 around M = 0, N = 2
        assert!((tent_sum(&chi, 0.0, 2.0) - (0.5 * 1.0 + 0.0 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn window_bounds_and_block_estimate_dominate_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for d in fundamental_discriminants(600) {
            let chi = QuadChar::new(d).unwrap();
            let q = chi.modulus() as f64;
            match chi.parity() {
                Parity::Odd => {
                    for (i, w) in max_window_sums(&chi, 600).unwrap().iter().enumerate() {
                        let n = (i + 1) as f64;
                        assert!(*w as f64 <= window_bound(q, n, Parity::Odd).unwrap());
                    }
                }
                Parity::Even => {
                    for (i, s) in prefix_abs_sums(&chi, 600).unwrap().iter().enumerate() {
                        let n = (i + 1) as f64;
                        assert!(*s as f64 <= window_bound(q, n, Parity::Even).unwrap());
                    }
                }
            }
            for _ in 0..5 {
                let m: u64 = rng.gen_range(0..chi.modulus());
                let n: u64 = rng.gen_range(1..=chi.modulus());
                let s: i64 = (m + 1..=m + n).map(|k| chi.eval(k) as i64).sum();
                assert!(s.abs() as f64 <= block_tent_bound(q, n as f64), "d={d} M={m} N={n}");
            }
        }
    }
}
