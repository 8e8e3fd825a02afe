//! Certification of `L(1, χ) <= c log q` for all `q >= q₀`.
//!
//! Given a modulus threshold `q₀`, a multiplier `B` (the smoothing length is
//! `H = B V`) and a parity, [`assemble_params`] evaluates the shift `a`, the
//! error terms `ε₁`, `ε₂` and the auxiliary constants. [`solve_theta_star`]
//! finds the smallest `θ ∈ [1/2, 1/√e]` with
//!
//! ```text
//! g(θ) = 2aθ log θ - 2θ(1/√e - θ)(2 + log θ) + ε₁ + ε₂ >= 0
//! ```
//!
//! and [`certify`] turns it into the coefficient
//! `2(1 - θ*)(log B + log V₀)/log q₀ + 1/(B log q₀)`.
//!
//! Rounding directions: `ε₁`, `ε₂`, `R_χ`, `V₀` and the coefficient are
//! rounded up, `a` (negative) is rounded toward zero, `θ*` is rounded down.

use std::f64::consts::{LN_10, SQRT_2};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::character::Parity;
use crate::charsum::{ln_pv_bound_fs, ln_pv_bound_lapkova};
use crate::consts::{EULER_GAMMA, INV_SQRT_E};
use crate::error::{invalid, Error, Result};
use crate::rounding::{round_up, round_up_sum};

/// Absolute tolerance of the bisection for `θ*`.
pub const THETA_TOL: f64 = 1e-13;

/// Points in the preliminary sign scan of `g` over `[1/2, 1/√e]`.
pub const SCAN_POINTS: usize = 64;

/// Largest `log10 q₀` considered by [`min_q0`].
pub const MAX_LOG10_Q0: f64 = 300.0;

/// Smallest admissible `B` (the weakest `A₂ = √2` choice needs
/// `B >= √2 / 2.04`).
pub const MIN_B: f64 = SQRT_2 / 2.04;

pub const MAX_SWEEP_B: f64 = 1e4;

/// A modulus carried through its natural logarithm, so thresholds such as
/// `5e50` or `1e300` keep an exact `log q`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Modulus {
    ln: f64,
    /// Nearest `f64` to `q` (infinite beyond the `f64` range).
    value: f64,
}

impl Modulus {
    pub fn from_ln(ln: f64) -> Self {
        Modulus { ln, value: ln.exp() }
    }

    pub fn from_log10(log10: f64) -> Self {
        Modulus::from_ln(log10 * LN_10)
    }

    pub fn from_f64(q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(invalid(format!("modulus must be positive and finite, got {q}")));
        }
        Ok(Modulus { ln: q.ln(), value: q })
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    pub fn log10(self) -> f64 {
        self.ln / LN_10
    }

    /// `q` as a float (finite for `q <= 1.7e308`).
    pub fn value(self) -> f64 {
        self.value
    }
}

impl FromStr for Modulus {
    type Err = Error;

    /// Parses `2e23`, `5E50`, `7.5e22` or a plain decimal. The logarithm is
    /// `log(mantissa) + exponent · log 10`, so exponents up to the `i32`
    /// range never overflow.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || invalid(format!("cannot parse modulus `{s}`"));
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let m: f64 = mantissa.parse().map_err(|_| bad())?;
        if !(m > 0.0 && m.is_finite()) {
            return Err(invalid(format!("modulus must be positive, got `{s}`")));
        }
        Ok(Modulus {
            ln: m.ln() + exponent as f64 * LN_10,
            value: s.parse().unwrap_or(f64::INFINITY),
        })
    }
}

/// Which uniform character-sum bound supplies `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VSource {
    /// `√q(log q + 6)/(π√2) + √q`, used for both parities.
    #[default]
    FrolenkovSoundararajan,
    /// Parity-dependent bound for primitive characters. Exploratory only.
    Lapkova,
}

impl VSource {
    pub fn ln_v(self, ln_q: f64, parity: Parity) -> f64 {
        match self {
            VSource::FrolenkovSoundararajan => ln_pv_bound_fs(ln_q),
            VSource::Lapkova => ln_pv_bound_lapkova(ln_q, parity),
        }
    }
}

/// The `ψ`-error coefficient allowed for a given `B`.
pub fn a2_for(b: f64) -> f64 {
    if b >= 79.5 {
        0.94
    } else if b >= 39.6 {
        0.956
    } else {
        SQRT_2
    }
}

/// `δ(χ) = (3 - χ(-1))/4`.
pub fn delta_chi(parity: Parity) -> f64 {
    (3.0 - parity.sign() as f64) / 4.0
}

/// `R_χ(H, V, q)` from logarithms of its arguments.
pub fn r_chi_ln(ln_h: f64, ln_v: f64, ln_q: f64, parity: Parity) -> Result<f64> {
    let log_v2_q = 2.0 * ln_v - ln_q;
    let (shift, inner_const, v_weight) = match parity {
        Parity::Even => (3.66, 4f64.ln() + 2.0, 0.5),
        Parity::Odd => (7.2, 2f64.ln() + 2.0, 1.0),
    };
    let log_inner = inner_const + 0.5 * ln_q + ln_h - 2.0 * ln_v;
    if !(log_v2_q > 0.0) {
        return Err(Error::OutsideRegime(format!(
            "log(V^2/q) = {log_v2_q} <= 0"
        )));
    }
    if !(log_inner > 0.0) {
        return Err(Error::OutsideRegime(format!(
            "log of the H-dependent argument = {log_inner} <= 0"
        )));
    }
    let sqrt_q_over_h = (0.5 * ln_q - ln_h).exp();
    let v_over_h = (ln_v - ln_h).exp();
    Ok(round_up_sum(&[
        (shift + log_v2_q) * sqrt_q_over_h,
        log_inner * v_over_h * v_weight,
    ]))
}

/// `R_χ(H, V, q)`: even `(3.66 + log(V²/q))√q/H + log(4e²√q H/V²) V/(2H)`,
/// odd `(7.2 + log(V²/q))√q/H + log(2e²√q H/V²) V/H`.
pub fn r_chi(h: f64, v: f64, q: f64, parity: Parity) -> Result<f64> {
    if !(h > 0.0 && v > 0.0 && q > 0.0) {
        return Err(invalid(format!("R_chi needs H, V, q > 0, got ({h}, {v}, {q})")));
    }
    r_chi_ln(h.ln(), v.ln(), q.ln(), parity)
}

/// Everything the θ* solver needs, plus the quantities it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StephensParams {
    pub q0: f64,
    pub ln_q0: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub parity: Parity,
    pub v_source: VSource,
    #[serde(rename = "V0")]
    pub v0: f64,
    pub ln_v0: f64,
    #[serde(rename = "H0")]
    pub h0: f64,
    pub a: f64,
    pub eps1: f64,
    pub eps2: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
    pub delta_chi: f64,
    pub r_chi: f64,
}

impl StephensParams {
    /// `log H₀ = log B + log V₀`.
    pub fn ln_h0(&self) -> f64 {
        self.b.ln() + self.ln_v0
    }
}

pub fn assemble_params(q0: Modulus, b: f64, parity: Parity) -> Result<StephensParams> {
    assemble_params_with(q0, b, parity, VSource::default())
}

pub fn assemble_params_with(
    q0: Modulus,
    b: f64,
    parity: Parity,
    v_source: VSource,
) -> Result<StephensParams> {
    let ln_q0 = q0.ln();
    if !(ln_q0 >= 100f64.ln()) {
        return Err(invalid(format!("q0 >= 100 violated: q0 = {}", q0.value())));
    }
    if !(b >= MIN_B && b.is_finite()) {
        return Err(invalid(format!("B >= sqrt(2)/2.04 violated: B = {b}")));
    }
    let ln_v0 = v_source.ln_v(ln_q0, parity);
    let ln_h0 = b.ln() + ln_v0;
    if !(ln_h0 >= 1e6f64.ln()) {
        return Err(invalid(format!(
            "B*V0 >= 1e6 violated: B*V0 = {}",
            ln_h0.exp()
        )));
    }
    if b < 1.0 {
        return Err(invalid(format!("H0 = B*V0 >= V0 violated: B = {b} < 1")));
    }
    let l = ln_h0;
    let a2 = a2_for(b);
    let delta = delta_chi(parity);
    let r = r_chi_ln(ln_h0, ln_v0, ln_q0, parity)?;
    // a < 0: adding |a| * inflation moves it toward zero
    let a = round_up((EULER_GAMMA - 1.0) / l);
    let eps2 = round_up(1.411 / (l * l));
    let eps1 = round_up_sum(&[
        delta / b,
        -delta / (b * l),
        -1.15 / l,
        3.81 * a2.powf(2.0 / 3.0) * b.powf(-1.0 / 3.0) / l,
        -1.0 / (b * l),
        r / l,
    ]);
    let d = (a2 / 2.04 * b).powf(2.0 / 3.0);
    Ok(StephensParams {
        q0: q0.value(),
        ln_q0,
        b,
        parity,
        v_source,
        v0: ln_v0.exp(),
        ln_v0,
        h0: ln_h0.exp(),
        a,
        eps1,
        eps2,
        a2,
        d,
        d0: d,
        delta_chi: delta,
        r_chi: r,
    })
}

/// `g(θ) = 2aθ log θ - 2θ(1/√e - θ)(2 + log θ) + ε₁ + ε₂`.
#[inline]
pub fn theta_inequality_lhs(theta: f64, a: f64, eps1: f64, eps2: f64) -> f64 {
    let l = theta.ln();
    2.0 * a * theta * l - 2.0 * theta * (INV_SQRT_E - theta) * (2.0 + l) + eps1 + eps2
}

/// `φ(y) = 2(y - y log y - θ)`, increasing on `(0, 1]`.
pub fn phi(y: f64, theta: f64) -> f64 {
    2.0 * (y - y * y.ln() - theta)
}

/// Closed form of
/// `-4∫_θ^x (x-u) log u du + 2∫_{x-θ}^θ u du + ∫_θ^x 2θ du`.
pub fn aux_closed_form(theta: f64, x: f64) -> f64 {
    2.0 * x * (x - x * x.ln() - theta) + (2.0 * x - theta) * theta * (1.0 + 2.0 * theta.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaBranch {
    /// `g(1/2) >= 0`.
    LowerEndpoint,
    /// A sign change of `g` was bracketed and bisected.
    Root,
    /// `g < 0` on the whole interval: the alternative `G(1) <= 2(1 - 1/√e)`
    /// holds and θ* is taken as `1/√e`.
    UpperEndpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    /// Index of the first scan point with `g >= 0`.
    pub first_nonnegative_scan: Option<usize>,
    /// Brackets `[lo, hi]` with `g(lo) < 0 <= g(hi)`, one per bisection step.
    pub brackets: Vec<[f64; 2]>,
    pub g_at_star: f64,
    pub g_at_star_minus_2tol: f64,
    /// Upper end of the final bracket, where `g >= 0`.
    pub bracket_hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaCertificate {
    pub theta_star: f64,
    pub branch: ThetaBranch,
    pub coefficient: Option<f64>,
    pub target_c: Option<f64>,
    pub margin: Option<f64>,
    pub pass: Option<bool>,
    pub params: StephensParams,
    pub trace: SolverTrace,
}

/// Smallest `θ ∈ [1/2, 1/√e]` with `g(θ) >= 0`, rounded down by one
/// tolerance step when found by bisection.
pub fn solve_theta(a: f64, eps1: f64, eps2: f64) -> (f64, ThetaBranch, SolverTrace) {
    let g = |t: f64| theta_inequality_lhs(t, a, eps1, eps2);
    let lo0 = 0.5;
    let hi0 = INV_SQRT_E;
    let finish = |theta: f64, branch, first, brackets, bracket_hi| {
        let trace = SolverTrace {
            first_nonnegative_scan: first,
            brackets,
            g_at_star: g(theta),
            g_at_star_minus_2tol: g(theta - 2.0 * THETA_TOL),
            bracket_hi,
        };
        (theta, branch, trace)
    };
    if g(lo0) >= 0.0 {
        return finish(lo0, ThetaBranch::LowerEndpoint, Some(0), Vec::new(), None);
    }
    let step = (hi0 - lo0) / SCAN_POINTS as f64;
    let scan = |i: usize| if i == SCAN_POINTS { hi0 } else { lo0 + step * i as f64 };
    let Some(first) = (1..=SCAN_POINTS).find(|&i| g(scan(i)) >= 0.0) else {
        return finish(hi0, ThetaBranch::UpperEndpoint, None, Vec::new(), None);
    };
    let (mut lo, mut hi) = (scan(first - 1), scan(first));
    let mut brackets = vec![[lo, hi]];
    while hi - lo > THETA_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        brackets.push([lo, hi]);
    }
    let theta = (hi - THETA_TOL).max(lo0);
    finish(theta, ThetaBranch::Root, Some(first), brackets, Some(hi))
}

/// θ* for assembled parameters; the coefficient is left unset.
pub fn solve_theta_star(params: &StephensParams) -> ThetaCertificate {
    let (theta_star, branch, trace) = solve_theta(params.a, params.eps1, params.eps2);
    ThetaCertificate {
        theta_star,
        branch,
        coefficient: None,
        target_c: None,
        margin: None,
        pass: None,
        params: params.clone(),
        trace,
    }
}

/// `2(1 - θ*)(log B + log V₀)/log q₀ + 1/(B log q₀)`, rounded up.
pub fn certified_coefficient(theta_star: f64, params: &StephensParams) -> f64 {
    round_up_sum(&[
        2.0 * (1.0 - theta_star) * params.ln_h0() / params.ln_q0,
        1.0 / (params.b * params.ln_q0),
    ])
}

pub fn certify(q0: Modulus, b: f64, parity: Parity, target_c: f64) -> Result<ThetaCertificate> {
    certify_with(q0, b, parity, target_c, VSource::default())
}

pub fn certify_with(
    q0: Modulus,
    b: f64,
    parity: Parity,
    target_c: f64,
    v_source: VSource,
) -> Result<ThetaCertificate> {
    if !(target_c > 0.0 && target_c.is_finite()) {
        return Err(invalid(format!("target c must be positive, got {target_c}")));
    }
    let params = assemble_params_with(q0, b, parity, v_source)?;
    let mut cert = solve_theta_star(&params);
    let coefficient = certified_coefficient(cert.theta_star, &params);
    cert.coefficient = Some(coefficient);
    cert.target_c = Some(target_c);
    cert.margin = Some(target_c - coefficient);
    cert.pass = Some(coefficient <= target_c);
    Ok(cert)
}

/// Smallest `log10 q₀` for which `B V(q₀) >= 10^6` (and `q₀ >= 100`).
pub fn domain_floor_log10(b: f64, parity: Parity, v_source: VSource) -> Result<f64> {
    if !(b >= 1.0 && b.is_finite()) {
        return Err(invalid(format!("B >= 1 needed so that H0 >= V0, got {b}")));
    }
    let need = 1e6f64.ln() - b.ln();
    let ok = |log10: f64| v_source.ln_v(log10 * LN_10, parity) >= need;
    let mut lo = 2.0;
    if ok(lo) {
        return Ok(lo);
    }
    let mut hi = MAX_LOG10_Q0;
    if !ok(hi) {
        return Err(invalid(format!("B*V0 >= 1e6 unreachable below 1e300 for B = {b}")));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinQ0 {
    #[serde(rename = "B")]
    pub b: f64,
    pub parity: Parity,
    pub target_c: f64,
    pub log10_q0: f64,
    pub certificate: ThetaCertificate,
}

/// Grid spacing of [`min_q0`] in `log10 q₀`.
pub const MIN_Q0_STEP: f64 = 0.01;

pub fn min_q0(b: f64, parity: Parity, target_c: f64) -> Result<MinQ0> {
    min_q0_with(b, parity, target_c, VSource::default())
}

/// Smallest grid point `q₀` (step 0.01 in `log10`, starting at the domain
/// floor) where certification passes both at `q₀` and at ten larger spot
/// checks up to `10^300`. Monotonicity in `q₀` is checked, not assumed.
pub fn min_q0_with(b: f64, parity: Parity, target_c: f64, v_source: VSource) -> Result<MinQ0> {
    let floor = domain_floor_log10(b, parity, v_source)?;
    // a point where R_χ leaves its regime cannot be certified, which is not an error here
    let passes = |log10: f64| -> Result<Option<ThetaCertificate>> {
        match certify_with(Modulus::from_log10(log10), b, parity, target_c, v_source) {
            Ok(c) if c.pass == Some(true) => Ok(Some(c)),
            Ok(_) | Err(Error::OutsideRegime(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let steps = ((MAX_LOG10_Q0 - floor) / MIN_Q0_STEP).floor() as usize;
    for k in 0..=steps {
        let x = floor + MIN_Q0_STEP * k as f64;
        let Some(cert) = passes(x)? else { continue };
        let mut all = true;
        for j in 1..=10 {
            let y = x + (MAX_LOG10_Q0 - x) * j as f64 / 10.0;
            if passes(y)?.is_none() {
                all = false;
                break;
            }
        }
        if all {
            return Ok(MinQ0 {
                b,
                parity,
                target_c,
                log10_q0: x,
                certificate: cert,
            });
        }
    }
    Err(Error::Unattainable {
        b,
        target_c,
        max_log10: MAX_LOG10_Q0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "B")]
    pub b: f64,
    /// `None` when no `q₀ <= 10^300` certifies the target.
    pub log10_min_q0: Option<f64>,
    pub theta_star: Option<f64>,
    pub coefficient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub parity: Parity,
    pub target_c: f64,
    pub rows: Vec<SweepRow>,
    /// `B` with the smallest threshold (first one on ties).
    pub argmin_b: Option<f64>,
    pub min_log10_q0: Option<f64>,
}

pub fn sweep_b(parity: Parity, target_c: f64, grid: &[f64]) -> Result<SweepTable> {
    sweep_b_with(parity, target_c, grid, VSource::default())
}

pub fn sweep_b_with(
    parity: Parity,
    target_c: f64,
    grid: &[f64],
    v_source: VSource,
) -> Result<SweepTable> {
    if let Some(b) = grid.iter().find(|b| !(**b >= MIN_B && **b <= MAX_SWEEP_B)) {
        return Err(invalid(format!(
            "grid value B = {b} outside [sqrt(2)/2.04, 1e4]"
        )));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let rows: Vec<SweepRow> = sorted
        .par_iter()
        .map(|&b| match min_q0_with(b, parity, target_c, v_source) {
            Ok(m) => SweepRow {
                b,
                log10_min_q0: Some(m.log10_q0),
                theta_star: Some(m.certificate.theta_star),
                coefficient: m.certificate.coefficient,
            },
            Err(_) => SweepRow {
                b,
                log10_min_q0: None,
                theta_star: None,
                coefficient: None,
            },
        })
        .collect();
    let best = rows
        .iter()
        .filter_map(|r| r.log10_min_q0.map(|x| (r.b, x)))
        .fold(None, |acc: Option<(f64, f64)>, (b, x)| match acc {
            Some((_, bx)) if bx <= x => acc,
            _ => Some((b, x)),
        });
    Ok(SweepTable {
        parity,
        target_c,
        rows,
        argmin_b: best.map(|p| p.0),
        min_log10_q0: best.map(|p| p.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charsum::pv_bound_fs;
    use rand::{Rng, SeedableRng};

    /// Direct transcription of `R_χ` in plain floating point.
    fn r_chi_direct(h: f64, v: f64, q: f64, parity: Parity) -> f64 {
        let e2 = std::f64::consts::E.powi(2);
        match parity {
            Parity::Even => {
                (3.66 + (v * v / q).ln()) * q.sqrt() / h
                    + (4.0 * e2 * q.sqrt() * h / (v * v)).ln() * v / (2.0 * h)
            }
            Parity::Odd => {
                (7.2 + (v * v / q).ln()) * q.sqrt() / h
                    + (2.0 * e2 * q.sqrt() * h / (v * v)).ln() * v / h
            }
        }
    }

    #[test]
    fn modulus_parsing() {
        let q: Modulus = "2e23".parse().unwrap();
        assert!((q.ln() - (2f64.ln() + 23.0 * LN_10)).abs() < 1e-14);
        let q: Modulus = "5E50".parse().unwrap();
        assert!((q.log10() - (50.0 + 5f64.log10())).abs() < 1e-13);
        let q: Modulus = "1e300".parse().unwrap();
        assert!((q.log10() - 300.0).abs() < 1e-12);
        let q: Modulus = "1000".parse().unwrap();
        assert!((q.value() - 1000.0).abs() < 1e-9);
        let q: Modulus = "1e400".parse().unwrap();
        assert!((q.log10() - 400.0).abs() < 1e-12);
        for bad in ["", "e5", "-3e4", "abc", "2e", "0"] {
            assert!(bad.parse::<Modulus>().is_err(), "{bad}");
        }
    }

    #[test]
    fn a2_thresholds() {
        assert_eq!(a2_for(90.0), 0.94);
        assert_eq!(a2_for(79.5), 0.94);
        assert_eq!(a2_for(50.0), 0.956);
        assert_eq!(a2_for(39.6), 0.956);
        assert_eq!(a2_for(39.5), SQRT_2);
        assert_eq!(a2_for(MIN_B), SQRT_2);
    }

    #[test]
    fn r_chi_matches_direct_formula() {
        let q = 1e6;
        let v = pv_bound_fs(q).unwrap();
        for parity in [Parity::Even, Parity::Odd] {
            let r = r_chi(90.0 * v, v, q, parity).unwrap();
            let direct = r_chi_direct(90.0 * v, v, q, parity);
            assert!((r - direct).abs() <= 3e-12 * direct, "{parity}: {r} vs {direct}");
        }
        // value at the odd 1/2 setting
        let q0: Modulus = "2e23".parse().unwrap();
        let v0 = pv_bound_fs(q0.value()).unwrap();
        let r = r_chi(90.0 * v0, v0, q0.value(), Parity::Odd).unwrap();
        assert!((r - r_chi_direct(90.0 * v0, v0, q0.value(), Parity::Odd)).abs() < 1e-12);
    }

    #[test]
    fn r_chi_vanishes_as_h_grows() {
        let (v, q) = (50.0, 100.0);
        let mut prev = f64::INFINITY;
        for k in 1..12 {
            let r = r_chi(v * 10f64.powi(k), v, q, Parity::Odd).unwrap();
            assert!(r > 0.0 && r < prev);
            prev = r;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn r_chi_regime_guard() {
        // V^2 < q
        assert!(matches!(r_chi(1e3, 5.0, 100.0, Parity::Even), Err(Error::OutsideRegime(_))));
        // tiny H makes the inner logarithm negative
        assert!(matches!(r_chi(1e-6, 50.0, 100.0, Parity::Odd), Err(Error::OutsideRegime(_))));
        assert!(r_chi(-1.0, 50.0, 100.0, Parity::Odd).is_err());
    }

    #[test]
    fn assembly() {
        let q0: Modulus = "2e23".parse().unwrap();
        let p = assemble_params(q0, 90.0, Parity::Odd).unwrap();
        assert_eq!(p.a2, 0.94);
        assert!(p.a < 0.0 && p.eps2 > 0.0);
        assert!(p.h0 >= p.v0.max(1e6));
        assert!((p.d - (0.94 / 2.04 * 90.0f64).powf(2.0 / 3.0)).abs() < 1e-12);
        assert_eq!(p.delta_chi, 1.0);
        assert!((p.v0 - pv_bound_fs(q0.value()).unwrap()).abs() <= 1e-10 * p.v0);
        let l = (90.0 * p.v0).ln();
        let raw_a = (EULER_GAMMA - 1.0) / l;
        assert!(p.a >= raw_a && p.a - raw_a <= 2e-12 * raw_a.abs());
        let raw_e2 = 1.411 / (l * l);
        assert!(p.eps2 >= raw_e2 && p.eps2 - raw_e2 <= 2e-12 * raw_e2);

        let p = assemble_params(q0, 50.0, Parity::Even).unwrap();
        assert_eq!(p.a2, 0.956);
        assert_eq!(p.delta_chi, 0.5);
    }

    #[test]
    fn assembly_rejects_bad_inputs() {
        let q0: Modulus = "2e23".parse().unwrap();
        let msg = |r: Result<StephensParams>| match r {
            Err(Error::InvalidArgument(m)) => m,
            other => panic!("{other:?}"),
        };
        assert!(msg(assemble_params(Modulus::from_f64(50.0).unwrap(), 90.0, Parity::Odd))
            .contains("q0 >= 100"));
        assert!(msg(assemble_params(q0, 0.5, Parity::Odd)).contains("B >= sqrt(2)/2.04"));
        assert!(msg(assemble_params(Modulus::from_f64(1e4).unwrap(), 90.0, Parity::Odd))
            .contains("B*V0 >= 1e6"));
        assert!(msg(assemble_params(q0, 0.8, Parity::Odd)).contains("H0"));
    }

    #[test]
    fn g_special_values() {
        let (a, e1, e2) = (-0.01, 0.003, 0.001);
        let at_top = theta_inequality_lhs(INV_SQRT_E, a, e1, e2);
        assert!((at_top - (-a * INV_SQRT_E + e1 + e2)).abs() < 1e-15);
        let g = theta_inequality_lhs(0.5, 0.0, 0.0, 0.0);
        assert!(g < 0.0);
        let expected = -2.0 * 0.5 * (INV_SQRT_E - 0.5) * (2.0 - 2f64.ln());
        assert!((g - expected).abs() < 1e-15);
        let delta = 0.0123;
        for t in [0.5, 0.55, 0.6] {
            let base = theta_inequality_lhs(t, a, e1, e2);
            assert!((theta_inequality_lhs(t, a, e1 + delta, e2) - (base + delta)).abs() < 1e-15);
        }
    }

    #[test]
    fn lower_endpoint_branch() {
        let a = -0.02;
        let need = 2.0 * 0.5 * (INV_SQRT_E - 0.5) * (2.0 - 2f64.ln()) - 2.0 * a * 0.5 * 0.5f64.ln();
        let (t, branch, _) = solve_theta(a, need, 1e-9);
        assert_eq!(branch, ThetaBranch::LowerEndpoint);
        assert_eq!(t, 0.5);
    }

    #[test]
    fn upper_endpoint_branch() {
        let (t, branch, trace) = solve_theta(-0.01, -0.1, 0.0);
        assert_eq!(branch, ThetaBranch::UpperEndpoint);
        assert_eq!(t, INV_SQRT_E);
        assert!(trace.g_at_star < 0.0);
    }

    #[test]
    fn solver_matches_dense_grid() {
        let (a, e1, e2) = (-0.01, -0.002, 0.001);
        let (t, branch, trace) = solve_theta(a, e1, e2);
        assert_eq!(branch, ThetaBranch::Root);
        let n = 10_000_000usize;
        let h = (INV_SQRT_E - 0.5) / n as f64;
        let grid = (0..=n)
            .map(|i| 0.5 + h * i as f64)
            .find(|&x| theta_inequality_lhs(x, a, e1, e2) >= 0.0)
            .unwrap();
        assert!((t - grid).abs() < 1e-6, "{t} vs {grid}");
        assert!(t <= grid);
        // certificate replay
        assert_eq!(trace.g_at_star, theta_inequality_lhs(t, a, e1, e2));
        assert!(trace.g_at_star < 0.0);
        assert!(trace.g_at_star_minus_2tol < 0.0);
        let hi = trace.bracket_hi.unwrap();
        assert!(theta_inequality_lhs(hi, a, e1, e2) >= 0.0);
        assert!(hi - t <= THETA_TOL + 1e-15);
        for w in trace.brackets.windows(2) {
            assert!(w[1][0] >= w[0][0] && w[1][1] <= w[0][1]);
        }
    }

    #[test]
    fn phi_is_increasing() {
        let theta = 0.55;
        let ys: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
        for w in ys.windows(2) {
            assert!(phi(w[1], theta) > phi(w[0], theta));
        }
        assert!((phi(theta, theta) + 2.0 * theta * theta.ln()).abs() < 1e-15);
    }

    #[test]
    fn theta_monotone_in_eps() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let a: f64 = rng.gen_range(-0.05..0.0);
            let mut prev = f64::INFINITY;
            for k in 0..40 {
                let eps = -0.02 + 0.001 * k as f64;
                let (t, _, _) = solve_theta(a, eps, 0.0);
                assert!(t <= prev + 1e-15);
                prev = t;
            }
        }
    }

    #[test]
    fn certify_far_below_threshold_fails() {
        let c = certify("1e10".parse().unwrap(), 90.0, Parity::Odd, 0.5).unwrap();
        assert_eq!(c.pass, Some(false));
        assert!(c.margin.unwrap() < 0.0);
        assert!(certify("1e10".parse().unwrap(), 90.0, Parity::Odd, 0.0).is_err());
    }

    #[test]
    fn coefficient_nonincreasing_in_q0() {
        for (b, parity) in [(51.0, Parity::Even), (90.0, Parity::Odd), (145.0, Parity::Odd)] {
            let mut prev = f64::INFINITY;
            for k in 0..200 {
                let x = 12.0 + k as f64;
                let c = certify(Modulus::from_log10(x), b, parity, 0.5).unwrap();
                let coef = c.coefficient.unwrap();
                assert!(coef <= prev, "B={b} log10 q0={x}");
                prev = coef;
            }
        }
    }

    #[test]
    fn trivial_target_gives_domain_floor() {
        for (b, parity) in [(90.0, Parity::Odd), (51.0, Parity::Even)] {
            let floor = domain_floor_log10(b, parity, VSource::default()).unwrap();
            let m = min_q0(b, parity, 2.0).unwrap();
            assert_eq!(m.log10_q0, floor);
            let p = &m.certificate.params;
            assert!(p.h0 >= 1e6 * (1.0 - 1e-9));
        }
    }

    #[test]
    fn sweep_argmin_and_refinement() {
        let coarse = [60.0, 90.0, 120.0];
        let fine: Vec<f64> = coarse.iter().copied().chain([70.0, 80.0, 100.0, 110.0]).collect();
        let a = sweep_b(Parity::Odd, 0.5, &coarse).unwrap();
        let b = sweep_b(Parity::Odd, 0.5, &fine).unwrap();
        let min_rows = a.rows.iter().filter_map(|r| r.log10_min_q0).fold(f64::INFINITY, f64::min);
        assert_eq!(a.min_log10_q0, Some(min_rows));
        assert!(b.min_log10_q0.unwrap() <= a.min_log10_q0.unwrap());
        assert!(sweep_b(Parity::Odd, 0.5, &[0.1]).is_err());
        assert!(sweep_b(Parity::Odd, 0.5, &[2e4]).is_err());
        let rows: Vec<f64> = b.rows.iter().map(|r| r.b).collect();
        let mut sorted = rows.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(rows, sorted);
    }

    #[test]
    fn unattainable_target() {
        let r = min_q0(2.0, Parity::Odd, 0.05);
        assert!(matches!(r, Err(Error::Unattainable { .. })), "{r:?}");
    }
}
