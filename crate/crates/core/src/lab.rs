//! Desk-scale evaluation of the smoothing objects attached to a character.
//!
//! For a smoothing length `H` and `0 <= x <= 1`:
//!
//! ```text
//! f(x) = H^{-x} Σ_{n<=H^x} χ(n)
//! F(x) = ∫_0^x f(t) dt = Σ_{n<=H^x} χ(n)/(n log H) - f(x)/log H
//! ℓ(x) = H^{-x} Σ_{n<=H^x} χ(n) log n
//! h(x) = Σ_{n<=H^x} χ(n)Λ(n)/n
//! ```
//!
//! All of them are step-function sums, so every integral below is evaluated
//! exactly breakpoint by breakpoint.

use serde::{Deserialize, Serialize};

use crate::character::{Parity, QuadChar};
use crate::charsum::{pv_bound_fs, pv_bound_lapkova};
use crate::consts::EULER_GAMMA;
use crate::error::{invalid, Error, Result};
use crate::sieve::{build_sieve, SieveTable};
use crate::sum::NeumaierSum;

/// Largest `H` (and truncation point `T`) accepted by the lab.
pub const DEFAULT_LAB_CAP: u64 = 20_000_000;

/// Largest modulus accepted by [`l1_closed_form`].
pub const DEFAULT_CLOSED_FORM_CAP: u64 = 1_000_000;

/// `H^x` within this relative distance of an integer is snapped to it, so
/// that `x = 1` and integer `H` count `n = H` despite `exp(log H)` rounding.
const SNAP_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LMethod {
    TruncatedSeries,
    GaussSumClosedForm,
}

/// A value of `L(1, χ)` with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LValueResult {
    pub value: f64,
    pub tail_bound: f64,
    pub method: LMethod,
}

impl LValueResult {
    /// Whether two evaluations are compatible within their combined bounds.
    pub fn agrees_with(&self, other: &LValueResult) -> bool {
        (self.value - other.value).abs() <= self.tail_bound + other.tail_bound
    }
}

/// Prefix tables of `χ` up to `⌊H⌋` together with `Λ`.
pub struct SmoothingContext {
    chi: QuadChar,
    h: f64,
    log_h: f64,
    /// `S(n) = Σ_{k<=n} χ(k)`
    s: Vec<i64>,
    /// `Σ_{k<=n} χ(k)/k`
    p: Vec<f64>,
    /// `Σ_{k<=n} χ(k) log k`
    lg: Vec<f64>,
    sieve: SieveTable,
    chi_period: Vec<i8>,
}

impl SmoothingContext {
    pub fn new(chi: QuadChar, h: f64) -> Result<Self> {
        Self::with_cap(chi, h, DEFAULT_LAB_CAP)
    }

    pub fn with_cap(chi: QuadChar, h: f64, cap: u64) -> Result<Self> {
        if !(h > 1.0 && h.is_finite()) {
            return Err(invalid(format!("smoothing length H must exceed 1, got {h}")));
        }
        if h > cap as f64 {
            return Err(Error::CapExceeded {
                what: "smoothing length H",
                value: h,
                cap: cap as f64,
            });
        }
        let n_max = snap_floor(h);
        let chi_period = chi.period();
        let q = chi_period.len() as u64;
        let mut s = Vec::with_capacity(n_max as usize + 1);
        let mut p = Vec::with_capacity(n_max as usize + 1);
        let mut lg = Vec::with_capacity(n_max as usize + 1);
        let (mut run_s, mut run_p, mut run_lg) = (0i64, NeumaierSum::new(), NeumaierSum::new());
        s.push(0);
        p.push(0.0);
        lg.push(0.0);
        for n in 1..=n_max {
            let c = chi_period[(n % q) as usize];
            if c != 0 {
                let c = c as f64;
                run_s += c as i64;
                run_p.push(c / n as f64);
                run_lg.push(c * (n as f64).ln());
            }
            s.push(run_s);
            p.push(run_p.value());
            lg.push(run_lg.value());
        }
        let sieve = build_sieve(n_max.max(2))?;
        Ok(SmoothingContext {
            chi,
            h,
            log_h: h.ln(),
            s,
            p,
            lg,
            sieve,
            chi_period,
        })
    }

    pub fn character(&self) -> QuadChar {
        self.chi
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn log_h(&self) -> f64 {
        self.log_h
    }

    /// `x_m = 1 - log m / log H`.
    pub fn grid_point(&self, m: u64) -> f64 {
        1.0 - (m as f64).ln() / self.log_h
    }

    #[inline]
    fn chi(&self, n: u64) -> i8 {
        self.chi_period[(n % self.chi_period.len() as u64) as usize]
    }

    /// `H^x`, snapped to a nearby integer.
    fn power(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(invalid(format!("x must be finite and >= 0, got {x}")));
        }
        let t = snap((x * self.log_h).exp());
        if t.floor() >= self.s.len() as f64 {
            return Err(Error::CapExceeded {
                what: "H^x",
                value: t,
                cap: (self.s.len() - 1) as f64,
            });
        }
        Ok(t)
    }

    /// `f` at `H^x = t`.
    fn f_at(&self, t: f64) -> f64 {
        self.s[t.floor() as usize] as f64 / t
    }

    /// `F` at `H^x = t`; zero for `t < 1`.
    fn big_f_at(&self, t: f64) -> f64 {
        if t < 1.0 {
            return 0.0;
        }
        let n = t.floor() as usize;
        (self.p[n] - self.s[n] as f64 / t) / self.log_h
    }

    pub fn f(&self, x: f64) -> Result<f64> {
        Ok(self.f_at(self.power(x)?))
    }

    /// `F(x)` by its closed form.
    pub fn big_f(&self, x: f64) -> Result<f64> {
        Ok(self.big_f_at(self.power(x)?))
    }

    /// `F(x)` by integrating the step function `f` between its breakpoints
    /// `log n / log H`.
    pub fn big_f_quadrature(&self, x: f64) -> Result<f64> {
        let t = self.power(x)?;
        let n = t.floor() as usize;
        let mut acc = NeumaierSum::new();
        for k in 1..n {
            acc.push(self.s[k] as f64 * (1.0 / k as f64 - 1.0 / (k + 1) as f64));
        }
        acc.push(self.s[n] as f64 * (1.0 / n as f64 - 1.0 / t));
        Ok(acc.value() / self.log_h)
    }

    /// `ℓ(y) = H^{-y} Σ_{n<=H^y} χ(n) log n`.
    pub fn ell(&self, y: f64) -> Result<f64> {
        let t = self.power(y)?;
        Ok(self.lg[t.floor() as usize] / t)
    }

    /// `ℓ(y)` through `Σ_{m<=H^y} χ(m)Λ(m)/m · f(y - log m/log H)`.
    pub fn ell_convolution(&self, y: f64) -> Result<f64> {
        let t = self.power(y)?;
        let n = t.floor() as u64;
        let mut acc = NeumaierSum::new();
        for m in 2..=n {
            let lam = self.sieve.mangoldt(m);
            if lam == 0.0 {
                continue;
            }
            let c = self.chi(m);
            if c == 0 {
                continue;
            }
            // χ(m)Λ(m)/m · S(⌊t/m⌋)/(t/m)
            acc.push(c as f64 * lam * self.s[(n / m) as usize] as f64);
        }
        Ok(acc.value() / t)
    }

    /// `h(χ, y) = Σ_{n<=H^y} χ(n)Λ(n)/n`.
    pub fn h_chi(&self, y: f64) -> Result<f64> {
        let n = self.power(y)?.floor() as u64;
        let mut acc = NeumaierSum::new();
        for m in 2..=n {
            let lam = self.sieve.mangoldt(m);
            if lam != 0.0 {
                acc.push(self.chi(m) as f64 * lam / m as f64);
            }
        }
        Ok(acc.value())
    }

    /// `h(1, y) = ψ̃(H^y)`.
    pub fn h1(&self, y: f64) -> Result<f64> {
        let n = self.power(y)?.floor() as u64;
        Ok(self.sieve.psi_tilde_at(n))
    }

    /// `∫_0^x f(u) H^u du`, exact over the breakpoints.
    pub fn weighted_integral(&self, x: f64) -> Result<f64> {
        let t = self.power(x)?;
        let n = t.floor() as usize;
        let mut acc = NeumaierSum::new();
        for k in 1..n {
            acc.push(self.s[k] as f64 * (1.0 / k as f64).ln_1p());
        }
        acc.push(self.s[n] as f64 * (t / n as f64).ln());
        Ok(acc.value() / self.log_h)
    }

    /// `|x f(x) - ∫_0^x f(u)H^u du / H^x - Σ_{m<=H^x} χ(m)Λ(m)/(m log H) f(x - log m/log H)|`.
    pub fn check_identity_opt1(&self, x: f64) -> Result<f64> {
        let t = self.power(x)?;
        let lhs = x * self.f_at(t) - self.weighted_integral(x)? / t;
        let rhs = self.ell_convolution(x)? / self.log_h;
        Ok((lhs - rhs).abs())
    }

    /// `1.411/log²H - |xF(x) - Σ_{m<=H^x} Λ(m)(1+χ(m))/(m log H) F(x - log m/log H) - F(x)(1-γ)/log H|`.
    pub fn l7_margin(&self, x: f64) -> Result<f64> {
        self.l7_margin_with(x, 1.0 - EULER_GAMMA)
    }

    /// Same comparison with `F(x)(1+γ)/log H`, the sign obtained by
    /// integrating `ψ̃(u) = log u - γ + Δ(u)` by parts.
    pub fn l7_margin_plus_gamma(&self, x: f64) -> Result<f64> {
        self.l7_margin_with(x, 1.0 + EULER_GAMMA)
    }

    fn l7_margin_with(&self, x: f64, shift: f64) -> Result<f64> {
        let t = self.power(x)?;
        let n = t.floor() as u64;
        let big_f = self.big_f_at(t);
        let mut acc = NeumaierSum::new();
        for m in 2..=n {
            let lam = self.sieve.mangoldt(m);
            if lam == 0.0 {
                continue;
            }
            let w = 1.0 + self.chi(m) as f64;
            if w == 0.0 {
                continue;
            }
            acc.push(lam * w / m as f64 * self.big_f_at(t / m as f64));
        }
        let sum = acc.value() / self.log_h;
        let residual = x * big_f - sum - big_f * shift / self.log_h;
        Ok(1.411 / (self.log_h * self.log_h) - residual.abs())
    }

    /// `∫_0^x F(x-y) dy - Σ_{m<=H^x} Λ(m)/(m log H) F(x - log m/log H)`,
    /// with the integral taken exactly over the breakpoints of `F`.
    pub fn l6_difference(&self, x: f64) -> Result<f64> {
        let t = self.power(x)?;
        let n = t.floor() as u64;
        // ∫_0^x F(y) dy = ∫_1^t F(log v/log H) dv/(v log H); F is smooth
        // between integers, so integrate each [k, k+1) in closed form:
        // F = (P(k) - S(k)/v)/log H there.
        let mut integral = NeumaierSum::new();
        for k in 1..=n {
            let hi = if k == n { t } else { (k + 1) as f64 };
            let kf = k as f64;
            let log_ratio = (hi / kf).ln();
            let inv_diff = 1.0 / kf - 1.0 / hi;
            integral.push(self.p[k as usize] * log_ratio - self.s[k as usize] as f64 * inv_diff);
        }
        let integral = integral.value() / (self.log_h * self.log_h);
        let mut sum = NeumaierSum::new();
        for m in 2..=n {
            let lam = self.sieve.mangoldt(m);
            if lam != 0.0 {
                sum.push(lam / m as f64 * self.big_f_at(t / m as f64));
            }
        }
        Ok(integral - sum.value() / self.log_h)
    }

    /// Worst [`l7_margin`](Self::l7_margin) over the samples.
    pub fn check_lemma_l7(&self, xs: &[f64]) -> Result<f64> {
        let mut worst = f64::INFINITY;
        for &x in xs {
            worst = worst.min(self.l7_margin(x)?);
        }
        Ok(worst)
    }

    /// `V/H - |L(1, χ) - F(1) log H|` with `L(1, χ)` from the closed form
    /// and `V` the uniform Pólya–Vinogradov constant (`q >= 100`).
    pub fn check_lemma_l1chi(&self) -> Result<f64> {
        let q = self.chi.modulus() as f64;
        let v = pv_bound_fs(q)?;
        let l = l1_closed_form(&self.chi)?;
        let f1 = self.big_f(1.0)?;
        Ok(v / self.h - (l.value - f1 * self.log_h).abs())
    }
}

fn snap(t: f64) -> f64 {
    let r = t.round();
    if (t - r).abs() <= SNAP_REL * t {
        r
    } else {
        t
    }
}

fn snap_floor(t: f64) -> u64 {
    snap(t).floor() as u64
}

/// Uniform bound on interval sums used for the tail of the series.
fn tail_constant(chi: &QuadChar) -> Result<f64> {
    let q = chi.modulus() as f64;
    if q >= 100.0 {
        pv_bound_fs(q)
    } else {
        pv_bound_lapkova(q, chi.parity(), false)
    }
}

/// `Σ_{n<=T} χ(n)/n`, with tail bound `V/T`.
pub fn l1_truncated(chi: &QuadChar, t: u64) -> Result<LValueResult> {
    let q = chi.modulus();
    if t < q {
        return Err(invalid(format!("truncation T = {t} must be >= q = {q}")));
    }
    if t > DEFAULT_LAB_CAP {
        return Err(Error::CapExceeded {
            what: "truncation point T",
            value: t as f64,
            cap: DEFAULT_LAB_CAP as f64,
        });
    }
    let period = chi.period();
    let mut acc = NeumaierSum::new();
    for n in 1..=t {
        let c = period[(n % q) as usize];
        if c != 0 {
            acc.push(c as f64 / n as f64);
        }
    }
    Ok(LValueResult {
        value: acc.value(),
        tail_bound: tail_constant(chi)? / t as f64,
        method: LMethod::TruncatedSeries,
    })
}

/// `L(1, χ)` by the finite Gauss-sum formulas: odd
/// `-(π/q^{3/2}) Σ a χ(a)`, even `-(1/√q) Σ χ(a) log(2 sin(πa/q))`.
pub fn l1_closed_form(chi: &QuadChar) -> Result<LValueResult> {
    let q = chi.modulus();
    if q > DEFAULT_CLOSED_FORM_CAP {
        return Err(Error::CapExceeded {
            what: "closed-form modulus",
            value: q as f64,
            cap: DEFAULT_CLOSED_FORM_CAP as f64,
        });
    }
    let qf = q as f64;
    let period = chi.period();
    let mut acc = NeumaierSum::new();
    let mut mag = 0.0;
    let value = match chi.parity() {
        Parity::Odd => {
            for (a, &c) in period.iter().enumerate().skip(1) {
                if c != 0 {
                    acc.push(c as f64 * a as f64);
                    mag += a as f64;
                }
            }
            mag *= std::f64::consts::PI / (qf * qf.sqrt());
            -std::f64::consts::PI / (qf * qf.sqrt()) * acc.value()
        }
        Parity::Even => {
            for (a, &c) in period.iter().enumerate().skip(1) {
                if c != 0 {
                    let r = a.min(q as usize - a) as f64;
                    let term = (2.0 * (std::f64::consts::PI * r / qf).sin()).ln();
                    acc.push(c as f64 * term);
                    mag += term.abs();
                }
            }
            mag /= qf.sqrt();
            -acc.value() / qf.sqrt()
        }
    };
    Ok(LValueResult {
        value,
        // floating-point allowance: a few ulps per term, relative to the
        // magnitude of the terms
        tail_bound: 16.0 * f64::EPSILON * (mag + value.abs()),
        method: LMethod::GaussSumClosedForm,
    })
}
