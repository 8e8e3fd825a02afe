//! Explicit estimates for `ψ(x)` and `ψ̃(x)`, and the weighted integral of
//! `|Δ(u)|` where `Δ(u) = ψ̃(u) - log u + γ`.
//!
//! Every returned bound is inflated by [`crate::rounding::REL_INFLATION`].

use serde::{Deserialize, Serialize};

use crate::consts::{EULER_GAMMA, RAMARE_R, RAMARE_T0};
use crate::error::{Error, Result};
use crate::rounding::{round_up, POLICY_NAME};
use crate::sieve::SieveTable;
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundForm {
    /// `ψ(x) <= c x` (one-sided).
    LinearCoefficient,
    /// `|ψ(x) - x| <= c x / log² x`.
    InverseLogSquared,
    /// `|ψ(x) - x| <= c √x`.
    SqrtCoefficient,
    /// `|ψ(x) - x| <= c x` with tiny `c`.
    TinyLinear,
}

/// One explicit estimate on `ψ`, valid for `x_low <= x <= x_high`
/// (`x_low` excluded when `low_open`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiErrorBound {
    pub x_low: f64,
    pub low_open: bool,
    pub x_high: f64,
    pub form: BoundForm,
    pub coefficient: f64,
}

/// `e^40`, below `10^19` so the last two estimates overlap.
pub const E40: f64 = 2.353_852_668_370_199_8e17;

pub const PSI_ERROR_BOUNDS: [PsiErrorBound; 4] = [
    PsiErrorBound {
        x_low: 0.0,
        low_open: false,
        x_high: f64::INFINITY,
        form: BoundForm::LinearCoefficient,
        coefficient: 1.04,
    },
    PsiErrorBound {
        x_low: 1e5,
        low_open: false,
        x_high: f64::INFINITY,
        form: BoundForm::InverseLogSquared,
        coefficient: 0.64673,
    },
    PsiErrorBound {
        x_low: 11.0,
        low_open: true,
        x_high: 1e19,
        form: BoundForm::SqrtCoefficient,
        coefficient: 0.94,
    },
    PsiErrorBound {
        x_low: E40,
        low_open: false,
        x_high: f64::INFINITY,
        form: BoundForm::TinyLinear,
        coefficient: 1.994e-8,
    },
];

impl PsiErrorBound {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.low_open {
            x > self.x_low
        } else {
            x >= self.x_low
        };
        above && x <= self.x_high
    }

    /// Bound on `|ψ(x) - x|` implied at `x`, not inflated. The one-sided
    /// `ψ <= 1.04 x` only gives `|ψ(x) - x| <= x` (since `ψ >= 0`).
    pub fn abs_error_at(&self, x: f64) -> f64 {
        let c = self.coefficient;
        match self.form {
            BoundForm::LinearCoefficient => x * (c - 1.0).max(1.0),
            BoundForm::InverseLogSquared => c * x / (x.ln() * x.ln()),
            BoundForm::SqrtCoefficient => c * x.sqrt(),
            BoundForm::TinyLinear => c * x,
        }
    }
}

/// `1.04 x`, an upper bound for `ψ(x)` valid for all `x >= 0`.
pub fn psi_upper_classical(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::OutOfDomain {
            bound: "psi <= 1.04x",
            domain: "x >= 0",
            x,
        });
    }
    Ok(round_up(1.04 * x))
}

/// Smallest of the applicable two-sided estimates on `|ψ(x) - x|`.
pub fn psi_error_bound(x: f64) -> Result<f64> {
    if !(x > 11.0) {
        return Err(Error::OutOfDomain {
            bound: "|psi(x) - x| estimates",
            domain: "x > 11",
            x,
        });
    }
    let best = PSI_ERROR_BOUNDS
        .iter()
        .filter(|b| b.contains(x))
        .map(|b| b.abs_error_at(x))
        .fold(f64::INFINITY, f64::min);
    Ok(round_up(best))
}

/// `2 R log² T₀`, where the zero-sum error `E(x)` switches branch.
pub fn ramare_split() -> f64 {
    let l = RAMARE_T0.ln();
    2.0 * RAMARE_R * l * l
}

/// Both branches of `E(x)`, `(small-x constant, large-x formula)`, without
/// inflation. The two do not join continuously at the split point.
pub fn ramare_e_branches(x: f64) -> (f64, f64) {
    let s = 2.0 * (x.ln() / RAMARE_R).sqrt();
    (1.75e-12, (1.0 + s) / (2.0 * std::f64::consts::PI) * (-s).exp())
}

/// `E(x)` of the corrected Ramaré expansion, for `x >= 71`.
pub fn ramare_e(x: f64) -> Result<f64> {
    if !(x >= 71.0) {
        return Err(Error::OutOfDomain {
            bound: "E(x)",
            domain: "x >= 71",
            x,
        });
    }
    let (small, large) = ramare_e_branches(x);
    Ok(round_up(if x < ramare_split() { small } else { large }))
}

/// Right-hand side of
/// `|ψ̃(x) - log x + γ - (ψ(x) - x)/x| <= 0.047/√x + (log 2π + 10⁻⁴)/x + E(x)`.
pub fn psitilde_expansion_bound(x: f64) -> Result<f64> {
    if !(x >= 71.0) {
        return Err(Error::OutOfDomain {
            bound: "psi-tilde expansion",
            domain: "x >= 71",
            x,
        });
    }
    let two_pi_log = (2.0 * std::f64::consts::PI).ln();
    let v = 0.047 / x.sqrt() + (two_pi_log + 1e-4) / x + ramare_e(x)?;
    Ok(round_up(v))
}

/// Bound on `|ψ̃(x) - log x + γ|`: `min(1.3/log² x, 1/√x)`, the square-root
/// branch only for `x <= 10^19`.
pub fn psitilde_error(x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::OutOfDomain {
            bound: "|psi-tilde(x) - log x + gamma|",
            domain: "x > 1",
            x,
        });
    }
    let l = x.ln();
    let log_branch = 1.3 / (l * l);
    let sqrt_branch = if x <= 1e19 { 1.0 / x.sqrt() } else { f64::INFINITY };
    Ok(round_up(log_branch.min(sqrt_branch)))
}

/// `∫_n^{n+1} |τ - log u| du/u`, exactly.
///
/// With `s = log u` this is `∫_a^b |τ - s| ds` over `a = log n`,
/// `b = log(n+1)`; when `a < τ < b` the integral is split at `s = τ`.
pub fn interval_integral(n: u64, tau: f64) -> f64 {
    let a = (n as f64).ln();
    let width = (1.0 / n as f64).ln_1p();
    let b = a + width;
    if tau <= a {
        // ∫ (s - τ) ds = width * (midpoint - τ)
        width * ((a - tau) + 0.5 * width)
    } else if tau >= b {
        width * ((tau - b) + 0.5 * width)
    } else {
        let left = tau - a;
        let right = b - tau;
        0.5 * (left * left + right * right)
    }
}

/// Upper bound for `∫_1^{u_max} |Δ(u)| du/u`, summing the exact per-interval
/// integrals with `τ = ψ̃(n) + γ` and inflating the total.
pub fn delta_integral(table: &SieveTable, u_max: u64) -> Result<f64> {
    if u_max < 1 {
        return Err(crate::error::invalid("u_max must be >= 1"));
    }
    if u_max > table.limit() {
        return Err(Error::OutOfRange {
            what: "u_max",
            value: u_max as f64,
            limit: table.limit() as f64,
        });
    }
    let psitilde = table.psi_tilde_slice();
    let mut acc = NeumaierSum::new();
    for n in 1..u_max {
        acc.push(interval_integral(n, psitilde[n as usize] + EULER_GAMMA));
    }
    Ok(round_up(acc.value()))
}

/// `log 10^19`.
pub fn log_1e19() -> f64 {
    19.0 * std::f64::consts::LN_10
}

/// Coefficient of `ψ(x) - x = O*(c·x)` used for `10^19 < x <= A` when the
/// large-`m` part of `Σ χ(n)Λ(m)` is estimated. It differs from the
/// `x >= e^40` entry of [`PSI_ERROR_BOUNDS`].
pub const LARGE_M_TINY_LINEAR: f64 = 1.93378e-8;

/// Constant of the `1.83 H/(n log²(H/n))` term for `H/n >= A`.
pub const LARGE_M_LOG_SQUARED: f64 = 1.83;

/// `c(1 + log(A/10^19)) + 1.83/log²A`, the two large-`m` error terms as a
/// multiple of `H`, at their largest (`H = A`). `ln_a = log A`.
pub fn large_m_error_coefficient(ln_a: f64, tiny: f64) -> Result<f64> {
    if !(ln_a >= 40.0 && ln_a.is_finite()) {
        return Err(Error::OutOfDomain {
            bound: "large-m error terms",
            domain: "A >= e^40",
            x: ln_a.exp(),
        });
    }
    let v = tiny * (1.0 + ln_a - log_1e19()) + LARGE_M_LOG_SQUARED / (ln_a * ln_a);
    Ok(round_up(v))
}

/// Analytic bound for `∫_{10^6}^∞ |Δ(u)| du/u` split at `x₁`, given
/// `ln_x1 = log x₁ >= log 10^19`. Taking the logarithm keeps split points
/// far beyond `f64` range usable.
pub fn delta_integral_tail(ln_x1: f64) -> Result<f64> {
    if !(ln_x1 >= log_1e19()) {
        return Err(Error::OutOfDomain {
            bound: "Delta-integral tail",
            domain: "x1 >= 1e19",
            x: ln_x1.exp(),
        });
    }
    let v = 0.002 + 2e-8 * (ln_x1 - log_1e19()) + 0.2 / 1e19f64.sqrt()
        - 0.2 * (-0.5 * ln_x1).exp()
        + 1.3 / ln_x1;
    Ok(round_up(v))
}

/// `log x₁` minimising the tail on a grid of `log x₁` values.
pub fn best_tail_split(ln_grid: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    ln_grid
        .into_iter()
        .filter_map(|l| delta_integral_tail(l).ok().map(|v| (l, v)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaIntegralResult {
    pub u_max: u64,
    /// Certified upper bound for `∫_1^{u_max} |Δ(u)| du/u`.
    #[serde(rename = "partial")]
    pub partial_value: f64,
    /// `x₁` when representable as `f64`.
    pub x1: Option<f64>,
    pub ln_x1: f64,
    #[serde(rename = "tail")]
    pub tail_bound: f64,
    pub total: f64,
    pub policy: String,
}

impl DeltaIntegralResult {
    pub fn compute(table: &SieveTable, u_max: u64, ln_x1: f64) -> Result<Self> {
        let partial_value = delta_integral(table, u_max)?;
        let tail_bound = delta_integral_tail(ln_x1)?;
        let x1 = Some(ln_x1.exp()).filter(|x| x.is_finite());
        Ok(DeltaIntegralResult {
            u_max,
            partial_value,
            x1,
            ln_x1,
            tail_bound,
            total: round_up(partial_value + tail_bound),
            policy: POLICY_NAME.to_string(),
        })
    }
}
