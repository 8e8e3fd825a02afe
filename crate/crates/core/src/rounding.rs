//! Conservative rounding policy.
//!
//! Every quantity on the bound side of a certified inequality is pushed by a
//! relative `1e-12` in the direction that weakens the final claim. Double
//! precision evaluation of the formulas involved loses far less than that.

/// Relative inflation applied to every bound-side quantity.
pub const REL_INFLATION: f64 = 1e-12;

/// Name under which the policy is recorded in reports.
pub const POLICY_NAME: &str = "inflate-1e-12";

#[inline]
pub fn round_up(x: f64) -> f64 {
    x + x.abs() * REL_INFLATION
}

#[inline]
pub fn round_down(x: f64) -> f64 {
    x - x.abs() * REL_INFLATION
}

/// Upper bound for a sum of terms that may cancel: the inflation is taken
/// relative to the sum of magnitudes, not the (possibly tiny) result.
pub fn round_up_sum(terms: &[f64]) -> f64 {
    let total = crate::sum::neumaier(terms.iter().copied());
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    total + scale * REL_INFLATION
}
