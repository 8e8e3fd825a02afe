//! Compensated (Neumaier) summation.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

/// Running sum that tracks the low-order bits lost by each addition.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    carry: f64,
}

impl NeumaierSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            carry: 0.0,
        }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl AddAssign<f64> for NeumaierSum {
    #[inline]
    fn add_assign(&mut self, rhs: f64) {
        self.push(rhs);
    }
}

impl Add for NeumaierSum {
    type Output = NeumaierSum;

    fn add(mut self, rhs: Self) -> Self {
        self.push(rhs.sum);
        self.push(rhs.carry);
        self
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of floats.
pub fn neumaier<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().sum::<NeumaierSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_next_to_large_ones() {
        let xs = [1e100, 1.0, -1e100];
        assert_eq!(neumaier(xs), 1.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn harmonic_sum_matches_reference() {
        // H_{10^6} = ln(10^6) + gamma + 1/(2n) - 1/(12 n^2) + ...
        let n = 1_000_000u32;
        let s = neumaier((1..=n).map(|k| 1.0 / k as f64));
        let n = n as f64;
        let reference = n.ln() + crate::consts::EULER_GAMMA + 0.5 / n - 1.0 / (12.0 * n * n);
        assert!((s - reference).abs() < 1e-14);
    }

    #[test]
    fn merging_partial_sums() {
        let a: NeumaierSum = (0..1000).map(|i| 0.1 * i as f64).sum();
        let b: NeumaierSum = (1000..2000).map(|i| 0.1 * i as f64).sum();
        let whole = neumaier((0..2000).map(|i| 0.1 * i as f64));
        assert!(((a + b).value() - whole).abs() <= 1e-10);
    }
}
