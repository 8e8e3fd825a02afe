//! Numerical constants that enter certified inequalities.

/// Euler's constant to 30 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

/// `1 / sqrt(e)`, the upper end of the admissible range for theta.
pub const INV_SQRT_E: f64 = 0.606_530_659_712_633_423_603_799_534_991;

/// Zero-free-region constant used in the corrected Ramaré expansion.
pub const RAMARE_R: f64 = 5.69693;

/// Height to which the Riemann hypothesis is verified in that expansion.
pub const RAMARE_T0: f64 = 2.44e12;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inv_sqrt_e() {
        assert!((INV_SQRT_E - (-0.5f64).exp()).abs() <= f64::EPSILON);
    }
}
