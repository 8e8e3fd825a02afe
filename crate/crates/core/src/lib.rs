//! Explicit upper bounds for `L(1, χ)`, `χ` a primitive quadratic character.
//!
//! The crate has two halves. The certification side assembles the explicit
//! constants of a smoothed Pólya–Vinogradov argument and solves a
//! one-dimensional inequality for the exponent `θ*`, producing a certified
//! coefficient `c` with `L(1, χ) <= c log q` for all moduli `q >= q₀`
//! ([`engine`]). The verification side checks every analytic input at desk
//! scale: Chebyshev-function bounds against a sieve ([`sieve`],
//! [`explicit_psi`]), character-sum bounds against exhaustive maxima
//! ([`charsum`]), and the smoothing identities against direct sums ([`lab`]).
//!
//! ```
//! use lchi::{certify, Modulus, Parity};
//!
//! let q0: Modulus = "2e23".parse()?;
//! let cert = certify(q0, 90.0, Parity::Odd, 0.5)?;
//! assert!(cert.theta_star > 0.5);
//! println!("coefficient {:.6}", cert.coefficient.unwrap());
//! # Ok::<(), lchi::Error>(())
//! ```

pub mod audit;
pub mod character;
pub mod charsum;
pub mod consts;
pub mod engine;
mod error;
pub mod explicit_psi;
pub mod lab;
pub mod report;
pub mod rounding;
pub mod sieve;
pub mod sum;

pub use character::{fundamental_discriminants, is_fundamental, kronecker, Parity, QuadChar};
pub use charsum::{pv_bound_fs, pv_bound_lapkova};
pub use engine::{
    assemble_params, certify, min_q0, solve_theta_star, sweep_b, Modulus, StephensParams,
    ThetaCertificate, VSource,
};
pub use error::{Error, Result};
pub use explicit_psi::{delta_integral, DeltaIntegralResult};
pub use lab::{LValueResult, SmoothingContext};
pub use sieve::{build_sieve, SieveTable};

// The book's code listings run as doc tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/characters.md")]
    mod characters {}
    #[doc = include_str!("../../../book/src/chebyshev.md")]
    mod chebyshev {}
    #[doc = include_str!("../../../book/src/charsums.md")]
    mod charsums {}
    #[doc = include_str!("../../../book/src/certification.md")]
    mod certification {}
    #[doc = include_str!("../../../book/src/rounding.md")]
    mod rounding {}
    #[doc = include_str!("../../../book/src/lab.md")]
    mod lab {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/cache.md")]
    mod cache {}
}
