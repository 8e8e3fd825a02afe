//! Kronecker symbols and primitive quadratic characters.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Parity of a Dirichlet character: `χ(-1) = 1` (even) or `-1` (odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `χ(-1)`.
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Parity {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            _ => Err(invalid(format!("parity must be `even` or `odd`, got `{s}`"))),
        }
    }
}

/// Jacobi symbol `(a|n)` for odd `n >= 1` and `0 <= a < n`.
fn jacobi(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut t = 1i8;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(d|n)` for any integer `d` and `n >= 0`.
///
/// Reduces by quadratic reciprocity; `n` is never factored beyond removing
/// its power of two.
pub fn kronecker(d: i64, n: u64) -> i8 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let v = n.trailing_zeros();
    let odd = n >> v;
    let mut sign = 1i8;
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if (r == 3 || r == 5) && v % 2 == 1 {
            sign = -1;
        }
    }
    if odd == 1 {
        return sign;
    }
    let a = (d as i128).rem_euclid(odd as i128) as u64;
    sign * jacobi(a, odd)
}

fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Whether `d` is a fundamental discriminant other than 1.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// All fundamental discriminants with `3 <= |d| <= limit`, ordered by `|d|`
/// and, for equal `|d|`, positive first.
pub fn fundamental_discriminants(limit: u64) -> Vec<i64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut squarefree = vec![true; n + 1];
    squarefree[0] = false;
    let mut k = 2usize;
    while k * k <= n {
        let sq = k * k;
        let mut j = sq;
        while j <= n {
            squarefree[j] = false;
            j += sq;
        }
        k += 1;
    }
    let fundamental = |d: i64| -> bool {
        match d.rem_euclid(4) {
            1 => squarefree[d.unsigned_abs() as usize],
            0 => {
                let m = d / 4;
                matches!(m.rem_euclid(4), 2 | 3) && squarefree[m.unsigned_abs() as usize]
            }
            _ => false,
        }
    };
    let mut out = Vec::new();
    for q in 3..=limit as i64 {
        for d in [q, -q] {
            if fundamental(d) {
                out.push(d);
            }
        }
    }
    out
}

/// Primitive quadratic character `χ_d(n) = (d|n)` attached to a fundamental
/// discriminant `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadChar {
    discriminant: i64,
}

impl QuadChar {
    pub fn new(discriminant: i64) -> Result<Self> {
        if !is_fundamental(discriminant) {
            return Err(invalid(format!(
                "{discriminant} is not a fundamental discriminant"
            )));
        }
        Ok(QuadChar { discriminant })
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    /// `q = |d|`.
    pub fn modulus(&self) -> u64 {
        self.discriminant.unsigned_abs()
    }

    pub fn parity(&self) -> Parity {
        if self.discriminant > 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    #[inline]
    pub fn eval(&self, n: u64) -> i8 {
        kronecker(self.discriminant, n)
    }

    /// `χ(n)` for `n = 0, 1, ..., q-1`: one full period.
    pub fn period(&self) -> Vec<i8> {
        (0..self.modulus()).map(|n| self.eval(n)).collect()
    }
}
