//! Tables of the von Mangoldt function and its two summatory functions.
//!
//! `SieveTable` stores, for every `0 <= n <= limit`, the value `Λ(n)`, the
//! Chebyshev function `ψ(n) = Σ_{m≤n} Λ(m)` and the weighted sum
//! `ψ̃(n) = Σ_{m≤n} Λ(m)/m`. Index 0 holds zeros. Primes are found with a
//! segmented sieve; `log p` is evaluated once per prime and copied to every
//! power of `p`, so `Λ(p^k)` is bit-identical for all `k`. Both prefix arrays
//! are accumulated with compensated summation.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{invalid, Error, Result};
use crate::sum::NeumaierSum;

pub const DEFAULT_LIMIT: u64 = 10_000_000;

/// Default allocation ceiling for a table: 2 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

const SEGMENT: usize = 1 << 18;

/// Bytes per table slot: three `f64` arrays.
const SLOT_BYTES: u64 = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct SieveTable {
    limit: u64,
    mangoldt: Vec<f64>,
    psi_prefix: Vec<f64>,
    psitilde_prefix: Vec<f64>,
}

/// Builds a table up to `limit` under the default memory budget.
pub fn build_sieve(limit: u64) -> Result<SieveTable> {
    build_sieve_with_budget(limit, DEFAULT_MEMORY_BUDGET)
}

pub fn build_sieve_with_budget(limit: u64, budget: u64) -> Result<SieveTable> {
    if limit < 2 {
        return Err(invalid(format!("sieve limit must be >= 2, got {limit}")));
    }
    let needed = (limit + 1).saturating_mul(SLOT_BYTES);
    if needed > budget {
        return Err(Error::Resource {
            what: "sieve table",
            needed,
            budget,
        });
    }
    let mangoldt = mangoldt_values(limit as usize);
    Ok(SieveTable::from_mangoldt(limit, mangoldt))
}

fn mangoldt_values(limit: usize) -> Vec<f64> {
    let mut lambda = vec![0.0f64; limit + 1];
    let root = integer_sqrt(limit as u64) as usize;

    let mut small = vec![true; root + 1];
    let mut base = Vec::new();
    for p in 2..=root {
        if small[p] {
            base.push(p);
            let mut k = p * p;
            while k <= root {
                small[k] = false;
                k += p;
            }
        }
    }

    let mut composite = vec![false; SEGMENT];
    let mut lo = 2usize;
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = hi - lo + 1;
        composite[..len].iter_mut().for_each(|c| *c = false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let first = (p * p).max(lo.div_ceil(p) * p);
            let mut k = first;
            while k <= hi {
                composite[k - lo] = true;
                k += p;
            }
        }
        for (i, &c) in composite[..len].iter().enumerate() {
            if !c {
                let p = lo + i;
                let lp = (p as f64).ln();
                lambda[p] = lp;
                if p <= root {
                    let mut pk = p * p;
                    loop {
                        lambda[pk] = lp;
                        match pk.checked_mul(p) {
                            Some(next) if next <= limit => pk = next,
                            _ => break,
                        }
                    }
                }
            }
        }
        lo = hi + 1;
    }
    lambda
}

pub(crate) fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r as u128 * r as u128 > n as u128 {
        r -= 1;
    }
    while (r as u128 + 1) * (r as u128 + 1) <= n as u128 {
        r += 1;
    }
    r
}

impl SieveTable {
    fn from_mangoldt(limit: u64, mangoldt: Vec<f64>) -> Self {
        let mut psi_prefix = Vec::with_capacity(mangoldt.len());
        let mut psitilde_prefix = Vec::with_capacity(mangoldt.len());
        let mut psi = NeumaierSum::new();
        let mut psitilde = NeumaierSum::new();
        for (n, &l) in mangoldt.iter().enumerate() {
            if l != 0.0 {
                psi.push(l);
                psitilde.push(l / n as f64);
            }
            psi_prefix.push(psi.value());
            psitilde_prefix.push(psitilde.value());
        }
        SieveTable {
            limit,
            mangoldt,
            psi_prefix,
            psitilde_prefix,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `Λ(n)`; panics if `n > limit`.
    #[inline]
    pub fn mangoldt(&self, n: u64) -> f64 {
        self.mangoldt[n as usize]
    }

    /// `ψ(n)` for an integer argument; panics if `n > limit`.
    #[inline]
    pub fn psi_at(&self, n: u64) -> f64 {
        self.psi_prefix[n as usize]
    }

    /// `ψ̃(n)` for an integer argument; panics if `n > limit`.
    #[inline]
    pub fn psi_tilde_at(&self, n: u64) -> f64 {
        self.psitilde_prefix[n as usize]
    }

    pub fn mangoldt_slice(&self) -> &[f64] {
        &self.mangoldt
    }

    pub fn psi_slice(&self) -> &[f64] {
        &self.psi_prefix
    }

    pub fn psi_tilde_slice(&self) -> &[f64] {
        &self.psitilde_prefix
    }

    fn index(&self, what: &'static str, x: f64) -> Result<usize> {
        if !(x >= 0.0) {
            return Err(invalid(format!("{what} needs x >= 0, got {x}")));
        }
        if x > self.limit as f64 {
            return Err(Error::OutOfRange {
                what,
                value: x,
                limit: self.limit as f64,
            });
        }
        Ok(x.floor() as usize)
    }

    /// `ψ(x) = ψ(⌊x⌋)`.
    pub fn psi(&self, x: f64) -> Result<f64> {
        Ok(self.psi_prefix[self.index("psi argument", x)?])
    }

    /// `ψ̃(x) = Σ_{n≤x} Λ(n)/n`.
    pub fn psi_tilde(&self, x: f64) -> Result<f64> {
        Ok(self.psitilde_prefix[self.index("psi_tilde argument", x)?])
    }
}

// Binary cache.
//
// Layout, all integers and floats little-endian:
//
//   offset  size            field
//   0       8               magic  b"LCHISIEV"
//   8       4               format version (u32) = CACHE_VERSION
//   12      4               reserved (u32) = 0
//   16      8               limit (u64)
//   24      8*(limit+1)     Λ(n), n = 0..=limit           (f64)
//   ...     8*(limit+1)     ψ(n)                          (f64)
//   ...     8*(limit+1)     ψ̃(n)                          (f64)
//
// A cache is only an optimisation: any mismatch makes `load_or_build`
// rebuild the table from scratch.

pub const CACHE_MAGIC: &[u8; 8] = b"LCHISIEV";
pub const CACHE_VERSION: u32 = 1;

impl SieveTable {
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            w.write_all(CACHE_MAGIC)?;
            w.write_all(&CACHE_VERSION.to_le_bytes())?;
            w.write_all(&0u32.to_le_bytes())?;
            w.write_all(&self.limit.to_le_bytes())?;
            for arr in [&self.mangoldt, &self.psi_prefix, &self.psitilde_prefix] {
                for v in arr.iter() {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            w.flush()?;
        }
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<SieveTable> {
        let bad = |reason: String| Error::Cache {
            path: path.to_path_buf(),
            reason,
        };
        let file = File::open(path)?;
        let file_len = file.metadata()?.len();
        let mut r = BufReader::new(file);
        let mut header = [0u8; 24];
        r.read_exact(&mut header)?;
        if &header[..8] != CACHE_MAGIC {
            return Err(bad("bad magic".into()));
        }
        let version = u32::from_le_bytes(header[8..12].try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(bad(format!("format version {version}, expected {CACHE_VERSION}")));
        }
        let limit = u64::from_le_bytes(header[16..24].try_into().unwrap());
        let slots = limit
            .checked_add(1)
            .ok_or_else(|| bad("limit overflows".into()))?;
        if file_len != 24 + 3 * 8 * slots {
            return Err(bad(format!("length {file_len} does not match limit {limit}")));
        }
        let mut read_array = || -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(slots as usize);
            let mut buf = [0u8; 8];
            for _ in 0..slots {
                r.read_exact(&mut buf)?;
                out.push(f64::from_le_bytes(buf));
            }
            Ok(out)
        };
        let mangoldt = read_array()?;
        let psi_prefix = read_array()?;
        let psitilde_prefix = read_array()?;
        Ok(SieveTable {
            limit,
            mangoldt,
            psi_prefix,
            psitilde_prefix,
        })
    }

    /// File name used for a table of the given limit inside a cache directory.
    pub fn cache_file_name(limit: u64) -> String {
        format!("sieve-v{CACHE_VERSION}-{limit}.bin")
    }

    /// Reads `dir/sieve-v1-<limit>.bin` if present and valid, otherwise
    /// builds the table and tries to store it there.
    pub fn load_or_build(limit: u64, dir: Option<&Path>) -> Result<SieveTable> {
        let Some(dir) = dir else {
            return build_sieve(limit);
        };
        let path: PathBuf = dir.join(Self::cache_file_name(limit));
        if let Ok(table) = Self::read_cache(&path) {
            if table.limit == limit {
                return Ok(table);
            }
        }
        let table = build_sieve(limit)?;
        if std::fs::create_dir_all(dir).is_ok() {
            // Failing to write the cache is not an error.
            let _ = table.write_cache(&path);
        }
        Ok(table)
    }
}
