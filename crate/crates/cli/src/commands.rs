//! Parameter resolution and dispatch. Everything is validated before any
//! long computation starts.

use serde::Serialize;
use serde_json::{json, Value};

use lchi::audit::{charsum_audit, lemma_audit, psi_audit, psitilde_audit, CharSumAuditConfig, LemmaAuditConfig};
use lchi::explicit_psi::{large_m_error_coefficient, LARGE_M_TINY_LINEAR, PSI_ERROR_BOUNDS};
use lchi::engine::{certify_with, min_q0_with, sweep_b_with, MAX_SWEEP_B, MIN_B};
use lchi::lab::DEFAULT_LAB_CAP;
use lchi::report::{standard_certifications, CertificationReport};
use lchi::{DeltaIntegralResult, Error, Modulus, Parity, SieveTable};

use crate::config::*;
use crate::output::{object, Outcome};

/// Largest sieve the command line will build.
const MAX_SIEVE: u64 = 200_000_000;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn lib_err(e: Error) -> String {
    e.to_string()
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("missing required option {flag}"))
}

fn parse_parity(s: Option<String>) -> Result<Parity, String> {
    require(s, "--parity")?.parse().map_err(lib_err)
}

fn check_c(c: Option<f64>) -> Result<f64, String> {
    let c = require(c, "--c")?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(format!("--c must be positive, got {c}"));
    }
    Ok(c)
}

fn check_b(b: Option<f64>) -> Result<f64, String> {
    let b = require(b, "--B")?;
    if !(b >= MIN_B && b <= MAX_SWEEP_B) {
        return Err(format!("--B must lie in [sqrt(2)/2.04, 1e4], got {b}"));
    }
    Ok(b)
}

/// Positive integer given as `1000000` or `1e6`.
pub fn parse_count(flag: &str, s: &str) -> Result<u64, String> {
    let bad = || format!("{flag} must be a positive integer, got `{s}`");
    if let Ok(n) = s.parse::<u64>() {
        return if n > 0 { Ok(n) } else { Err(bad()) };
    }
    let x: f64 = s.parse().map_err(|_| bad())?;
    if !(x >= 1.0 && x <= 2f64.powi(53) && x.fract() == 0.0) {
        return Err(bad());
    }
    Ok(x as u64)
}

/// `log x₁` from `exp(L)` or a plain number.
pub fn parse_ln_x1(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let ln = if let Some(inner) = t.strip_prefix("exp(").and_then(|r| r.strip_suffix(')')) {
        inner.trim().parse::<f64>().map_err(|_| format!("cannot parse exponent in `{s}`"))?
    } else {
        let x: f64 = t.parse().map_err(|_| format!("--x1 must be a number or exp(L), got `{s}`"))?;
        x.ln()
    };
    if !(ln.is_finite() && ln > 0.0) {
        return Err(format!("--x1 must exceed 1, got `{s}`"));
    }
    Ok(ln)
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("{flag}: cannot parse `{t}`")))
        .collect()
}

/// Comma-separated values or `start:stop:step` (inclusive of `stop`).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, h] => {
            let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("--b-grid: cannot parse `{t}`"));
            let (a, b, h) = (num(a)?, num(b)?, num(h)?);
            if !(h > 0.0 && a <= b && a.is_finite() && b.is_finite()) {
                return Err(format!("--b-grid `{s}` needs start <= stop and step > 0"));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            if n > 100_000 {
                return Err(format!("--b-grid `{s}` has more than 1e5 points"));
            }
            Ok((0..=n).map(|k| a + h * k as f64).collect())
        }
        [_] => parse_list("--b-grid", s),
        _ => Err(format!("--b-grid `{s}` is neither a list nor start:stop:step")),
    }
}

pub fn run(command: Command, common: &Common) -> Result<Outcome, String> {
    let v = common.v_source;
    match command {
        Command::Certify(a) => {
            let q0_text = require(a.q0, "--q0")?;
            let q0: Modulus = q0_text.parse().map_err(lib_err)?;
            let b = check_b(a.b)?;
            let parity = parse_parity(a.parity)?;
            let c = check_c(a.c)?;
            let cert = certify_with(q0, b, parity, c, v).map_err(lib_err)?;
            let report = CertificationReport::from_certificate(&cert);
            Ok(Outcome {
                pass: report.pass,
                parameters: json!({"q0": q0_text, "B": b, "parity": parity, "c": c, "v_source": v}),
                summary: format!(
                    "certify {parity} B={b} q0={q0_text} c={c}: coefficient {:.9}, margin {:+.3e}",
                    report.coefficient, report.margin
                ),
                rows: vec![to_value(&report)],
                result: object(vec![("certification", to_value(&report)), ("solver", to_value(&cert.trace))]),
            })
        }
        Command::Sweep(a) => {
            let parity = parse_parity(a.parity)?;
            let c = check_c(a.c)?;
            let grid_text = a.b_grid.unwrap_or_else(|| "40:200:1".into());
            let grid = parse_grid(&grid_text)?;
            if let Some(b) = grid.iter().find(|b| !(**b >= 1.0 && **b <= MAX_SWEEP_B)) {
                return Err(format!("--b-grid value {b} outside [1, 1e4]"));
            }
            let table = sweep_b_with(parity, c, &grid, v).map_err(lib_err)?;
            let rows = table
                .rows
                .iter()
                .map(|r| {
                    json!({"parity": parity, "target_c": c, "B": r.b, "log10_min_q0": r.log10_min_q0,
                           "theta_star": r.theta_star, "coefficient": r.coefficient})
                })
                .collect();
            Ok(Outcome {
                pass: table.argmin_b.is_some(),
                parameters: json!({"parity": parity, "c": c, "b_grid": grid_text, "v_source": v}),
                summary: match (table.argmin_b, table.min_log10_q0) {
                    (Some(b), Some(x)) => format!("sweep {parity} c={c}: best B = {b}, log10 q0 = {x:.2}"),
                    _ => format!("sweep {parity} c={c}: no B on the grid certifies the target"),
                },
                rows,
                result: to_value(&table),
            })
        }
        Command::MinQ0(a) => {
            let b = check_b(a.b)?;
            if b < 1.0 {
                return Err(format!("--B must be at least 1 for min-q0, got {b}"));
            }
            let parity = parse_parity(a.parity)?;
            let c = check_c(a.c)?;
            let parameters = json!({"B": b, "parity": parity, "c": c, "v_source": v});
            match min_q0_with(b, parity, c, v) {
                Ok(m) => {
                    let report = CertificationReport::from_certificate(&m.certificate);
                    Ok(Outcome {
                        pass: true,
                        parameters,
                        summary: format!("min-q0 {parity} B={b} c={c}: log10 q0 = {:.2}", m.log10_q0),
                        rows: vec![json!({"B": b, "parity": parity, "target_c": c, "attainable": true,
                                          "log10_q0": m.log10_q0, "theta_star": report.theta_star,
                                          "coefficient": report.coefficient})],
                        result: json!({"attainable": true, "log10_q0": m.log10_q0, "certification": report}),
                    })
                }
                Err(e @ Error::Unattainable { .. }) => Ok(Outcome {
                    pass: false,
                    parameters,
                    summary: format!("min-q0 {parity} B={b} c={c}: {e}"),
                    rows: vec![json!({"B": b, "parity": parity, "target_c": c, "attainable": false,
                                      "log10_q0": null, "theta_star": null, "coefficient": null})],
                    result: json!({"attainable": false, "log10_q0": null, "reason": e.to_string()}),
                }),
                Err(e) => Err(lib_err(e)),
            }
        }
        Command::DeltaIntegral(a) => {
            let umax_text = a.umax.unwrap_or_else(|| "1e6".into());
            let umax = parse_count("--umax", &umax_text)?;
            if umax > MAX_SIEVE {
                return Err(format!("--umax {umax} exceeds the sieve ceiling {MAX_SIEVE}"));
            }
            let x1_text = a.x1.unwrap_or_else(|| "exp(500)".into());
            let ln_x1 = parse_ln_x1(&x1_text)?;
            let max_partial = a.max_partial.unwrap_or(0.408);
            let max_total = a.max_total.unwrap_or(0.411);
            let table = SieveTable::load_or_build(umax, common.cache_dir.as_deref()).map_err(lib_err)?;
            let r = DeltaIntegralResult::compute(&table, umax, ln_x1).map_err(lib_err)?;
            let pass = r.partial_value <= max_partial && r.total <= max_total;
            Ok(Outcome {
                pass,
                parameters: json!({"umax": umax, "x1": x1_text, "max_partial": max_partial, "max_total": max_total}),
                summary: format!(
                    "delta-integral: partial {:.6} (<= {max_partial}), tail {:.6}, total {:.6} (<= {max_total})",
                    r.partial_value, r.tail_bound, r.total
                ),
                rows: vec![to_value(&r)],
                result: to_value(&r),
            })
        }
        Command::PsiAudit(a) => {
            let limit_text = a.limit.unwrap_or_else(|| "1e7".into());
            let limit = parse_count("--limit", &limit_text)?;
            let pt_text = a.psitilde_limit.unwrap_or_else(|| "1e6".into());
            let pt = parse_count("--psitilde-limit", &pt_text)?;
            let top = limit.max(pt);
            if top > MAX_SIEVE {
                return Err(format!("audit range {top} exceeds the sieve ceiling {MAX_SIEVE}"));
            }
            let table = SieveTable::load_or_build(top, common.cache_dir.as_deref()).map_err(lib_err)?;
            let mut checks = psi_audit(&table, limit).map_err(lib_err)?;
            checks.extend(psitilde_audit(&table, pt).map_err(lib_err)?);
            let failed = checks.iter().filter(|c| !c.passed()).count();
            // informational: the two tiny-linear coefficients against the 1.6e-5 budget at A = e^574
            let large_m: Vec<Value> = [LARGE_M_TINY_LINEAR, PSI_ERROR_BOUNDS[3].coefficient]
                .iter()
                .map(|&c| {
                    let v = large_m_error_coefficient(574.0, c).expect("574 is in range");
                    json!({"tiny_coefficient": c, "ln_a": 574.0, "coefficient": v, "budget": 1.6e-5, "within_budget": v <= 1.6e-5})
                })
                .collect();
            Ok(Outcome {
                pass: failed == 0,
                parameters: json!({"limit": limit, "psitilde_limit": pt}),
                summary: format!("psi-audit: {} checks, {failed} failed", checks.len()),
                rows: checks.iter().map(to_value).collect(),
                result: json!({"checks": checks, "large_m_error": large_m}),
            })
        }
        Command::CharsumAudit(a) => {
            let d = CharSumAuditConfig::default();
            let config = CharSumAuditConfig {
                d_min: a.d_min.unwrap_or(d.d_min),
                d_max: a.d_max.unwrap_or(d.d_max),
                cap: a.cap.unwrap_or(d.cap),
                samples: a.samples.unwrap_or(d.samples),
                seed: a.seed.unwrap_or(d.seed),
            };
            if config.d_min > config.d_max || config.d_max > config.cap {
                return Err(format!(
                    "charsum-audit needs d_min <= d_max <= cap, got {} <= {} <= {}",
                    config.d_min, config.d_max, config.cap
                ));
            }
            let rows = charsum_audit(&config).map_err(lib_err)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            Ok(Outcome {
                pass: failed == 0,
                parameters: to_value(&config),
                summary: format!("charsum-audit: {} characters, {failed} failed", rows.len()),
                rows: rows.iter().map(to_value).collect(),
                result: json!({"failed": failed, "rows": rows}),
            })
        }
        Command::LemmaAudit(a) => {
            let d = LemmaAuditConfig::default();
            let config = LemmaAuditConfig {
                d_min: a.d_min.unwrap_or(d.d_min),
                d_max: a.d_max.unwrap_or(d.d_max),
                l1chi_h_factors: match a.h_factors {
                    Some(s) => parse_list("--h-factors", &s)?,
                    None => d.l1chi_h_factors,
                },
                l7_h: a.l7_h.unwrap_or(d.l7_h),
                xs: match a.xs {
                    Some(s) => parse_list("--xs", &s)?,
                    None => d.xs,
                },
                stride: a.stride.unwrap_or(d.stride),
            };
            validate_lemma(&config)?;
            let records = lemma_audit(&config).map_err(lib_err)?;
            let failed = records.iter().filter(|r| !r.pass).count();
            let mut by_lemma: Vec<(String, usize, usize)> = Vec::new();
            for r in &records {
                match by_lemma.iter_mut().find(|e| e.0 == r.lemma) {
                    Some(e) => {
                        e.1 += 1;
                        e.2 += !r.pass as usize;
                    }
                    None => by_lemma.push((r.lemma.clone(), 1, !r.pass as usize)),
                }
            }
            let counts: Vec<Value> = by_lemma
                .iter()
                .map(|(l, n, f)| json!({"lemma": l, "records": n, "failed": f}))
                .collect();
            Ok(Outcome {
                pass: failed == 0,
                parameters: to_value(&config),
                summary: format!(
                    "lemma-audit: {} records, {failed} failed ({})",
                    records.len(),
                    by_lemma.iter().map(|(l, _, f)| format!("{l}: {f}")).collect::<Vec<_>>().join(", ")
                ),
                rows: records.iter().map(to_value).collect(),
                result: json!({"failed": failed, "by_lemma": counts, "records": records}),
            })
        }
        Command::Report(_) => {
            let reports = standard_certifications(v).map_err(lib_err)?;
            let failed = reports.iter().filter(|r| !r.pass).count();
            Ok(Outcome {
                pass: failed == 0,
                parameters: json!({"v_source": v}),
                summary: format!("report: {} certifications, {failed} failed", reports.len()),
                rows: reports.iter().map(to_value).collect(),
                result: json!({"certifications": reports}),
            })
        }
    }
}

fn validate_lemma(c: &LemmaAuditConfig) -> Result<(), String> {
    if c.d_min < 100 || c.d_min > c.d_max {
        return Err(format!("lemma-audit needs 100 <= d_min <= d_max, got [{}, {}]", c.d_min, c.d_max));
    }
    if c.stride == 0 {
        return Err("--stride must be positive".into());
    }
    if let Some(x) = c.xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(format!("--xs values must lie in [0, 1], got {x}"));
    }
    if let Some(k) = c.l1chi_h_factors.iter().find(|k| !(**k >= 1.0)) {
        return Err(format!("--h-factors must be at least 1, got {k}"));
    }
    let largest_h = c.l1chi_h_factors.iter().fold(c.l7_h, |m, k| m.max(k * c.d_max as f64));
    if !(c.l7_h > 1.0) || largest_h > DEFAULT_LAB_CAP as f64 {
        return Err(format!(
            "H must lie in (1, {DEFAULT_LAB_CAP}], largest requested is {largest_h}"
        ));
    }
    Ok(())
}
