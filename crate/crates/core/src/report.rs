//! Serializable report records shared by the command-line front end.

use serde::{Deserialize, Serialize};

use crate::character::Parity;
use crate::engine::{certify_with, Modulus, ThetaBranch, ThetaCertificate, VSource};
use crate::error::Result;
use crate::rounding::POLICY_NAME;

/// The four threshold selections reproduced by [`standard_certifications`]:
/// `(parity, B, q₀, c)`.
pub const STANDARD_CASES: [(Parity, f64, &str, f64); 4] = [
    (Parity::Even, 51.0, "7e22", 0.5),
    (Parity::Odd, 90.0, "2e23", 0.5),
    (Parity::Even, 80.0, "2e49", 0.45),
    (Parity::Odd, 145.0, "5e50", 0.45),
];

/// Flat certification record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub q0: f64,
    pub log10_q0: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub parity: Parity,
    pub target_c: f64,
    #[serde(rename = "V0")]
    pub v0: f64,
    #[serde(rename = "H0")]
    pub h0: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub a: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub r_chi: f64,
    pub delta_chi: f64,
    pub theta_star: f64,
    pub theta_branch: ThetaBranch,
    pub coefficient: f64,
    pub margin: f64,
    pub pass: bool,
    pub v_source: VSource,
    pub rounding_policy: String,
    pub notes: Vec<String>,
}

impl CertificationReport {
    pub fn from_certificate(cert: &ThetaCertificate) -> Self {
        let p = &cert.params;
        let mut notes = vec![
            "epsilon_1 bounds |f(1)| by delta(chi) V/H with delta(chi) = (3 - chi(-1))/4".to_string(),
        ];
        if p.v_source == VSource::Lapkova {
            notes.push("V from the parity-dependent bound: exploratory, not the reference pipeline".to_string());
        }
        if let Some(c) = cert.target_c {
            if (c - 0.45).abs() < 1e-12 || (c - 0.225).abs() < 1e-12 {
                notes.push(
                    "the 9/20 statement is sometimes printed as 9/40; both targets can be certified by passing --c".to_string(),
                );
            }
        }
        CertificationReport {
            q0: p.q0,
            log10_q0: p.ln_q0 / std::f64::consts::LN_10,
            b: p.b,
            parity: p.parity,
            target_c: cert.target_c.unwrap_or(f64::NAN),
            v0: p.v0,
            h0: p.h0,
            a2: p.a2,
            d: p.d,
            a: p.a,
            eps1: p.eps1,
            eps2: p.eps2,
            r_chi: p.r_chi,
            delta_chi: p.delta_chi,
            theta_star: cert.theta_star,
            theta_branch: cert.branch,
            coefficient: cert.coefficient.unwrap_or(f64::NAN),
            margin: cert.margin.unwrap_or(f64::NAN),
            pass: cert.pass.unwrap_or(false),
            v_source: p.v_source,
            rounding_policy: POLICY_NAME.to_string(),
            notes,
        }
    }
}

/// Certifies the four standard selections.
pub fn standard_certifications(v_source: VSource) -> Result<Vec<CertificationReport>> {
    STANDARD_CASES
        .iter()
        .map(|&(parity, b, q0, c)| {
            let cert = certify_with(q0.parse::<Modulus>()?, b, parity, c, v_source)?;
            Ok(CertificationReport::from_certificate(&cert))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_echoes_parameters() {
        let cert = certify_with("2e23".parse().unwrap(), 90.0, Parity::Odd, 0.5, VSource::default()).unwrap();
        let r = CertificationReport::from_certificate(&cert);
        assert_eq!(r.b, 90.0);
        assert_eq!(r.parity, Parity::Odd);
        assert!((r.log10_q0 - (23.0 + 2f64.log10())).abs() < 1e-12);
        assert_eq!(r.coefficient, cert.coefficient.unwrap());
        assert_eq!(r.margin, 0.5 - r.coefficient);
        assert_eq!(r.rounding_policy, "inflate-1e-12");
    }

    #[test]
    fn four_standard_cases() {
        let rows = standard_certifications(VSource::default()).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[2].notes.iter().any(|n| n.contains("9/40")));
        assert!(rows.iter().all(|r| r.coefficient.is_finite()));
    }
}
