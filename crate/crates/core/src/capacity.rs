//! BSC capacity and ε-redundancy bookkeeping.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `H(p) = −p·log₂p − (1−p)·log₂(1−p)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// `C(p) = 1 − H(p)`.
pub fn bsc_capacity(p: f64) -> f64 {
    1.0 - binary_entropy(p)
}

/// Redundancy `1 − R` of the product-like ensemble: every bit sits in two
/// constraints, each spending `νt` parity bits (`νt + 1` for the even subcode).
pub fn redundancy(nu: u32, t: usize, even_subcode: bool) -> f64 {
    let n = ((1u64 << nu) - 1) as f64;
    let per_code = nu as f64 * t as f64 + if even_subcode { 1.0 } else { 0.0 };
    2.0 * per_code / n
}

/// Source of the threshold used in a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdSource {
    /// `p* = 2t/n`, the limit of the potential threshold.
    Ideal,
    /// `p* = ρ*/n` from a measured scaled threshold.
    Measured { rho_star: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyReport {
    pub t: usize,
    pub nu: u32,
    pub n: u64,
    pub even_subcode: bool,
    pub rate: f64,
    pub threshold: f64,
    pub source: ThresholdSource,
    /// `(1 − C(p*)) / (1 − R)`.
    pub ratio: f64,
    /// `(ε, ratio ≥ 1 − ε)` for each requested target.
    pub epsilon_achieving: Vec<(f64, bool)>,
}

impl RedundancyReport {
    pub fn new(nu: u32, t: usize, even_subcode: bool, source: ThresholdSource, targets: &[f64]) -> Result<Self> {
        if !(2..=62).contains(&nu) || t == 0 {
            return Err(Error::config(format!("invalid (nu={nu}, t={t})")));
        }
        let n = (1u64 << nu) - 1;
        let red = redundancy(nu, t, even_subcode);
        if red >= 1.0 {
            return Err(Error::config(format!("rate is not positive for nu={nu}, t={t}")));
        }
        let threshold = match source {
            ThresholdSource::Ideal => 2.0 * t as f64 / n as f64,
            ThresholdSource::Measured { rho_star } => rho_star / n as f64,
        };
        let ratio = (1.0 - bsc_capacity(threshold)) / red;
        Ok(Self {
            t,
            nu,
            n,
            even_subcode,
            rate: 1.0 - red,
            threshold,
            source,
            ratio,
            epsilon_achieving: targets.iter().map(|&e| (e, ratio >= 1.0 - e)).collect(),
        })
    }

    pub fn achieves(&self, epsilon: f64) -> bool {
        self.ratio >= 1.0 - epsilon
    }
}

/// One report per `ν` in `nu_range`.
pub fn capacity_ratio_sweep(
    t: usize,
    nu_range: impl IntoIterator<Item = u32>,
    even_subcode: bool,
    source: ThresholdSource,
    targets: &[f64],
) -> Result<Vec<RedundancyReport>> {
    nu_range
        .into_iter()
        .map(|nu| RedundancyReport::new(nu, t, even_subcode, source, targets))
        .collect()
}

/// CSV with columns `nu,n,t,rate,threshold,ratio` plus one flag column per target.
pub fn write_reports_csv<W: Write>(reports: &[RedundancyReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["nu".to_string(), "n".into(), "t".into(), "rate".into(), "threshold".into(), "ratio".into()];
    if let Some(r) = reports.first() {
        header.extend(r.epsilon_achieving.iter().map(|(e, _)| format!("achieves_eps_{e}")));
    }
    w.write_record(&header)?;
    for r in reports {
        let mut row = vec![
            r.nu.to_string(),
            r.n.to_string(),
            r.t.to_string(),
            format!("{:.12}", r.rate),
            format!("{:e}", r.threshold),
            format!("{:.12}", r.ratio),
        ];
        row.extend(r.epsilon_achieving.iter().map(|(_, ok)| ok.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
