//! Doubling scans `m = n = n0 * 2^i` over one generator family.

use serde::{Deserialize, Serialize};

use crate::engine::{bound_ratio, count, exponent_fit, CountOptions, ExponentFit};
use crate::generators::{gen, GenKind, GenSpec};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub m: usize,
    pub n: usize,
    pub total: u64,
    pub bound_ratio: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub family: GenKind,
    /// Sorted by `m`.
    pub rows: Vec<ScanRow>,
    /// Present iff there are at least 3 rows.
    pub exponent: Option<ExponentFit>,
    /// Largest `bound_ratio` seen; report-only.
    pub max_bound_ratio: f64,
}

pub const CSV_HEADER: [&str; 6] = ["family", "m", "n", "total", "bound_ratio", "seconds"];

impl ScanResult {
    pub fn csv_rows(&self) -> Vec<[String; 6]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    self.family.name().to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    r.total.to_string(),
                    format!("{:.6}", r.bound_ratio),
                    format!("{:.6}", r.seconds),
                ]
            })
            .collect()
    }

    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.rows {
            r.seconds = 0.0;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub family: GenKind,
    pub n0: usize,
    /// Number of rows; the last one is at `n0 * 2^(doublings - 1)`.
    pub doublings: usize,
    #[serde(default)]
    pub density: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

pub fn scan(spec: &ScanSpec, opts: &CountOptions) -> Result<ScanResult> {
    if spec.n0 == 0 || spec.doublings == 0 {
        return Err(Error::InfeasibleSpec("scan needs n0 >= 1 and doublings >= 1".into()));
    }
    let mut rows = Vec::with_capacity(spec.doublings);
    for i in 0..spec.doublings {
        let size = spec
            .n0
            .checked_shl(i as u32)
            .filter(|s| s >> i == spec.n0)
            .ok_or_else(|| Error::InfeasibleSpec("scan size overflows".into()))?;
        let mut gs = GenSpec::new(spec.family, size, size, spec.seed.wrapping_add(i as u64));
        if let Some(d) = spec.density {
            gs = gs.with_density(d);
        }
        let g = gen(&gs)?;
        let rep = count(&g.instance, opts)?;
        rows.push(ScanRow {
            m: rep.m,
            n: rep.n,
            total: rep.total,
            bound_ratio: bound_ratio(&rep),
            seconds: rep.seconds,
        });
    }
    let series: Vec<(usize, usize, u64)> = rows.iter().map(|r| (r.m, r.n, r.total)).collect();
    let exponent = if rows.len() >= 3 { Some(exponent_fit(&series)?) } else { None };
    let max_bound_ratio = rows.iter().map(|r| r.bound_ratio).fold(0.0, f64::max);
    Ok(ScanResult {
        family: spec.family,
        rows,
        exponent,
        max_bound_ratio,
    })
}
