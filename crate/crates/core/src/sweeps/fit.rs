use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{linear_fit, LinearFit};

use super::SweepTable;

/// `N ≈ slope·log q + intercept` over the converged `p = 1` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub fit: LinearFit,
    /// `(q, N / log q)`.
    pub ratios: Vec<(f64, f64)>,
    /// max/min of the ratio column.
    pub ratio_spread: f64,
    /// `(q̄, q̄·ΔN/Δq)` between consecutive rows, `q̄` the geometric mean.
    pub growth: Vec<(f64, f64)>,
}

/// Least squares of `N` against `log q` over converged rows with `q ≥ q_min`.
pub fn fit_logarithmic(table: &SweepTable, q_min: f64) -> Result<LogFit> {
    if table.rows.iter().any(|r| r.p != 1.0) {
        return Err(Error::InvalidInput(
            "logarithmic fit needs a p = 1 sweep".into(),
        ));
    }
    let rows: Vec<(f64, f64)> = table
        .converged()
        .filter(|r| r.q >= q_min && r.q > 1.0)
        .map(|r| (r.q, r.n))
        .collect();
    if rows.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: rows.len(),
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let ratios: Vec<(f64, f64)> = rows.iter().map(|&(q, n)| (q, n / q.ln())).collect();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
        (lo.min(r.1), hi.max(r.1))
    });
    let growth = rows
        .windows(2)
        .map(|w| {
            let qm = (w[0].0 * w[1].0).sqrt();
            (qm, qm * (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        })
        .collect();
    Ok(LogFit {
        fit: linear_fit(&x, &y)?,
        ratios,
        ratio_spread: hi / lo,
        growth,
    })
}
