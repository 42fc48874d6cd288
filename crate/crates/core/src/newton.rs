//! Damped Newton driver shared by the radial and planar solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solution::SolutionPair;

/// Backtracking line search on `½‖F‖²` with an Armijo sufficient-decrease test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Damping {
    pub backtrack: f64,
    pub min_step: f64,
    pub armijo: f64,
}

impl Default for Damping {
    fn default() -> Self {
        Damping {
            backtrack: 0.5,
            min_step: 2f64.powi(-20),
            armijo: 1e-4,
        }
    }
}

/// How Newton's first iterate is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Init {
    /// `u₀ = λ^{(p+1)/(pq−1)} φ̂`, `v₀ = λ^{(q+1)/(pq−1)} φ̂` with `φ̂` the first
    /// Dirichlet eigenfunction scaled to unit maximum.
    EigenfunctionScaled,
    /// Start from a previous solution, resampled if its radial grid differs.
    WarmStart(Box<SolutionPair>),
}

pub(crate) trait NewtonProblem {
    fn residual(&self, x: &[f64], out: &mut [f64]);
    /// Solves `J(x) δ = −res`.
    fn step(&mut self, x: &[f64], res: &[f64]) -> Result<Vec<f64>>;
    /// Normalization for the max-norm residual.
    fn scale(&self, x: &[f64]) -> f64;
    /// Smallest relative residual that rounding allows at `x`.
    fn rounding_floor(&self, x: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Converged,
    Stalled,
    PositivityLost,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub iterations: usize,
    pub status: Status,
}

/// Maps a finished Newton run onto the public error contract.
pub(crate) fn into_result(pair: SolutionPair, status: Status) -> Result<SolutionPair> {
    match status {
        Status::Converged => Ok(pair),
        Status::Stalled => Err(Error::NonConvergence {
            best: Box::new(pair),
        }),
        Status::PositivityLost => Err(Error::PositivityLoss {
            best: Box::new(pair),
        }),
    }
}

pub(crate) fn validate(tol: f64, max_iter: usize, d: &Damping) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::InvalidConfig(format!(
            "tol must lie in (0, 1e-4], got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
    }
    let ok = d.backtrack > 0.0
        && d.backtrack < 1.0
        && d.min_step > 0.0
        && d.armijo > 0.0
        && d.armijo < 0.5;
    if !ok {
        return Err(Error::InvalidConfig(format!(
            "bad damping parameters {d:?}"
        )));
    }
    Ok(())
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn sq_norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Runs damped Newton from `x`. Trial points with a negative entry are
/// treated as failed line-search steps.
pub(crate) fn solve(
    problem: &mut impl NewtonProblem,
    mut x: Vec<f64>,
    tol: f64,
    max_iter: usize,
    damping: Damping,
) -> Result<Outcome> {
    let n = x.len();
    let mut res = vec![0.0; n];
    let mut trial_res = vec![0.0; n];
    let mut trial = vec![0.0; n];
    problem.residual(&x, &mut res);
    let mut iterations = 0;
    loop {
        let rel = max_abs(&res) / problem.scale(&x);
        let effective = tol.max(problem.rounding_floor(&x));
        let finish = |x: Vec<f64>, status| Outcome {
            x,
            rel_residual: rel,
            tolerance: effective,
            iterations,
            status,
        };
        if rel <= effective {
            return Ok(finish(x, Status::Converged));
        }
        if iterations >= max_iter || !rel.is_finite() {
            return Ok(finish(x, Status::Stalled));
        }
        let delta = problem.step(&x, &res)?;
        let f0 = sq_norm(&res);
        let mut t = 1.0;
        let mut saw_negative = false;
        let accepted = loop {
            for i in 0..n {
                trial[i] = x[i] + t * delta[i];
            }
            if trial.iter().any(|&v| v < 0.0 || !v.is_finite()) {
                saw_negative = true;
            } else {
                problem.residual(&trial, &mut trial_res);
                let f1 = sq_norm(&trial_res);
                if f1.is_finite() && f1 <= (1.0 - 2.0 * damping.armijo * t) * f0 {
                    break true;
                }
            }
            t *= damping.backtrack;
            if t < damping.min_step {
                break false;
            }
        };
        if !accepted {
            let status = if saw_negative {
                Status::PositivityLost
            } else {
                Status::Stalled
            };
            return Ok(finish(x, status));
        }
        iterations += 1;
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut res, &mut trial_res);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `x² − 4 = 0` started far away; positivity keeps the root at +2.
    struct Square;

    impl NewtonProblem for Square {
        fn residual(&self, x: &[f64], out: &mut [f64]) {
            out[0] = x[0] * x[0] - 4.0;
        }
        fn step(&mut self, x: &[f64], res: &[f64]) -> Result<Vec<f64>> {
            Ok(vec![-res[0] / (2.0 * x[0])])
        }
        fn scale(&self, _: &[f64]) -> f64 {
            4.0
        }
        fn rounding_floor(&self, _: &[f64]) -> f64 {
            0.0
        }
    }

    #[test]
    fn converges_to_positive_root() {
        let out = solve(&mut Square, vec![50.0], 1e-14, 50, Damping::default()).unwrap();
        assert_eq!(out.status, Status::Converged);
        assert!((out.x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reports_stall_when_budget_is_exhausted() {
        let out = solve(&mut Square, vec![50.0], 1e-14, 2, Damping::default()).unwrap();
        assert_eq!(out.status, Status::Stalled);
        assert_eq!(out.iterations, 2);
    }
}
