//! Warm-start continuation in the exponents.
//!
//! Paths are log-linear in `(p, q)`. Each step moves at most `ln 2 / 4` in
//! `max(|Δ ln p|, |Δ ln q|)`; a failed step is halved, and the path is
//! abandoned once the step drops below `ln 2 / 64`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::grid::RadialGrid;
use crate::solution::SolutionPair;

use super::newton::{solve_newton, RadialSolveConfig};
use crate::newton::Init;

pub const DEFAULT_STEP: f64 = LN_2 / 4.0;
pub const MIN_STEP: f64 = LN_2 / 64.0;
/// Start of the fallback path for cold solves that fail.
pub const SEED: (f64, f64) = (2.0, 2.0);

fn is_recoverable(err: &Error) -> bool {
    matches!(
        err,
        Error::NonConvergence { .. } | Error::PositivityLoss { .. }
    )
}

/// Follows the log-linear path from `start.exponents` to `target`, warm
/// starting every solve from the previous one.
pub fn continue_path(
    start: SolutionPair,
    target: ExponentPair,
    grid: RadialGrid,
    cfg: &RadialSolveConfig,
) -> Result<SolutionPair> {
    let (lp0, lq0) = (start.exponents.p().ln(), start.exponents.q().ln());
    let (lp1, lq1) = (target.p().ln(), target.q().ln());
    let dist = (lp1 - lp0).abs().max((lq1 - lq0).abs());
    let mut current = start;
    let mut done = 0.0;
    let mut step = DEFAULT_STEP;
    // a zero-length path still re-solves on `grid`
    loop {
        let dt = step.min(dist - done);
        let reached = done + dt >= dist;
        let e = if reached {
            target
        } else {
            let s = (done + dt) / dist;
            ExponentPair::new((lp0 + s * (lp1 - lp0)).exp(), (lq0 + s * (lq1 - lq0)).exp())?
        };
        let step_cfg = RadialSolveConfig {
            init: Init::WarmStart(Box::new(current.clone())),
            ..cfg.clone()
        };
        match solve_newton(e, grid, &step_cfg) {
            Ok(next) => {
                current = next;
                if reached {
                    return Ok(current);
                }
                done += dt;
                step = (2.0 * step).min(DEFAULT_STEP);
            }
            Err(err) if is_recoverable(&err) && dist > 0.0 => {
                step *= 0.5;
                if step < MIN_STEP {
                    return Err(Error::ContinuationStalled { p: e.p(), q: e.q() });
                }
            }
            Err(err) => return Err(err),
        }
    }
}

/// Cold solve, falling back to continuation from [`SEED`] when Newton fails
/// from the eigenfunction start.
pub fn solve_with_continuation(
    e: ExponentPair,
    grid: RadialGrid,
    cfg: &RadialSolveConfig,
) -> Result<SolutionPair> {
    let cold = RadialSolveConfig {
        init: Init::EigenfunctionScaled,
        ..cfg.clone()
    };
    match solve_newton(e, grid, &cold) {
        Err(err) if is_recoverable(&err) => {
            let seed = ExponentPair::new(SEED.0, SEED.1)?;
            let start = solve_newton(seed, grid, &cold)?;
            continue_path(start, e, grid, cfg)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn continuation_matches_cold_solve() {
        let g = RadialGrid::new(1.0, 128).unwrap();
        let cfg = RadialSolveConfig::default();
        let target = ExponentPair::new(1.0, 8.0).unwrap();
        let start = solve_newton(ExponentPair::new(2.0, 2.0).unwrap(), g, &cfg).unwrap();
        let warm = continue_path(start, target, g, &cfg).unwrap();
        let cold = solve_newton(target, g, &cfg).unwrap();
        assert!((warm.max_u() / cold.max_u() - 1.0).abs() < 1e-8);
        assert!((warm.max_v() / cold.max_v() - 1.0).abs() < 1e-8);
    }
}
