//! Five-point finite-difference Newton solver on origin-centered rectangles.
//!
//! The Jacobian `[[A, −D_v], [−D_u, A]]` (`A = −Δ_h`, `D` diagonal) is not
//! symmetric, so Newton steps are computed with restarted GMRES, right
//! preconditioned by a fast sine-transform Poisson solve on each block.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::grid::{Grid, PlanarGrid};
use crate::linalg::{gmres, GmresOptions, RectPoisson};
use crate::newton::{self, Damping, Init, NewtonProblem};
use crate::power::pow_unchecked;
use crate::solution::{Field, SolutionPair};
use crate::spectral::planar_laplacian;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarSolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: Damping,
    /// Relative residual target for each linear solve.
    pub linear_tol: f64,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
    pub init: Init,
}

impl Default for PlanarSolveConfig {
    fn default() -> Self {
        PlanarSolveConfig {
            tol: 1e-10,
            max_iter: 200,
            damping: Damping::default(),
            linear_tol: 1e-12,
            gmres_restart: 60,
            gmres_max_iter: 600,
            init: Init::EigenfunctionScaled,
        }
    }
}

impl PlanarSolveConfig {
    pub fn validate(&self) -> Result<()> {
        newton::validate(self.tol, self.max_iter, &self.damping)?;
        if !(self.linear_tol > 0.0 && self.linear_tol < 1.0) || self.gmres_restart == 0 {
            return Err(Error::InvalidConfig("bad linear solver settings".into()));
        }
        Ok(())
    }
}

/// Unknowns stored as `[u (lexicographic), v (lexicographic)]`.
struct PlanarSystem {
    grid: PlanarGrid,
    e: ExponentPair,
    poisson: RectPoisson,
    opts: GmresOptions,
}

impl PlanarSystem {
    fn maxima(&self, x: &[f64]) -> (f64, f64) {
        let n = self.grid.len();
        let m = x[..n].iter().copied().fold(0.0, f64::max);
        let nn = x[n..].iter().copied().fold(0.0, f64::max);
        (m, nn)
    }
}

impl NewtonProblem for PlanarSystem {
    fn residual(&self, x: &[f64], out: &mut [f64]) {
        let n = self.grid.len();
        let (u, v) = x.split_at(n);
        let (ru, rv) = out.split_at_mut(n);
        planar_laplacian(&self.grid, u, ru);
        planar_laplacian(&self.grid, v, rv);
        for k in 0..n {
            ru[k] -= pow_unchecked(v[k], self.e.p()).0;
            rv[k] -= pow_unchecked(u[k], self.e.q()).0;
        }
    }

    fn step(&mut self, x: &[f64], res: &[f64]) -> Result<Vec<f64>> {
        let n = self.grid.len();
        let du: Vec<f64> = x[..n]
            .iter()
            .map(|&u| pow_unchecked(u, self.e.q()).1)
            .collect();
        let dv: Vec<f64> = x[n..]
            .iter()
            .map(|&v| pow_unchecked(v, self.e.p()).1)
            .collect();
        let grid = self.grid;
        let apply = |z: &[f64], out: &mut [f64]| {
            let (zu, zv) = z.split_at(n);
            let (ou, ov) = out.split_at_mut(n);
            planar_laplacian(&grid, zu, ou);
            planar_laplacian(&grid, zv, ov);
            for k in 0..n {
                ou[k] -= dv[k] * zv[k];
                ov[k] -= du[k] * zu[k];
            }
        };
        let poisson = &self.poisson;
        let precond = |z: &[f64], out: &mut [f64]| {
            out.copy_from_slice(z);
            let (ou, ov) = out.split_at_mut(n);
            poisson.solve_in_place(ou);
            poisson.solve_in_place(ov);
        };
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        let mut delta = vec![0.0; 2 * n];
        // an inexact step is still usable; the line search guards it
        gmres(apply, precond, &rhs, &mut delta, self.opts);
        Ok(delta)
    }

    fn scale(&self, x: &[f64]) -> f64 {
        let (m, nmax) = self.maxima(x);
        let s = pow_unchecked(nmax, self.e.p())
            .0
            .max(pow_unchecked(m, self.e.q()).0);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    fn rounding_floor(&self, x: &[f64]) -> f64 {
        let (m, nmax) = self.maxima(x);
        let h = self.grid.hx().min(self.grid.hy());
        let s = self.scale(x);
        32.0 * f64::EPSILON * (8.0 * m.max(nmax) / (h * h) + s) / s
    }
}

fn initial_iterate(e: &ExponentPair, grid: &PlanarGrid, init: &Init) -> Result<Vec<f64>> {
    let n = grid.len();
    let mut x = vec![0.0; 2 * n];
    match init {
        Init::EigenfunctionScaled => {
            let (a, b) = grid.sides();
            let lambda = PI * PI * (1.0 / (a * a) + 1.0 / (b * b));
            let k = e.margin();
            let su = lambda.powf((e.p() + 1.0) / k);
            let sv = lambda.powf((e.q() + 1.0) / k);
            for idx in 0..n {
                let (px, py) = grid.coords(idx);
                let phi = (PI * px / a).cos() * (PI * py / b).cos();
                x[idx] = su * phi;
                x[n + idx] = sv * phi;
            }
        }
        Init::WarmStart(s) => {
            if s.grid() != &Grid::Planar(*grid) {
                return Err(Error::GridMismatch);
            }
            x[..n].copy_from_slice(s.u.values());
            x[n..].copy_from_slice(s.v.values());
        }
    }
    for v in x.iter_mut() {
        *v = v.max(0.0);
    }
    Ok(x)
}

/// Damped Newton for the system on a rectangle.
pub fn solve_planar(
    e: ExponentPair,
    grid: PlanarGrid,
    cfg: &PlanarSolveConfig,
) -> Result<SolutionPair> {
    cfg.validate()?;
    let x0 = initial_iterate(&e, &grid, &cfg.init)?;
    let mut system = PlanarSystem {
        grid,
        e,
        poisson: RectPoisson::new(grid.nx(), grid.ny(), grid.hx(), grid.hy()),
        opts: GmresOptions {
            restart: cfg.gmres_restart,
            max_iter: cfg.gmres_max_iter,
            rel_tol: cfg.linear_tol,
        },
    };
    let out = newton::solve(&mut system, x0, cfg.tol, cfg.max_iter, cfg.damping)?;
    let n = grid.len();
    let pair = SolutionPair {
        exponents: e,
        u: Field::new(grid.into(), out.x[..n].to_vec())?,
        v: Field::new(grid.into(), out.x[n..].to_vec())?,
        residual_norm: out.rel_residual,
        tolerance: out.tolerance,
        newton_iterations: out.iterations,
        converged: out.status == newton::Status::Converged,
    };
    newton::into_result(pair, out.status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;

    #[test]
    fn square_solution_peaks_at_center() {
        let n = 31;
        let g = PlanarGrid::new(DomainSpec::unit_square(), n, n).unwrap();
        let e = ExponentPair::new(2.0, 2.0).unwrap();
        let s = solve_planar(e, g, &PlanarSolveConfig::default()).unwrap();
        assert!(s.converged);
        assert_eq!(s.u.argmax(), g.index(15, 15));
        assert!(s.u.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn residual_meets_tolerance_for_unequal_exponents() {
        let g = PlanarGrid::new(DomainSpec::rectangle(1.0, 2.0).unwrap(), 23, 47).unwrap();
        let e = ExponentPair::new(2.0, 3.0).unwrap();
        let s = solve_planar(e, g, &PlanarSolveConfig::default()).unwrap();
        assert!(s.residual_norm <= s.tolerance);
        // symmetric about both axes
        let u = s.u.values();
        for j in 0..47 {
            for i in 0..23 {
                let a = u[g.index(i, j)];
                let b = u[g.index(22 - i, 46 - j)];
                assert!((a - b).abs() < 1e-8 * s.max_u());
            }
        }
    }
}
