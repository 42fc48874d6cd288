use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::grid::{Grid, RadialGrid};
use crate::linalg::BandedMatrix;
use crate::newton::{self, Damping, Init, NewtonProblem, Status};
use crate::power::pow_unchecked;
use crate::solution::{Field, SolutionPair};
use crate::spectral::grid_eigenpair;

use super::residual::neg_laplacian;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolveConfig {
    /// Target for `max |res| / max(N^p, M^q)`.
    pub tol: f64,
    pub max_iter: usize,
    pub damping: Damping,
    pub init: Init,
}

impl Default for RadialSolveConfig {
    fn default() -> Self {
        RadialSolveConfig {
            tol: 1e-10,
            max_iter: 200,
            damping: Damping::default(),
            init: Init::EigenfunctionScaled,
        }
    }
}

impl RadialSolveConfig {
    pub fn warm(from: SolutionPair) -> Self {
        RadialSolveConfig {
            init: Init::WarmStart(Box::new(from)),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        newton::validate(self.tol, self.max_iter, &self.damping)
    }
}

/// Interleaved unknowns `[u₀, v₀, u₁, v₁, …, u_{n−1}, v_{n−1}]`.
struct RadialSystem {
    grid: RadialGrid,
    e: ExponentPair,
}

impl RadialSystem {
    fn split(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.n();
        let mut u = vec![0.0; n + 1];
        let mut v = vec![0.0; n + 1];
        for i in 0..n {
            u[i] = x[2 * i];
            v[i] = x[2 * i + 1];
        }
        (u, v)
    }

    fn maxima(x: &[f64]) -> (f64, f64) {
        x.chunks(2)
            .fold((0.0f64, 0.0f64), |(m, n), c| (m.max(c[0]), n.max(c[1])))
    }
}

impl NewtonProblem for RadialSystem {
    fn residual(&self, x: &[f64], out: &mut [f64]) {
        let (u, v) = self.split(x);
        for i in 0..self.grid.n() {
            out[2 * i] = neg_laplacian(&self.grid, &u, i) - pow_unchecked(v[i], self.e.p()).0;
            out[2 * i + 1] = neg_laplacian(&self.grid, &v, i) - pow_unchecked(u[i], self.e.q()).0;
        }
    }

    fn step(&mut self, x: &[f64], res: &[f64]) -> Result<Vec<f64>> {
        let g = &self.grid;
        let n = g.n();
        let h = g.h();
        let a = 1.0 / (h * h);
        let mut jac = BandedMatrix::zeros(2 * n, 2, 2);
        for c in 0..2 {
            // c = 0: u-equation (couples to v through v^p); c = 1: the mirror
            let (own, other_exp) = if c == 0 {
                (0, self.e.p())
            } else {
                (1, self.e.q())
            };
            let other = 1 - own;
            for i in 0..n {
                let row = 2 * i + own;
                if i == 0 {
                    jac.set(row, own, 4.0 * a);
                    jac.set(row, 2 + own, -4.0 * a);
                } else {
                    let cr = 1.0 / (2.0 * g.node(i) * h);
                    jac.set(row, 2 * (i - 1) + own, -(a - cr));
                    jac.set(row, 2 * i + own, 2.0 * a);
                    if i + 1 < n {
                        jac.set(row, 2 * (i + 1) + own, -(a + cr));
                    }
                }
                let d = pow_unchecked(x[2 * i + other], other_exp).1;
                jac.set(row, 2 * i + other, -d);
            }
        }
        let lu = jac.factorize()?;
        let mut delta: Vec<f64> = res.iter().map(|r| -r).collect();
        lu.solve_in_place(&mut delta);
        Ok(delta)
    }

    fn scale(&self, x: &[f64]) -> f64 {
        let (m, nmax) = Self::maxima(x);
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
        let (m, nmax) = Self::maxima(x);
        let h = self.grid.h();
        let s = self.scale(x);
        32.0 * f64::EPSILON * (4.0 * m.max(nmax) / (h * h) + s) / s
    }
}

/// Linear interpolation in `r` of a radial field onto another radial grid of
/// the same radius.
pub(crate) fn resample(f: &Field, target: &RadialGrid) -> Result<Vec<f64>> {
    let Grid::Radial(src) = *f.grid() else {
        return Err(Error::InvalidGrid("warm start must be radial".into()));
    };
    if (src.radius() - target.radius()).abs() > 1e-12 * target.radius() {
        return Err(Error::InvalidGrid(format!(
            "warm start radius {} differs from {}",
            src.radius(),
            target.radius()
        )));
    }
    if src == *target {
        return Ok(f.values().to_vec());
    }
    let vals = f.values();
    let hs = src.h();
    Ok((0..=target.n())
        .map(|i| {
            let s = target.node(i) / hs;
            let k = (s.floor() as usize).min(src.n() - 1);
            let t = s - k as f64;
            (1.0 - t) * vals[k] + t * vals[k + 1]
        })
        .collect())
}

fn initial_iterate(e: &ExponentPair, grid: &RadialGrid, init: &Init) -> Result<Vec<f64>> {
    let n = grid.n();
    let (u0, v0) = match init {
        Init::EigenfunctionScaled => {
            let (lambda, phi, ..) = grid_eigenpair(&Grid::Radial(*grid))?;
            let top = phi.iter().copied().fold(0.0, f64::max);
            let k = e.margin();
            let su = lambda.powf((e.p() + 1.0) / k);
            let sv = lambda.powf((e.q() + 1.0) / k);
            let u: Vec<f64> = phi.iter().map(|f| su * f / top).collect();
            let v: Vec<f64> = phi.iter().map(|f| sv * f / top).collect();
            (u, v)
        }
        Init::WarmStart(s) => (resample(&s.u, grid)?, resample(&s.v, grid)?),
    };
    let mut x = vec![0.0; 2 * n];
    for i in 0..n {
        x[2 * i] = u0[i].max(0.0);
        x[2 * i + 1] = v0[i].max(0.0);
    }
    Ok(x)
}

/// Damped Newton on the radial system. Fails with `NonConvergence` or
/// `PositivityLoss`; both carry the best iterate.
pub fn solve_newton(
    e: ExponentPair,
    grid: RadialGrid,
    cfg: &RadialSolveConfig,
) -> Result<SolutionPair> {
    cfg.validate()?;
    let x0 = initial_iterate(&e, &grid, &cfg.init)?;
    let mut system = RadialSystem { grid, e };
    let out = newton::solve(&mut system, x0, cfg.tol, cfg.max_iter, cfg.damping)?;
    let (u, v) = system.split(&out.x);
    let pair = SolutionPair {
        exponents: e,
        u: Field::new(grid.into(), u)?,
        v: Field::new(grid.into(), v)?,
        residual_norm: out.rel_residual,
        tolerance: out.tolerance,
        newton_iterations: out.iterations,
        converged: out.status == Status::Converged,
    };
    newton::into_result(pair, out.status)
}
