//! First Dirichlet eigenpair of `−Δ` by inverse power iteration.

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::grid::{Grid, PlanarGrid, RadialGrid};
use crate::linalg::{BandedLu, BandedMatrix, RectPoisson};
use crate::quadrature::node_weights;
use crate::solution::{Eigenpair, Field};

/// Minimum resolution accepted by [`first_dirichlet_eigenpair`].
pub const MIN_RESOLUTION: usize = 64;
/// Relative eigenvalue drift per step at which iteration stops.
pub const DRIFT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 1000;

/// Discrete `−Δ` on the radial unknowns `0..n` (the boundary value is zero).
pub(crate) fn radial_laplacian(g: &RadialGrid) -> BandedMatrix {
    let n = g.n();
    let h = g.h();
    let a = 1.0 / (h * h);
    let mut m = BandedMatrix::zeros(n, 1, 1);
    m.set(0, 0, 4.0 * a);
    m.set(0, 1, -4.0 * a);
    for i in 1..n {
        let c = 1.0 / (2.0 * g.node(i) * h);
        m.set(i, i - 1, -(a - c));
        m.set(i, i, 2.0 * a);
        if i + 1 < n {
            m.set(i, i + 1, -(a + c));
        }
    }
    m
}

/// `(−Δ_h f)` at stored nodes for a field vanishing on the boundary.
pub(crate) fn apply_laplacian(grid: &Grid, f: &[f64]) -> Vec<f64> {
    match grid {
        Grid::Radial(g) => {
            let n = g.n();
            let mut out = vec![0.0; n + 1];
            radial_laplacian(g).mul_vec(&f[..n], &mut out[..n]);
            out
        }
        Grid::Planar(g) => {
            let mut out = vec![0.0; g.len()];
            planar_laplacian(g, f, &mut out);
            out
        }
    }
}

pub(crate) fn planar_laplacian(g: &PlanarGrid, f: &[f64], out: &mut [f64]) {
    let (nx, ny) = (g.nx(), g.ny());
    let (ax, ay) = (1.0 / (g.hx() * g.hx()), 1.0 / (g.hy() * g.hy()));
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let c = f[k];
            let w = if i > 0 { f[k - 1] } else { 0.0 };
            let e = if i + 1 < nx { f[k + 1] } else { 0.0 };
            let s = if j > 0 { f[k - nx] } else { 0.0 };
            let nn = if j + 1 < ny { f[k + nx] } else { 0.0 };
            out[k] = ax * (2.0 * c - w - e) + ay * (2.0 * c - s - nn);
        }
    }
}

enum Inverse {
    Radial(BandedLu, usize),
    Planar(RectPoisson),
}

impl Inverse {
    fn new(grid: &Grid) -> Result<Self> {
        Ok(match grid {
            Grid::Radial(g) => Inverse::Radial(radial_laplacian(g).factorize()?, g.n()),
            Grid::Planar(g) => Inverse::Planar(RectPoisson::new(g.nx(), g.ny(), g.hx(), g.hy())),
        })
    }

    fn solve(&self, x: &mut [f64]) {
        match self {
            Inverse::Radial(lu, n) => lu.solve_in_place(&mut x[..*n]),
            Inverse::Planar(p) => p.solve_in_place(x),
        }
    }
}

/// Discrete Rayleigh quotient `Σ w f (−Δ_h f) / Σ w f²`.
pub fn rayleigh_quotient(f: &Field) -> f64 {
    let w = node_weights(f.grid());
    let lf = apply_laplacian(f.grid(), f.values());
    let num: f64 = w
        .iter()
        .zip(f.values().iter().zip(&lf))
        .map(|(w, (a, b))| w * a * b)
        .sum();
    let den: f64 = w.iter().zip(f.values()).map(|(w, a)| w * a * a).sum();
    num / den
}

/// Eigenpair of the discrete operator on `grid`, without extrapolation.
pub(crate) fn grid_eigenpair(grid: &Grid) -> Result<(f64, Vec<f64>, usize, bool)> {
    let inverse = Inverse::new(grid)?;
    let weights = node_weights(grid);
    let len = grid.len();
    let stored = match grid {
        Grid::Radial(g) => g.n(),
        Grid::Planar(g) => g.len(),
    };
    // positive start vector vanishing on the boundary
    let mut x: Vec<f64> = (0..len)
        .map(|k| if k < stored { 1.0 } else { 0.0 })
        .collect();
    let wdot = |a: &[f64], b: &[f64]| -> f64 {
        weights
            .iter()
            .zip(a.iter().zip(b))
            .map(|(w, (p, q))| w * p * q)
            .sum()
    };
    let mut lambda = f64::INFINITY;
    let mut drift = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let mut y = x.clone();
        inverse.solve(&mut y);
        let next = wdot(&x, &x) / wdot(&x, &y);
        let norm = wdot(&y, &y).sqrt();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        drift = ((next - lambda) / next).abs();
        lambda = next;
        if drift < DRIFT_TOL {
            break;
        }
    }
    // sign and L¹ normalization
    let mass: f64 = weights.iter().zip(&x).map(|(w, v)| w * v).sum();
    for v in x.iter_mut() {
        *v /= mass;
    }
    for v in x[stored..].iter_mut() {
        *v = 0.0;
    }
    let phi = Field::new(*grid, x)?;
    let lambda = rayleigh_quotient(&phi);
    Ok((lambda, phi.into_values(), iterations, drift < DRIFT_TOL))
}

fn coarsened(grid: &Grid) -> Option<Grid> {
    match grid {
        Grid::Radial(g) if g.n() % 2 == 0 => {
            RadialGrid::new(g.radius(), g.n() / 2).ok().map(Grid::from)
        }
        Grid::Planar(g) if g.nx() % 2 == 1 && g.ny() % 2 == 1 => {
            PlanarGrid::new(g.domain(), (g.nx() - 1) / 2, (g.ny() - 1) / 2)
                .ok()
                .map(Grid::from)
        }
        _ => None,
    }
}

fn refined(grid: &Grid) -> Result<Grid> {
    Ok(match grid {
        Grid::Radial(g) => RadialGrid::new(g.radius(), 2 * g.n())?.into(),
        Grid::Planar(g) => PlanarGrid::new(g.domain(), 2 * g.nx() + 1, 2 * g.ny() + 1)?.into(),
    })
}

/// First Dirichlet eigenpair on `grid`. `φ` is positive inside with unit
/// discrete L¹ norm; `lambda` is a two-grid Richardson estimate using the grid
/// with half the spacing count when it exists, otherwise twice.
pub fn first_dirichlet_eigenpair(domain: DomainSpec, grid: &Grid) -> Result<Eigenpair> {
    if grid.domain() != domain {
        return Err(Error::InvalidGrid(format!(
            "grid covers {}, expected {domain}",
            grid.domain()
        )));
    }
    let resolution = match grid {
        Grid::Radial(g) => g.n(),
        Grid::Planar(g) => g.nx().min(g.ny()),
    };
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidGrid(format!(
            "eigenpair needs resolution >= {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let (grid_lambda, phi, iterations, converged) = grid_eigenpair(grid)?;
    let lambda = match coarsened(grid) {
        Some(coarse) => {
            let (lc, ..) = grid_eigenpair(&coarse)?;
            (4.0 * grid_lambda - lc) / 3.0
        }
        None => {
            let (lf, ..) = grid_eigenpair(&refined(grid)?)?;
            (4.0 * lf - grid_lambda) / 3.0
        }
    };
    Ok(Eigenpair {
        lambda,
        grid_lambda,
        phi: Field::new(*grid, phi)?,
        iterations,
        converged,
    })
}
