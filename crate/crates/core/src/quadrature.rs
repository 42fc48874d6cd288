//! Grid quadrature, discrete gradients and outward normal derivatives.
//!
//! Radial grids use the trapezoid rule in `r` with weight `2π r`; planar grids
//! use `hx·hy` at interior nodes (boundary values vanish). Gradient products
//! also pick up boundary contributions, where the one-sided normal derivative
//! is the only nonzero component.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, PlanarGrid, RadialGrid};
use crate::solution::Field;

/// Quadrature weight for each stored node.
pub fn node_weights(grid: &Grid) -> Vec<f64> {
    match grid {
        Grid::Radial(g) => radial_weights(g),
        Grid::Planar(g) => vec![g.hx() * g.hy(); g.len()],
    }
}

fn radial_weights(g: &RadialGrid) -> Vec<f64> {
    let h = g.h();
    let n = g.n();
    let mut w: Vec<f64> = (0..=n).map(|i| 2.0 * PI * g.node(i) * h).collect();
    w[n] *= 0.5;
    w
}

/// `∫ f dx`.
pub fn integrate(f: &Field) -> f64 {
    integrate_map(f, |x| x)
}

/// `∫ g(f) dx`.
pub fn integrate_map(f: &Field, g: impl Fn(f64) -> f64) -> f64 {
    node_weights(f.grid())
        .iter()
        .zip(f.values())
        .map(|(w, &x)| w * g(x))
        .sum()
}

/// `∫ g(f1, f2) dx` for two fields on one grid.
pub fn integrate_pair(a: &Field, b: &Field, g: impl Fn(f64, f64) -> f64) -> Result<f64> {
    a.same_grid(b)?;
    Ok(node_weights(a.grid())
        .iter()
        .zip(a.values().iter().zip(b.values()))
        .map(|(w, (&x, &y))| w * g(x, y))
        .sum())
}

/// Nodal radial derivative: centered inside, zero at the center, one-sided
/// second order at `r = R`.
pub fn radial_derivative(g: &RadialGrid, values: &[f64]) -> Vec<f64> {
    let n = g.n();
    let h = g.h();
    let mut d = vec![0.0; n + 1];
    for i in 1..n {
        d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    d[n] = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * h);
    d
}

/// `∫ ∇a·∇b dx`.
pub fn gradient_dot(a: &Field, b: &Field) -> Result<f64> {
    a.same_grid(b)?;
    match a.grid() {
        Grid::Radial(g) => {
            let da = radial_derivative(g, a.values());
            let db = radial_derivative(g, b.values());
            Ok(radial_weights(g)
                .iter()
                .zip(da.iter().zip(&db))
                .map(|(w, (x, y))| w * x * y)
                .sum())
        }
        Grid::Planar(g) => Ok(planar_gradient_dot(g, a.values(), b.values())),
    }
}

fn planar_gradient_dot(g: &PlanarGrid, a: &[f64], b: &[f64]) -> f64 {
    let (nx, ny, hx, hy) = (g.nx(), g.ny(), g.hx(), g.hy());
    let at = |f: &[f64], i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= nx as isize || j >= ny as isize {
            0.0
        } else {
            f[j as usize * nx + i as usize]
        }
    };
    let mut interior = 0.0;
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            let ax = (at(a, i + 1, j) - at(a, i - 1, j)) / (2.0 * hx);
            let ay = (at(a, i, j + 1) - at(a, i, j - 1)) / (2.0 * hy);
            let bx = (at(b, i + 1, j) - at(b, i - 1, j)) / (2.0 * hx);
            let by = (at(b, i, j + 1) - at(b, i, j - 1)) / (2.0 * hy);
            interior += ax * bx + ay * by;
        }
    }
    // edge nodes carry half a cell; corners have zero gradient
    let ta = planar_trace(g, a);
    let tb = planar_trace(g, b);
    let mut edge = 0.0;
    for (sa, sb) in ta.iter().zip(&tb) {
        if !sa.corner {
            let h_normal = if sa.vertical { hx } else { hy };
            edge += 0.5 * h_normal * sa.weight * sa.value * sb.value;
        }
    }
    interior * hx * hy + edge
}

/// One boundary quadrature sample of an outward normal derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub value: f64,
    /// Arc-length weight `ds`.
    pub weight: f64,
    /// `x·ν` at the sample, exact for both shapes.
    pub x_dot_nu: f64,
    pub corner: bool,
    /// Sample lies on a side `x = ±a/2`.
    #[serde(skip)]
    vertical: bool,
}

/// Outward normal derivative sampled along the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub samples: Vec<BoundarySample>,
}

impl BoundaryTrace {
    /// `∮ f_ν ds`.
    pub fn integral(&self) -> f64 {
        self.samples.iter().map(|s| s.weight * s.value).sum()
    }

    /// `∮ (x·ν) f_ν g_ν ds`.
    pub fn weighted_product(&self, other: &BoundaryTrace) -> Result<f64> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.weight * a.x_dot_nu * a.value * b.value)
            .sum())
    }

    /// Largest value over non-corner samples (closest to zero for `f_ν ≤ 0`).
    pub fn max_value(&self) -> f64 {
        self.samples
            .iter()
            .filter(|s| !s.corner)
            .map(|s| s.value)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Outward normal derivative of a field vanishing on the boundary, by the
/// one-sided second-order difference `(−4 f₋₁ + f₋₂) / (2h)`.
pub fn normal_derivative(f: &Field) -> Result<BoundaryTrace> {
    match f.grid() {
        Grid::Radial(g) => {
            if g.n() < 2 {
                return Err(Error::InvalidGrid("need two inward samples".into()));
            }
            let v = f.values();
            let n = g.n();
            let r = g.radius();
            let value = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * g.h());
            Ok(BoundaryTrace {
                samples: vec![BoundarySample {
                    value,
                    weight: 2.0 * PI * r,
                    x_dot_nu: r,
                    corner: false,
                    vertical: false,
                }],
            })
        }
        Grid::Planar(g) => {
            if g.nx() < 2 || g.ny() < 2 {
                return Err(Error::InvalidGrid("need two inward samples".into()));
            }
            Ok(BoundaryTrace {
                samples: planar_trace(g, f.values()),
            })
        }
    }
}

/// Samples side by side: x = −a/2, x = +a/2, y = −b/2, y = +b/2, each with
/// both corners; trapezoid weights along the side.
fn planar_trace(g: &PlanarGrid, f: &[f64]) -> Vec<BoundarySample> {
    let (nx, ny, hx, hy) = (g.nx(), g.ny(), g.hx(), g.hy());
    let (a, b) = g.sides();
    let mut out = Vec::with_capacity(2 * (nx + ny + 4));
    let one_sided = |f1: f64, f2: f64, h: f64| (-4.0 * f1 + f2) / (2.0 * h);
    let mut side =
        |count: usize, h_along: f64, x_dot_nu: f64, vertical: bool, val: &dyn Fn(usize) -> f64| {
            for k in 0..count + 2 {
                let corner = k == 0 || k == count + 1;
                out.push(BoundarySample {
                    // both one-sided traces vanish at a corner, so their average does too
                    value: if corner { 0.0 } else { val(k - 1) },
                    weight: if corner { 0.5 * h_along } else { h_along },
                    x_dot_nu,
                    corner,
                    vertical,
                });
            }
        };
    side(ny, hy, a / 2.0, true, &|j| {
        one_sided(f[j * nx], f[j * nx + 1], hx)
    });
    side(ny, hy, a / 2.0, true, &|j| {
        one_sided(f[j * nx + nx - 1], f[j * nx + nx - 2], hx)
    });
    side(nx, hx, b / 2.0, false, &|i| one_sided(f[i], f[nx + i], hy));
    side(nx, hx, b / 2.0, false, &|i| {
        one_sided(f[(ny - 1) * nx + i], f[(ny - 2) * nx + i], hy)
    });
    out
}
