//! Inequalities and measured ratios.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::grid::{Grid, RadialGrid};
use crate::linalg::{linear_fit, LinearFit};
use crate::power::pow_value;
use crate::quadrature::{integrate_map, node_weights};
use crate::radial::profile_moment;
use crate::solution::{Eigenpair, SolutionPair};

/// Tolerance on comparison margins.
pub const MARGIN_TOL: f64 = 1e-8;

fn radial(s: &SolutionPair) -> Result<RadialGrid> {
    match s.grid() {
        Grid::Radial(g) => Ok(*g),
        Grid::Planar(_) => Err(Error::InvalidInput("check needs a radial solution".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMargins {
    /// `(c₀ − M/N^p, c₀ − N/M^q)` with `c₀ = diam²/4`.
    pub margins: (f64, f64),
    pub c0: f64,
    pub pass: bool,
}

pub fn comparison_bounds(s: &SolutionPair) -> ComparisonMargins {
    let (p, q) = (s.exponents.p(), s.exponents.q());
    let (m, n) = (s.max_u(), s.max_v());
    let c0 = s.grid().domain().comparison_constant();
    let margins = (c0 - m / pow_value(n, p), c0 - n / pow_value(m, q));
    ComparisonMargins {
        margins,
        c0,
        pass: margins.0 >= -MARGIN_TOL && margins.1 >= -MARGIN_TOL,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnackProfile {
    pub r: Vec<f64>,
    /// `(M − u(r)) / (N^p r²)`.
    pub u_profile: Vec<f64>,
    /// `(N − v(r)) / (M^q r²)`.
    pub v_profile: Vec<f64>,
    /// `r → 0` limits by a quadratic fit over the first eight nodes.
    pub u_limit: f64,
    pub v_limit: f64,
    pub u_max: f64,
    pub v_max: f64,
}

#[allow(clippy::needless_range_loop)]
fn quadratic_intercept(x: &[f64], y: &[f64]) -> f64 {
    // normal equations for y ≈ c0 + c1 x + c2 x²
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let pw = [1.0, xi, xi * xi];
        for r in 0..3 {
            b[r] += pw[r] * yi;
            for c in 0..3 {
                a[r][c] += pw[r] * pw[c];
            }
        }
    }
    for k in 0..3 {
        for r in k + 1..3 {
            let m = a[r][k] / a[k][k];
            for c in k..3 {
                a[r][c] -= m * a[k][c];
            }
            b[r] -= m * b[k];
        }
    }
    let mut c = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|j| a[r][j] * c[j]).sum();
        c[r] = (b[r] - s) / a[r][r];
    }
    c[0]
}

/// Normalized distance from the maximum, sampled on `(0, r_max]`.
pub fn harnack_decay(s: &SolutionPair, r_max: f64) -> Result<HarnackProfile> {
    let g = radial(s)?;
    let (p, q) = (s.exponents.p(), s.exponents.q());
    let (m, n) = (s.max_u(), s.max_v());
    let (np, mq) = (pow_value(n, p), pow_value(m, q));
    let last = ((r_max / g.h()).floor() as usize).clamp(8, g.n());
    let r: Vec<f64> = (1..=last).map(|i| g.node(i)).collect();
    let u = s.u.values();
    let v = s.v.values();
    let u_profile: Vec<f64> = (1..=last)
        .map(|i| (m - u[i]) / (np * g.node(i).powi(2)))
        .collect();
    let v_profile: Vec<f64> = (1..=last)
        .map(|i| (n - v[i]) / (mq * g.node(i).powi(2)))
        .collect();
    let fold = |xs: &[f64]| xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(HarnackProfile {
        u_limit: quadratic_intercept(&r[..8], &u_profile[..8]),
        v_limit: quadratic_intercept(&r[..8], &v_profile[..8]),
        u_max: fold(&u_profile),
        v_max: fold(&v_profile),
        r,
        u_profile,
        v_profile,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseFloor {
    /// Largest radius with `u^q ≥ e^{−1/3} M^q` on the ball about the maximum.
    pub rho_star: f64,
    /// `R₁ = (M / (q N^p))^{1/2}`, clipped to half the distance to the boundary.
    pub r1: f64,
    pub ratio: f64,
    pub clipped: bool,
}

pub fn pointwise_floor(s: &SolutionPair) -> Result<PointwiseFloor> {
    let g = radial(s)?;
    let (p, q) = (s.exponents.p(), s.exponents.q());
    let (m, n) = (s.max_u(), s.max_v());
    let level = m * (-1.0 / (3.0 * q)).exp();
    let u = s.u.values();
    let mut rho_star = g.radius();
    for i in 1..=g.n() {
        if u[i] < level {
            let t = (u[i - 1] - level) / (u[i - 1] - u[i]);
            rho_star = g.node(i - 1) + t * g.h();
            break;
        }
    }
    let mut r1 = (m / (q * pow_value(n, p))).sqrt();
    let half = 0.5 * g.radius();
    let clipped = r1 >= half;
    if clipped {
        r1 = half;
    }
    Ok(PointwiseFloor {
        rho_star,
        r1,
        ratio: rho_star / r1,
        clipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassConcentration {
    /// `∫_{u ≥ 1 − L/q} u^q`.
    pub value: f64,
    pub superlevel_area: f64,
    pub c_floor: f64,
    pub level_l: f64,
    /// `∫_{u < 1 − L/q} u^q`, bounded by `e^{−L}·area`.
    pub complement: f64,
    pub pass: bool,
}

pub fn mass_concentration(s: &SolutionPair, c_floor: f64) -> MassConcentration {
    let q = s.exponents.q();
    let area = s.grid().domain().area();
    let level_l = (2.0 * area / c_floor).ln().max(1.0);
    let threshold = 1.0 - level_l / q;
    let w = node_weights(s.grid());
    let (mut value, mut superlevel_area, mut complement) = (0.0, 0.0, 0.0);
    for (wi, &ui) in w.iter().zip(s.u.values()) {
        let uq = pow_value(ui, q);
        if ui >= threshold {
            value += wi * uq;
            superlevel_area += wi;
        } else {
            complement += wi * uq;
        }
    }
    MassConcentration {
        value,
        superlevel_area,
        c_floor,
        level_l,
        complement,
        pass: value >= 0.5 * c_floor,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrezisMerle {
    pub delta: f64,
    /// `∫ exp((4π − δ) v / ‖u^q‖_{L¹})`.
    pub value: f64,
    /// `(4π²/δ) diam²`.
    pub bound: f64,
    pub pass: bool,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 4.0 * PI) {
        return Err(Error::InvalidInput(format!(
            "delta must lie in (0, 4π), got {delta}"
        )));
    }
    Ok(())
}

fn brezis_merle(delta: f64, value: f64, diam: f64) -> BrezisMerle {
    let bound = 4.0 * PI * PI / delta * diam * diam;
    BrezisMerle {
        delta,
        value,
        bound,
        pass: value <= bound,
    }
}

pub fn brezis_merle_check(s: &SolutionPair, delta: f64) -> Result<BrezisMerle> {
    check_delta(delta)?;
    let q = s.exponents.q();
    let mass = integrate_map(&s.u, |x| pow_value(x, q));
    let k = (4.0 * PI - delta) / mass;
    let value = integrate_map(&s.v, |x| (k * x).exp());
    Ok(brezis_merle(delta, value, s.grid().domain().diameter()))
}

/// [`brezis_merle_check`] for the disk profile with center values `(M, N)`,
/// integrated along the trajectory; `mass` is `∫u^q`.
pub fn brezis_merle_profile(
    e: ExponentPair,
    radius: f64,
    (m, n): (f64, f64),
    mass: f64,
    delta: f64,
    tol: f64,
) -> Result<BrezisMerle> {
    check_delta(delta)?;
    let k = (4.0 * PI - delta) / mass;
    let value = profile_moment(e, radius, m, n, tol, |_, v| (k * v).exp())?;
    Ok(brezis_merle(delta, value, 2.0 * radius))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFlags {
    /// `M^{q−1} ≥ λ²`.
    pub lower_bound: bool,
    /// `M ≤ 1 + 4 log q / q`, meaningful for large `q`.
    pub upper_envelope: bool,
    /// `ln(M^q)`.
    pub log_m_q: f64,
    /// `ln(M^q / N²)`.
    pub log_m_q_over_n2: f64,
}

pub fn asymptotic_inequalities(s: &SolutionPair, ep: &Eigenpair) -> AsymptoticFlags {
    let q = s.exponents.q();
    let (m, n) = (s.max_u(), s.max_v());
    AsymptoticFlags {
        lower_bound: (q - 1.0) * m.ln() >= 2.0 * ep.lambda.ln(),
        upper_envelope: m <= 1.0 + 4.0 * q.ln() / q,
        log_m_q: q * m.ln(),
        log_m_q_over_n2: q * m.ln() - 2.0 * n.ln(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendSlopes {
    /// Fit of `ln(M^q)` on `ln q`.
    pub m_q: LinearFit,
    /// Fit of `ln(M^q/N²)` on `ln q`.
    pub m_q_over_n2: LinearFit,
}

/// Regression slopes over `(q, M, N)` rows; needs at least four rows.
pub fn trend_slopes(rows: &[(f64, f64, f64)]) -> Result<TrendSlopes> {
    if rows.len() < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            got: rows.len(),
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let a: Vec<f64> = rows.iter().map(|&(q, m, _)| q * m.ln()).collect();
    let b: Vec<f64> = rows
        .iter()
        .map(|&(q, m, n)| q * m.ln() - 2.0 * n.ln())
        .collect();
    Ok(TrendSlopes {
        m_q: linear_fit(&x, &a)?,
        m_q_over_n2: linear_fit(&x, &b)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_intercept_is_exact_on_quadratics() {
        let x: Vec<f64> = (1..=8).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| 0.25 - 2.0 * t + 3.0 * t * t).collect();
        assert!((quadratic_intercept(&x, &y) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn trend_needs_four_points() {
        let rows = [(8.0, 2.0, 15.0), (16.0, 1.5, 13.0), (32.0, 1.2, 12.6)];
        assert!(matches!(
            trend_slopes(&rows),
            Err(Error::InsufficientData { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn unit_disk_brezis_merle_bound_is_eight_pi() {
        use crate::exponents::ExponentPair;
        use crate::solution::Field;
        let g: Grid = RadialGrid::new(1.0, 64).unwrap().into();
        let s = SolutionPair {
            exponents: ExponentPair::new(1.0, 2.0).unwrap(),
            u: Field::from_fn(g, |r, _| 1.0 - r * r).unwrap(),
            v: Field::from_fn(g, |r, _| 1.0 - r * r).unwrap(),
            residual_norm: 0.0,
            tolerance: 1e-10,
            newton_iterations: 0,
            converged: true,
        };
        let bm = brezis_merle_check(&s, 2.0 * PI).unwrap();
        assert!((bm.bound - 8.0 * PI).abs() < 1e-12);
        let larger = brezis_merle_check(&s, 3.0 * PI).unwrap();
        assert!(larger.value < bm.value);
        assert!(brezis_merle_check(&s, 4.0 * PI).is_err());
    }
}
