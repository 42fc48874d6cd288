//! Exact integral identities of positive solutions, evaluated discretely.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, RadialGrid};
use crate::power::pow_value;
use crate::quadrature::{gradient_dot, integrate_map, integrate_pair, normal_derivative};
use crate::solution::{Eigenpair, SolutionPair};

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a / b).abs()
    }
}

fn radial_grid(s: &SolutionPair) -> Result<RadialGrid> {
    match s.grid() {
        Grid::Radial(g) => Ok(*g),
        Grid::Planar(_) => Err(Error::InvalidInput("check needs a radial solution".into())),
    }
}

/// `(|E − ∫v^{p+1}|/E, |E − ∫u^{q+1}|/E)` with `E = ∫∇u·∇v`.
pub fn energy_identity(s: &SolutionPair) -> Result<(f64, f64)> {
    let (p, q) = (s.exponents.p(), s.exponents.q());
    let e = gradient_dot(&s.u, &s.v)?;
    let vp1 = integrate_map(&s.v, |x| pow_value(x, p + 1.0));
    let uq1 = integrate_map(&s.u, |x| pow_value(x, q + 1.0));
    Ok((rel(e - vp1, e), rel(e - uq1, e)))
}

/// Relative residual of
/// `(2/(p+1))∫v^{p+1} + (2/(q+1))∫u^{q+1} = ∮ (x·ν) u_ν v_ν ds`,
/// normalized by the left side.
pub fn pohozaev_residual(s: &SolutionPair) -> Result<f64> {
    let (p, q) = (s.exponents.p(), s.exponents.q());
    let lhs = 2.0 / (p + 1.0) * integrate_map(&s.v, |x| pow_value(x, p + 1.0))
        + 2.0 / (q + 1.0) * integrate_map(&s.u, |x| pow_value(x, q + 1.0));
    let rhs = normal_derivative(&s.u)?.weighted_product(&normal_derivative(&s.v)?)?;
    Ok(rel(lhs - rhs, lhs))
}

/// `(|∮(−v_ν) − ∫u^q| / ∫u^q, |∮(−u_ν) − ∫v^p| / ∫v^p)`.
pub fn flux_identity(s: &SolutionPair) -> Result<(f64, f64)> {
    let (p, q) = (s.exponents.p(), s.exponents.q());
    let uq = integrate_map(&s.u, |x| pow_value(x, q));
    let vp = integrate_map(&s.v, |x| pow_value(x, p));
    let flux_v = -normal_derivative(&s.v)?.integral();
    let flux_u = -normal_derivative(&s.u)?.integral();
    Ok((rel(flux_v - uq, uq), rel(flux_u - vp, vp)))
}

/// Moment identities against the first eigenfunction, with Jensen gaps and
/// the a priori bound on `∫uφ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenMoments {
    /// `(|λ∫uφ − ∫v^pφ|, |λ∫vφ − ∫u^qφ|)`, each relative to its second term.
    pub residuals: (f64, f64),
    /// `(∫v^pφ − (∫vφ)^p, ∫u^qφ − (∫uφ)^q)`.
    pub jensen_gaps: (f64, f64),
    /// `∫uφ`.
    pub u_phi: f64,
    /// `max(1, λ^{2/κ̄})`, `κ̄ = κ/(κ+1)`, `κ = pq − 1`.
    pub u_phi_bound: f64,
}

/// Discrete eigenfunction moments. The identities use the grid eigenvalue,
/// for which they hold up to quadrature error; the bound uses the
/// extrapolated eigenvalue.
pub fn eigen_moments(s: &SolutionPair, ep: &Eigenpair) -> Result<EigenMoments> {
    s.u.same_grid(&ep.phi)?;
    let (p, q) = (s.exponents.p(), s.exponents.q());
    let lambda = ep.grid_lambda;
    let u_phi = integrate_pair(&s.u, &ep.phi, |a, b| a * b)?;
    let v_phi = integrate_pair(&s.v, &ep.phi, |a, b| a * b)?;
    let vp_phi = integrate_pair(&s.v, &ep.phi, |a, b| pow_value(a, p) * b)?;
    let uq_phi = integrate_pair(&s.u, &ep.phi, |a, b| pow_value(a, q) * b)?;
    let kappa = s.exponents.margin();
    let kbar = kappa / (kappa + 1.0);
    Ok(EigenMoments {
        residuals: (
            rel(lambda * u_phi - vp_phi, vp_phi),
            rel(lambda * v_phi - uq_phi, uq_phi),
        ),
        jensen_gaps: (vp_phi - pow_value(v_phi, p), uq_phi - pow_value(u_phi, q)),
        u_phi,
        u_phi_bound: ep.lambda.powf(2.0 / kbar).max(1.0),
    })
}

/// `∫_0^R log(R/r) f(r) r dr` with `f` frozen at the center over the first
/// cell, where the log weight is integrated exactly.
pub(crate) fn log_kernel_integral(g: &RadialGrid, f: &[f64]) -> f64 {
    let (h, r_max, n) = (g.h(), g.radius(), g.n());
    let first = f[0] * 0.5 * h * h * ((r_max / h).ln() + 0.5);
    let term = |i: usize| {
        let r = g.node(i);
        (r_max / r).ln() * f[i] * r
    };
    let mut rest = 0.5 * (term(1) + term(n));
    for i in 2..n {
        rest += term(i);
    }
    first + rest * h
}

/// `(|u(0) − ∫log(R/r) v^p r dr| / u(0), |v(0) − ∫log(R/r) u^q r dr| / v(0))`.
pub fn green_center_check(s: &SolutionPair) -> Result<(f64, f64)> {
    let g = radial_grid(s)?;
    let (p, q) = (s.exponents.p(), s.exponents.q());
    let vp: Vec<f64> = s.v.values().iter().map(|&x| pow_value(x, p)).collect();
    let uq: Vec<f64> = s.u.values().iter().map(|&x| pow_value(x, q)).collect();
    let (u0, v0) = (s.u.values()[0], s.v.values()[0]);
    Ok((
        rel(u0 - log_kernel_integral(&g, &vp), u0),
        rel(v0 - log_kernel_integral(&g, &uq), v0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::ExponentPair;
    use crate::solution::Field;

    fn paraboloid(n: usize) -> SolutionPair {
        let g: Grid = RadialGrid::new(1.0, n).unwrap().into();
        SolutionPair {
            exponents: ExponentPair::new(1.0, 2.0).unwrap(),
            u: Field::from_fn(g, |r, _| 1.0 - r * r).unwrap(),
            v: Field::from_fn(g, |_, _| 4.0).unwrap(),
            residual_norm: 0.0,
            tolerance: 1e-10,
            newton_iterations: 0,
            converged: true,
        }
    }

    #[test]
    fn flux_of_manufactured_pair_is_exact() {
        let (_, flux_u) = flux_identity(&paraboloid(64)).unwrap();
        assert!(flux_u < 1e-13, "{flux_u}");
    }

    #[test]
    fn green_center_of_manufactured_pair() {
        // ∫₀¹ log(1/r)·4·r dr = 1 = u(0); only the first-cell freezing and the
        // trapezoid rule contribute error
        let coarse = green_center_check(&paraboloid(256)).unwrap().0;
        let fine = green_center_check(&paraboloid(512)).unwrap().0;
        assert!(fine < 1e-4);
        assert!(coarse / fine > 2.0);
    }

    #[test]
    fn log_kernel_of_constant_is_quarter() {
        let g = RadialGrid::new(1.0, 2048).unwrap();
        let ones = vec![1.0; 2049];
        assert!((log_kernel_integral(&g, &ones) - 0.25).abs() < 1e-6);
    }
}
