//! Shooting oracle for the radial system.
//!
//! The IVP for `y = [u, u', v, v']` starts at a radius `10⁻⁶` times the core
//! length (or `R` if smaller) from the Taylor expansion about the center. The nonlinearity uses positive parts, so
//! trajectories can be continued past a zero.
//!
//! A first guess comes from the scaling symmetry: with `u(0) = 1, v(0) = s`,
//! bisect on `ln s` until both components vanish at the same radius `r*`, then
//! dilate by `r*/R`. A 2D Newton iteration on `(ln M, ln N)` polishes the guess
//! against the boundary conditions at `R`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::grid::{Grid, RadialGrid};
use crate::ode::{Dopri5, OdeError, Outcome};
use crate::power::pow_value;
use crate::solution::{Field, SolutionPair};

/// Start radius as a fraction of the natural length scale.
pub const START_FRACTION: f64 = 1e-6;
/// Nodes of the grid used by [`solve_shooting`].
pub const DEFAULT_NODES: usize = 1024;
const MAX_NEWTON: usize = 40;

type State = [f64; 4];

fn rhs(e: &ExponentPair) -> impl Fn(f64, &State) -> State + '_ {
    move |r, y| {
        [
            y[1],
            -y[1] / r - pow_value(y[2], e.p()),
            y[3],
            -y[3] / r - pow_value(y[0], e.q()),
        ]
    }
}

fn taylor(e: &ExponentPair, m: f64, n: f64, r: f64) -> State {
    let np = pow_value(n, e.p());
    let mq = pow_value(m, e.q());
    [
        m - np * r * r / 4.0,
        -np * r / 2.0,
        n - mq * r * r / 4.0,
        -mq * r / 2.0,
    ]
}

/// IVP start radius for center values `(m, n)`: a fixed fraction of the
/// smaller of `radius` and the core length `max(N^p, M^q)^{-1/2}`.
fn start_radius(e: &ExponentPair, radius: f64, m: f64, n: f64) -> f64 {
    let core = pow_value(n, e.p()).max(pow_value(m, e.q())).sqrt().recip();
    START_FRACTION * radius.min(core)
}

fn divergence(err: OdeError) -> Error {
    Error::ShootingDivergence(err.to_string())
}

fn integrator(tol: f64) -> Dopri5 {
    Dopri5::new(tol / 10.0, tol * 1e-3)
}

/// Radius where component `c` (0 for `u`, 2 for `v`) vanishes inside the step
/// `[before, after]`, refined by Newton on re-integrated states. Returns the
/// radius and the state there.
fn locate_zero(
    e: &ExponentPair,
    tol: f64,
    before: (f64, State),
    after: (f64, State),
    c: usize,
) -> Result<(f64, State)> {
    let (t0, y0) = before;
    let (t1, y1) = after;
    let mut r = t0 + (t1 - t0) * y0[c] / (y0[c] - y1[c]);
    let mut y = y1;
    for _ in 0..8 {
        let mut ode = integrator(tol);
        y = match ode
            .integrate(rhs(e), t0, y0, r, |_, _| false)
            .map_err(divergence)?
        {
            Outcome::Reached(y) => y,
            Outcome::Stopped { after, .. } => after.1,
        };
        let dr = -y[c] / y[c + 1];
        r += dr;
        if dr.abs() <= 1e-15 * r {
            break;
        }
    }
    Ok((r, y))
}

/// Zero of a harmonic continuation `w(r) = w₁ + r₁ w₁' ln(r/r₁)`.
fn harmonic_zero(r1: f64, w: f64, dw: f64) -> f64 {
    r1 * (-w / (r1 * dw)).exp()
}

/// `ln r_u − ln r_v` for the profile with `u(0) = 1, v(0) = s`, and the
/// radius where the first component vanished.
fn zero_gap(e: &ExponentPair, s: f64, tol: f64) -> Result<(f64, f64)> {
    let length = (2.0 * pow_value(s, e.p()).max(1.0).sqrt().recip()).min(2.0);
    let r0 = START_FRACTION * length;
    let mut ode = integrator(tol);
    let out = ode
        .integrate(rhs(e), r0, taylor(e, 1.0, s, r0), 1e200 * length, |_, y| {
            y[0] < 0.0 || y[2] < 0.0
        })
        .map_err(divergence)?;
    let Outcome::Stopped { before, after } = out else {
        return Err(Error::ShootingDivergence(format!(
            "no zero found for center ratio {s}"
        )));
    };
    if after.1[0] < 0.0 {
        let (ru, y) = locate_zero(e, tol, before, after, 0)?;
        Ok((ru.ln() - harmonic_zero(ru, y[2], y[3]).ln(), ru))
    } else {
        let (rv, y) = locate_zero(e, tol, before, after, 2)?;
        Ok((harmonic_zero(rv, y[0], y[1]).ln() - rv.ln(), rv))
    }
}

/// First guess for `(M, N)` from the scale-invariant profile.
fn scaling_guess(e: &ExponentPair, radius: f64, tol: f64) -> Result<(f64, f64)> {
    let mut lo = 0.0f64;
    let (mut g_lo, _) = zero_gap(e, lo.exp(), tol)?;
    // g decreases in ln s: a larger v(0) drives u to zero first
    let mut step = if g_lo > 0.0 { 1.0 } else { -1.0 };
    let mut hi = lo + step;
    let (mut g_hi, _) = zero_gap(e, hi.exp(), tol)?;
    let mut tries = 0;
    if g_lo == 0.0 {
        hi = lo;
    }
    while g_lo != 0.0 && g_lo.signum() == g_hi.signum() {
        tries += 1;
        if tries > 60 {
            return Err(Error::ShootingDivergence(
                "could not bracket the center ratio".into(),
            ));
        }
        lo = hi;
        g_lo = g_hi;
        step *= 2.0;
        hi = lo + step;
        g_hi = zero_gap(e, hi.exp(), tol)?.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lo == hi {
            break;
        }
        if (hi - lo).abs() <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        let (g_mid, _) = zero_gap(e, mid.exp(), tol)?;
        if g_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    let ln_s = 0.5 * (lo + hi);
    let s = ln_s.exp();
    let (_, r_star) = zero_gap(e, s, tol)?;
    let k = e.margin();
    let lambda = r_star / radius;
    let m = lambda.powf(2.0 * (e.p() + 1.0) / k);
    let n = lambda.powf(2.0 * (e.q() + 1.0) / k) * s;
    Ok((m, n))
}

/// `(u(R), v(R)) / max(M, N)` for center values `(M, N)`.
fn boundary_map(e: &ExponentPair, radius: f64, m: f64, n: f64, tol: f64) -> Result<[f64; 2]> {
    let r0 = start_radius(e, radius, m, n);
    let mut ode = integrator(tol);
    let Outcome::Reached(y) = ode
        .integrate(rhs(e), r0, taylor(e, m, n, r0), radius, |_, _| false)
        .map_err(divergence)?
    else {
        unreachable!("no stop predicate")
    };
    let scale = m.max(n);
    Ok([y[0] / scale, y[2] / scale])
}

/// Newton on `(ln M, ln N)` with a forward-difference Jacobian of the
/// boundary map. Returns `(M, N, mismatch, iterations)`.
fn polish(
    e: &ExponentPair,
    radius: f64,
    m0: f64,
    n0: f64,
    tol: f64,
) -> Result<(f64, f64, f64, usize)> {
    let (mut lm, mut ln) = (m0.ln(), n0.ln());
    let mut f = boundary_map(e, radius, lm.exp(), ln.exp(), tol)?;
    let mut iterations = 0;
    let fd = 1e-7;
    while f[0].abs().max(f[1].abs()) > tol {
        if iterations >= MAX_NEWTON {
            return Err(Error::ShootingDivergence(format!(
                "boundary mismatch {:.3e} after {iterations} Newton steps",
                f[0].abs().max(f[1].abs())
            )));
        }
        iterations += 1;
        let fm = boundary_map(e, radius, (lm + fd).exp(), ln.exp(), tol)?;
        let fn_ = boundary_map(e, radius, lm.exp(), (ln + fd).exp(), tol)?;
        let j = [
            [(fm[0] - f[0]) / fd, (fn_[0] - f[0]) / fd],
            [(fm[1] - f[1]) / fd, (fn_[1] - f[1]) / fd],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::ShootingDivergence(
                "singular shooting Jacobian".into(),
            ));
        }
        let dm = -(j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let dn = -(-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        // halve until the mismatch shrinks
        let mut t = 1.0;
        let norm0 = f[0].abs().max(f[1].abs());
        loop {
            let trial = boundary_map(e, radius, (lm + t * dm).exp(), (ln + t * dn).exp(), tol)?;
            if trial[0].abs().max(trial[1].abs()) < norm0 || t < 1e-3 {
                lm += t * dm;
                ln += t * dn;
                f = trial;
                break;
            }
            t *= 0.5;
        }
    }
    Ok((lm.exp(), ln.exp(), f[0].abs().max(f[1].abs()), iterations))
}

/// Shooting solution sampled on a grid of [`DEFAULT_NODES`] intervals.
pub fn solve_shooting(e: ExponentPair, radius: f64, tol: f64) -> Result<SolutionPair> {
    solve_shooting_on(e, RadialGrid::new(radius, DEFAULT_NODES)?, tol)
}

/// Shooting solution sampled on `grid`. `tol` bounds `|u(R)|, |v(R)|`
/// relative to `max(M, N)`.
pub fn solve_shooting_on(e: ExponentPair, grid: RadialGrid, tol: f64) -> Result<SolutionPair> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidConfig(format!(
            "shooting tolerance must lie in (0, 1e-6], got {tol}"
        )));
    }
    let radius = grid.radius();
    let (m0, n0) = scaling_guess(&e, radius, tol)?;
    let (m, n, mismatch, iterations) = polish(&e, radius, m0, n0, tol)?;
    let (u, v) = sample(&e, &grid, m, n, tol)?;
    Ok(SolutionPair {
        exponents: e,
        u: Field::new(Grid::Radial(grid), u)?,
        v: Field::new(Grid::Radial(grid), v)?,
        residual_norm: mismatch,
        tolerance: tol,
        newton_iterations: iterations,
        converged: true,
    })
}

fn sample(
    e: &ExponentPair,
    grid: &RadialGrid,
    m: f64,
    n: f64,
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let nodes = grid.n();
    let mut u = vec![0.0; nodes + 1];
    let mut v = vec![0.0; nodes + 1];
    u[0] = m;
    v[0] = n;
    let mut r = start_radius(e, grid.radius(), m, n);
    let mut y = taylor(e, m, n, r);
    let mut ode = integrator(tol);
    for i in 1..nodes {
        let target = grid.node(i);
        let Outcome::Reached(next) = ode
            .integrate(rhs(e), r, y, target, |_, _| false)
            .map_err(divergence)?
        else {
            unreachable!("no stop predicate")
        };
        y = next;
        r = target;
        u[i] = y[0].max(0.0);
        v[i] = y[2].max(0.0);
    }
    Ok((u, v))
}

/// Integrals of the radial profile with center values `(M, N)`, accumulated
/// along the trajectory instead of on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileIntegrals {
    pub l1_u: f64,
    pub l1_v: f64,
    pub l1_uq: f64,
    pub l1_vp: f64,
    pub l1_uq1: f64,
    pub l1_vp1: f64,
    /// `∫∇u·∇v`.
    pub energy: f64,
    /// `u'(R)`, `v'(R)`.
    pub boundary_slopes: (f64, f64),
}

impl ProfileIntegrals {
    /// `(|E − ∫v^{p+1}|/E, |E − ∫u^{q+1}|/E)`.
    pub fn energy_identity(&self) -> (f64, f64) {
        let e = self.energy;
        (((e - self.l1_vp1) / e).abs(), ((e - self.l1_uq1) / e).abs())
    }

    /// Pohozaev residual on the disk of radius `radius`.
    pub fn pohozaev_residual(&self, e: &ExponentPair, radius: f64) -> f64 {
        let lhs = 2.0 / (e.p() + 1.0) * self.l1_vp1 + 2.0 / (e.q() + 1.0) * self.l1_uq1;
        let (du, dv) = self.boundary_slopes;
        let rhs = 2.0 * std::f64::consts::PI * radius * radius * du * dv;
        ((lhs - rhs) / lhs).abs()
    }
}

/// Integrates the profile from the center to `radius` together with its
/// moments. Resolves cores far below any practical grid spacing.
pub fn profile_integrals(
    e: ExponentPair,
    radius: f64,
    m: f64,
    n: f64,
    tol: f64,
) -> Result<ProfileIntegrals> {
    let f = rhs(&e);
    let (p, q) = (e.p(), e.q());
    let ext = move |r: f64, y: &[f64; 11]| {
        let d = f(r, &[y[0], y[1], y[2], y[3]]);
        let (u, v) = (y[0].max(0.0), y[2].max(0.0));
        let w = 2.0 * std::f64::consts::PI * r;
        let (uq, vp) = (pow_value(u, q), pow_value(v, p));
        [
            d[0],
            d[1],
            d[2],
            d[3],
            w * u,
            w * v,
            w * uq,
            w * vp,
            w * uq * u,
            w * vp * v,
            w * y[1] * y[3],
        ]
    };
    let r0 = start_radius(&e, radius, m, n);
    let t = taylor(&e, m, n, r0);
    // the disk of radius r0 is treated as constant
    let a = std::f64::consts::PI * r0 * r0;
    let (mq, np) = (pow_value(m, q), pow_value(n, p));
    let y0 = [
        t[0],
        t[1],
        t[2],
        t[3],
        a * m,
        a * n,
        a * mq,
        a * np,
        a * mq * m,
        a * np * n,
        0.0,
    ];
    let mut ode = Dopri5::new(tol / 10.0, tol * 1e-3);
    let Outcome::Reached(y) = ode
        .integrate(ext, r0, y0, radius, |_, _| false)
        .map_err(divergence)?
    else {
        unreachable!("no stop predicate")
    };
    Ok(ProfileIntegrals {
        l1_u: y[4],
        l1_v: y[5],
        l1_uq: y[6],
        l1_vp: y[7],
        l1_uq1: y[8],
        l1_vp1: y[9],
        energy: y[10],
        boundary_slopes: (y[1], y[3]),
    })
}

/// `∫ g(u, v) dx` over the disk for the profile with center values `(M, N)`.
pub fn profile_moment(
    e: ExponentPair,
    radius: f64,
    m: f64,
    n: f64,
    tol: f64,
    g: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    let f = rhs(&e);
    let ext = |r: f64, y: &[f64; 5]| {
        let d = f(r, &[y[0], y[1], y[2], y[3]]);
        let w = 2.0 * std::f64::consts::PI * r;
        [d[0], d[1], d[2], d[3], w * g(y[0].max(0.0), y[2].max(0.0))]
    };
    let r0 = start_radius(&e, radius, m, n);
    let t = taylor(&e, m, n, r0);
    let y0 = [
        t[0],
        t[1],
        t[2],
        t[3],
        std::f64::consts::PI * r0 * r0 * g(m, n),
    ];
    let mut ode = Dopri5::new(tol / 10.0, tol * 1e-3);
    let Outcome::Reached(y) = ode
        .integrate(ext, r0, y0, radius, |_, _| false)
        .map_err(divergence)?
    else {
        unreachable!("no stop predicate")
    };
    Ok(y[4])
}
