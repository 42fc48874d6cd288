use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::grid::{Grid, RadialGrid};
use crate::power::pow_unchecked;
use crate::solution::Field;

/// Residual of the radial finite-difference system at `(u, v)`.
///
/// Interior rows use `Δw ≈ (w₊ − 2w + w₋)/h² + (w₊ − w₋)/(2 r h)`, the center row
/// `Δw(0) ≈ 4 (w₁ − w₀)/h²`. The boundary slot holds the boundary value itself.
pub fn radial_residual(u: &Field, v: &Field, e: &ExponentPair) -> Result<(Field, Field)> {
    u.same_grid(v)?;
    let Grid::Radial(g) = *u.grid() else {
        return Err(Error::InvalidGrid(
            "radial residual needs a radial grid".into(),
        ));
    };
    u.check_nonnegative()?;
    v.check_nonnegative()?;
    let (ru, rv) = residual_pair(&g, u.values(), v.values(), e);
    Ok((Field::new(g.into(), ru)?, Field::new(g.into(), rv)?))
}

pub(crate) fn residual_pair(
    g: &RadialGrid,
    u: &[f64],
    v: &[f64],
    e: &ExponentPair,
) -> (Vec<f64>, Vec<f64>) {
    let n = g.n();
    let mut ru = vec![0.0; n + 1];
    let mut rv = vec![0.0; n + 1];
    for i in 0..n {
        ru[i] = neg_laplacian(g, u, i) - pow_unchecked(v[i], e.p()).0;
        rv[i] = neg_laplacian(g, v, i) - pow_unchecked(u[i], e.q()).0;
    }
    ru[n] = u[n];
    rv[n] = v[n];
    (ru, rv)
}

#[inline]
pub(crate) fn neg_laplacian(g: &RadialGrid, w: &[f64], i: usize) -> f64 {
    let h = g.h();
    if i == 0 {
        return -4.0 * (w[1] - w[0]) / (h * h);
    }
    let r = g.node(i);
    -((w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h) + (w[i + 1] - w[i - 1]) / (2.0 * r * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        RadialGrid::new(1.0, n).unwrap().into()
    }

    #[test]
    fn trivial_pair_has_zero_residual() {
        let e = ExponentPair::new(3.0, 5.0).unwrap();
        let z = Field::zeros(grid(32));
        let (ru, rv) = radial_residual(&z, &z, &e).unwrap();
        assert!(ru.values().iter().chain(rv.values()).all(|&r| r == 0.0));
    }

    #[test]
    fn stencil_is_exact_on_paraboloid() {
        let e = ExponentPair::new(1.0, 2.0).unwrap();
        let u = Field::from_fn(grid(40), |r, _| 1.0 - r * r).unwrap();
        let v = Field::from_fn(grid(40), |_, _| 4.0).unwrap();
        let (ru, _) = radial_residual(&u, &v, &e).unwrap();
        for &r in &ru.values()[..40] {
            assert!(r.abs() < 1e-9, "{r}");
        }
    }

    #[test]
    fn negative_values_and_mismatched_grids_are_rejected() {
        let e = ExponentPair::new(2.0, 2.0).unwrap();
        let mut vals = vec![0.0; 33];
        vals[4] = -1e-3;
        let u = Field::new(grid(32), vals).unwrap();
        let v = Field::zeros(grid(32));
        assert!(matches!(
            radial_residual(&u, &v, &e),
            Err(Error::NegativeValue { index: 4, .. })
        ));
        let w = Field::zeros(grid(64));
        assert!(matches!(
            radial_residual(&v, &w, &e),
            Err(Error::GridMismatch)
        ));
    }
}
