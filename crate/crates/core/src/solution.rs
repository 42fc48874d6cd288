use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::grid::Grid;

/// Nodal values on a grid. Radial fields include the boundary node `r = R`;
/// planar fields store interior nodes only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "field has {} values, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x, y)` at every stored node; radial grids pass `(r, 0)`.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.location(k);
                f(x, y)
            })
            .collect();
        Field::new(grid, values)
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Storage index of the maximum; ties go to the smallest index, which is
    /// the smallest radius on radial grids.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        best
    }

    pub(crate) fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub(crate) fn check_nonnegative(&self) -> Result<()> {
        match self.values.iter().position(|&v| v < 0.0) {
            Some(index) => Err(Error::NegativeValue {
                index,
                value: self.values[index],
            }),
            None => Ok(()),
        }
    }
}

/// A discrete solution `(u, v)` with solver metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPair {
    pub exponents: ExponentPair,
    pub u: Field,
    pub v: Field,
    /// `max |residual| / max(N^p, M^q)` at the returned iterate.
    pub residual_norm: f64,
    /// Tolerance in effect when the solve finished (never below the rounding floor).
    pub tolerance: f64,
    pub newton_iterations: usize,
    pub converged: bool,
}

impl SolutionPair {
    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// `M = max u`.
    pub fn max_u(&self) -> f64 {
        self.u.max()
    }

    /// `N = max v`.
    pub fn max_v(&self) -> f64 {
        self.v.max()
    }
}

/// First Dirichlet eigenpair with `φ` normalized to unit discrete L¹ norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    /// Two-grid Richardson estimate of the continuum eigenvalue.
    pub lambda: f64,
    /// Eigenvalue of the discrete operator on `phi`'s grid.
    pub grid_lambda: f64,
    pub phi: Field,
    pub iterations: usize,
    /// False when inverse iteration stagnated before the drift target.
    pub converged: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;

    #[test]
    fn field_validation() {
        let g: Grid = RadialGrid::new(1.0, 16).unwrap().into();
        assert!(Field::new(g, vec![0.0; 16]).is_err());
        let mut vals = vec![1.0; 17];
        vals[3] = f64::NAN;
        assert!(matches!(
            Field::new(g, vals),
            Err(Error::NonFinite { index: 3 })
        ));
    }

    #[test]
    fn argmax_prefers_smallest_index() {
        let g: Grid = RadialGrid::new(1.0, 16).unwrap().into();
        let mut vals = vec![0.0; 17];
        vals[2] = 3.0;
        vals[5] = 3.0;
        let f = Field::new(g, vals).unwrap();
        assert_eq!(f.argmax(), 2);
        assert_eq!(f.max(), 3.0);
    }
}
