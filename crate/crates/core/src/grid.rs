use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};

pub const MIN_NODES: usize = 16;

/// Uniform radial grid `r_i = i h`, `i = 0..=n`, on `[0, R]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    radius: f64,
    n: usize,
}

impl RadialGrid {
    pub fn new(radius: f64, n: usize) -> Result<Self> {
        DomainSpec::disk(radius)?;
        if n < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "radial grid needs n >= {MIN_NODES}, got {n}"
            )));
        }
        Ok(RadialGrid { radius, n })
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of cells; there are `n + 1` nodes.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.radius / self.n as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.radius
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.node(i))
    }

    pub fn domain(&self) -> DomainSpec {
        DomainSpec::Disk {
            radius: self.radius,
        }
    }

    /// Same disk with `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        RadialGrid::new(self.radius, self.n * factor)
    }
}

/// Interior nodes of a uniform grid on an origin-centered rectangle.
///
/// Node `(i, j)`, `0 ≤ i < nx`, `0 ≤ j < ny`, sits at
/// `x = -a/2 + (i+1) hx`, `y = -b/2 + (j+1) hy` and has lexicographic index
/// `j * nx + i`. Boundary nodes are not stored and carry the value zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarGrid {
    a: f64,
    b: f64,
    nx: usize,
    ny: usize,
}

impl PlanarGrid {
    pub fn new(domain: DomainSpec, nx: usize, ny: usize) -> Result<Self> {
        let DomainSpec::Rectangle { a, b } = domain else {
            return Err(Error::InvalidGrid(
                "planar grids are only defined on rectangles".into(),
            ));
        };
        domain.validate()?;
        if nx < MIN_NODES || ny < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "planar grid needs nx, ny >= {MIN_NODES}, got {nx} x {ny}"
            )));
        }
        Ok(PlanarGrid { a, b, nx, ny })
    }

    pub fn domain(&self) -> DomainSpec {
        DomainSpec::Rectangle {
            a: self.a,
            b: self.b,
        }
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.a / (self.nx + 1) as f64
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        self.b / (self.ny + 1) as f64
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k % self.nx, k / self.nx);
        (
            -0.5 * self.a + (i + 1) as f64 * self.hx(),
            -0.5 * self.b + (j + 1) as f64 * self.hy(),
        )
    }

    pub fn sides(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}

/// Either discretization; fields carry one by value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Grid {
    Radial(RadialGrid),
    Planar(PlanarGrid),
}

impl Grid {
    /// Default discretization of `domain`: `resolution` radial intervals on a
    /// disk; on a rectangle `resolution` interior nodes along the first side
    /// and the closest spacing along the second.
    pub fn for_domain(domain: DomainSpec, resolution: usize) -> Result<Self> {
        domain.validate()?;
        Ok(match domain {
            DomainSpec::Disk { radius } => RadialGrid::new(radius, resolution)?.into(),
            DomainSpec::Rectangle { a, b } => {
                let ny = (((resolution + 1) as f64 * b / a).round() as usize)
                    .saturating_sub(1)
                    .max(1);
                PlanarGrid::new(domain, resolution, ny)?.into()
            }
        })
    }

    /// Number of stored values for a field on this grid.
    pub fn len(&self) -> usize {
        match self {
            Grid::Radial(g) => g.n + 1,
            Grid::Planar(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain(&self) -> DomainSpec {
        match self {
            Grid::Radial(g) => g.domain(),
            Grid::Planar(g) => g.domain(),
        }
    }

    pub fn as_radial(&self) -> Option<&RadialGrid> {
        match self {
            Grid::Radial(g) => Some(g),
            Grid::Planar(_) => None,
        }
    }

    pub fn as_planar(&self) -> Option<&PlanarGrid> {
        match self {
            Grid::Planar(g) => Some(g),
            Grid::Radial(_) => None,
        }
    }

    /// Smallest mesh spacing.
    pub fn spacing(&self) -> f64 {
        match self {
            Grid::Radial(g) => g.h(),
            Grid::Planar(g) => g.hx().min(g.hy()),
        }
    }

    /// Location of storage slot `k`: `(r, 0)` for radial grids.
    pub fn location(&self, k: usize) -> (f64, f64) {
        match self {
            Grid::Radial(g) => (g.node(k), 0.0),
            Grid::Planar(g) => g.coords(k),
        }
    }
}

impl From<RadialGrid> for Grid {
    fn from(g: RadialGrid) -> Self {
        Grid::Radial(g)
    }
}

impl From<PlanarGrid> for Grid {
    fn from(g: PlanarGrid) -> Self {
        Grid::Planar(g)
    }
}
