//! Positive solutions of the planar Lane–Emden system
//! `−Δu = v^p`, `−Δv = u^q` with zero Dirichlet data, and numerical checks of
//! the identities and bounds they satisfy.

pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod exponents;
pub mod grid;
pub mod linalg;
pub mod newton;
pub mod ode;
pub mod planar;
pub mod power;
pub mod quadrature;
pub mod radial;
pub mod solution;
pub mod spectral;
pub mod sweeps;

pub use diagnostics::{evaluate, DiagnosticsOptions, DiagnosticsReport};
pub use domain::DomainSpec;
pub use error::{Error, Result};
pub use exponents::{classify, Criticality, ExponentPair};
pub use grid::{Grid, PlanarGrid, RadialGrid};
pub use newton::{Damping, Init};
pub use planar::{solve_planar, PlanarSolveConfig};
pub use power::stable_pow;
pub use quadrature::{normal_derivative, BoundarySample, BoundaryTrace};
pub use radial::{radial_residual, solve_newton, solve_shooting, RadialSolveConfig};
pub use solution::{Eigenpair, Field, SolutionPair};
pub use spectral::first_dirichlet_eigenpair;
pub use sweeps::{fit_logarithmic, run_sweep, SweepMode, SweepPlan, SweepRow, SweepTable};
