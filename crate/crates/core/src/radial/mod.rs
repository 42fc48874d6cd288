//! Radially symmetric solutions on a disk.

pub mod continuation;
pub mod newton;
pub mod residual;
pub mod shooting;

pub use continuation::{continue_path, solve_with_continuation};
pub use newton::{solve_newton, RadialSolveConfig};
pub use residual::radial_residual;
pub use shooting::{
    profile_integrals, profile_moment, solve_shooting, solve_shooting_on, ProfileIntegrals,
};
