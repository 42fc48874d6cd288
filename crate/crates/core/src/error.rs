use std::path::PathBuf;

use crate::solution::SolutionPair;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid exponents (p = {p}, q = {q}): {reason}")]
    InvalidExponents {
        p: f64,
        q: f64,
        reason: &'static str,
    },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("fields live on different grids")]
    GridMismatch,

    /// A negative value was passed where only nonnegative reals are allowed.
    #[error("domain error: negative value {value} at index {index}")]
    NegativeValue { index: usize, value: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    /// Newton stopped before reaching the tolerance; the best iterate is attached.
    #[error(
        "Newton did not converge for (p, q) = ({}, {}): relative residual {:.3e} after {} iterations",
        best.exponents.p(), best.exponents.q(), best.residual_norm, best.newton_iterations
    )]
    NonConvergence { best: Box<SolutionPair> },

    /// The line search could not keep the iterate nonnegative.
    #[error(
        "positivity lost for (p, q) = ({}, {}) after {} iterations; warm-start from nearer exponents",
        best.exponents.p(), best.exponents.q(), best.newton_iterations
    )]
    PositivityLoss { best: Box<SolutionPair> },

    #[error("shooting diverged: {0}")]
    ShootingDivergence(String),

    #[error("continuation stalled at (p, q) = ({p}, {q}): step fell below the minimum")]
    ContinuationStalled { p: f64, q: f64 },

    #[error("inverse iteration stagnated after {iterations} iterations (drift {drift:.3e})")]
    EigenStagnation { iterations: usize, drift: f64 },

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    /// Best iterate carried by a solver failure, if any.
    pub fn best_iterate(&self) -> Option<&SolutionPair> {
        match self {
            Error::NonConvergence { best } | Error::PositivityLoss { best } => Some(best),
            _ => None,
        }
    }
}
