use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("field has {got} values but the grid has {expected} nodes")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("the zero state is excluded from the Nehari manifold")]
    ZeroState,

    #[error("ray misses the manifold: quartic moment is zero and cubic moment {cubic} is not positive")]
    RayMissesManifold { cubic: f64 },

    #[error("state is off the manifold: |G| = {residual:e} exceeds {tol:e}")]
    OffManifold { residual: f64, tol: f64 },

    #[error("no positive Nehari scaling: constant term {constant} is not positive")]
    NoPositiveScaling { constant: f64 },

    #[error("fourth-order semi-trivial profile required but none was supplied")]
    ProfileRequired,

    #[error("no threshold found in [{lo:e}, {hi:e}]: gap({lo:e}) = {gap_lo:e}, gap({hi:e}) = {gap_hi:e}")]
    NoThreshold {
        lo: f64,
        hi: f64,
        gap_lo: f64,
        gap_hi: f64,
    },

    #[error("boundary case: beta = {beta} is within {resolution:e} of Lambda = {lambda}")]
    Indeterminate {
        beta: f64,
        lambda: f64,
        resolution: f64,
    },

    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm:e}): {reason}")]
    NonConvergence {
        iterations: usize,
        grad_norm: f64,
        reason: String,
    },

    #[error("mountain pass: {0}")]
    NoPassGeometry(String),

    #[error("Newton iteration diverged; largest contracting epsilon was {max_epsilon:e}")]
    NewtonDivergence { max_epsilon: f64 },

    #[error("negative value {value} at node {index}; rearrangement needs a non-negative field")]
    NegativeInput { index: usize, value: f64 },

    #[error("singular matrix: zero pivot in column {0}")]
    Singular(usize),
}
