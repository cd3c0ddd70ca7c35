use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to reconstruct
/// which stage of a computation rejected its input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),

    #[error("quadrature rule is empty: {0}")]
    EmptyRule(String),

    #[error("non-finite value {value} at node {index} ({location})")]
    NonFiniteNode {
        index: usize,
        location: String,
        value: f64,
    },

    #[error("boundary residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    BoundaryResidual { residual: f64, tolerance: f64 },

    #[error("extrapolation did not converge (spread {spread:.3e} > {tolerance:.3e})")]
    NonConvergent { spread: f64, tolerance: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("gram matrix fully dropped by stabilization ({0})")]
    RankCollapse(String),

    #[error("extension constraints infeasible (worst residual {0:.3e})")]
    Infeasible(f64),

    #[error("{0}")]
    Invalid(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
