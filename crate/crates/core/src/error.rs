use thiserror::Error;

/// Errors raised by mesh generation, discretization and the study harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("no sign change of the residual on [{a}, {b}]")]
    RootNotBracketed { a: f64, b: f64 },

    #[error("root finding did not converge after {iterations} iterations")]
    RootNotConverged { iterations: usize },

    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),

    #[error("no positive step vector satisfies the Sidorov constraints: {0}")]
    Infeasible(String),

    #[error("coefficient sign condition violated: {0}")]
    SignError(String),

    #[error("zero pivot in row {row} of the tridiagonal elimination")]
    PivotBreakdown { row: usize },

    #[error("scheme {scheme} cannot discretize a {kind} problem")]
    SchemeMismatch { scheme: &'static str, kind: &'static str },

    #[error("exact solution required but the problem has none")]
    MissingExactSolution,

    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::InvalidMesh(_)
                | Error::SchemeMismatch { .. }
                | Error::MissingExactSolution
                | Error::Config(_)
                | Error::SignError(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
