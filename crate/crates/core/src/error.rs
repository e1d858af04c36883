use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H - H^dagger| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("expectation value has imaginary residue {residue:e}; operator is not Hermitian")]
    ComplexExpectation { residue: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "projection domain error: radicand 1 - (1 - |1 - 2*h0|)^2 = {radicand} is negative \
         for h0_tilde = {h0_tilde} (valid range is [-0.5, 1.5])"
    )]
    ProjectionDomain { h0_tilde: f64, radicand: f64 },

    #[error(
        "initial Hamiltonian is degenerate (gap {gap:e} < {threshold:e}); \
         perturb the offset H0 so the sweep does not start on a degeneracy point"
    )]
    DegenerateInitialState { gap: f64, threshold: f64 },

    #[error("terminal Hamiltonian is degenerate (gap {gap:e}); ground-state population is undefined")]
    DegenerateTerminalState { gap: f64 },

    #[error("degeneracy on sweep sphere: gap {gap:e} at theta = {theta}, phi = {phi}")]
    GapClosed { gap: f64, theta: f64, phi: f64 },

    #[error("lattice Chern sum {value} is not within 1e-6 of an integer")]
    NonIntegerChern { value: f64 },

    #[error("theta grid mismatch: {0}")]
    GridMismatch(String),

    #[error("unknown method `{name}` (available: {available})")]
    UnknownMethod { name: String, available: String },

    #[error("method `{method}` does not support the {system} system")]
    UnsupportedSystem { method: String, system: &'static str },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the caller's parameters rather than by the
    /// computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::ProjectionDomain { .. }
                | Error::UnknownMethod { .. }
                | Error::UnsupportedSystem { .. }
        )
    }
}
