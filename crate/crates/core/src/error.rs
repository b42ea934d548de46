use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not unitary (defect {defect:.3e})")]
    NonUnitaryInput { defect: f64 },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NonHermitianInput { defect: f64 },

    #[error("matrix is not block-diagonal (off-diagonal weight {weight:.3e})")]
    NotBlockDiagonal { weight: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("pseudotime {s} outside path range [{start}, {end}]")]
    OutOfRange { s: f64, start: f64, end: f64 },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("path does not close in U(4)/LO (off-block weight {weight:.3e})")]
    NotClosed { weight: f64 },

    #[error("ordered exponential did not converge within {max_steps} steps (last change {residual:.3e})")]
    NoConvergence { max_steps: usize, residual: f64 },

    #[error("no closure solution with m + n <= {max_mn}")]
    NoSolution { max_mn: u32 },

    #[error(transparent)]
    Spec(#[from] crate::pathio::SpecError),

    #[error("malformed report: {0}")]
    Report(String),
}

impl Error {
    /// True for failures caused by malformed or out-of-contract input, as opposed
    /// to a numerical procedure failing on valid input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonUnitaryInput { .. }
                | Error::NonHermitianInput { .. }
                | Error::NotBlockDiagonal { .. }
                | Error::InvalidState(_)
                | Error::OutOfRange { .. }
                | Error::InvalidPath(_)
                | Error::InvalidGenerator(_)
                | Error::InvalidParameter(_)
                | Error::Spec(_)
                | Error::Report(_)
        )
    }
}
