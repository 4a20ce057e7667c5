use thiserror::Error;

use crate::ensembles::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("input is not Hermitian: max |H - H^dagger| = {residual:.3e} exceeds {tolerance:.0e}")]
    NonHermitianInput { residual: f64, tolerance: f64 },

    #[error("operator is singular: min eigenvalue {min_eigenvalue:.3e} is below {floor:.0e}")]
    SingularOperator { min_eigenvalue: f64, floor: f64 },

    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("outcome {index} has probability {mu:.3e}, at or below the floor {floor:.0e}")]
    ZeroProbabilityOutcome { index: usize, mu: f64, floor: f64 },

    #[error("numeric integrity violation in {quantity}: value {value:.17e}")]
    NumericIntegrity { quantity: &'static str, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} out of range for {what} of length {len}")]
    IndexOutOfRange { what: &'static str, index: usize, len: usize },

    #[error("decomposition is infeasible: failure operator has min eigenvalue {min_eigenvalue:.3e}")]
    InfeasibleDecomposition { min_eigenvalue: f64 },

    #[error("validation failed:\n{0}")]
    Validation(ValidationReport),
}

impl Error {
    /// Input and validation problems, as opposed to numeric-integrity failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::InvalidParameter { .. }
                | Error::DimensionMismatch { .. }
                | Error::IndexOutOfRange { .. }
                | Error::NonHermitianInput { .. }
        )
    }
}
