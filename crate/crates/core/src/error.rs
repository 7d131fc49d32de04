use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidInput,
    Numeric,
    Capacity,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: at least 2 is required")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension {n} exceeds the dense solver capacity of {max}")]
    Capacity { n: usize, max: usize },

    #[error("QR iteration did not converge: {iterations} sweeps, {unresolved} eigenvalues unresolved")]
    NoConvergence { iterations: usize, unresolved: usize },

    #[error("eigenvalue product disagrees with the determinant: log residual {residual:e}")]
    DeterminantResidual { residual: f64 },

    #[error("eigenvalue modulus {modulus} is within {tol:e} of the unit circle")]
    BorderlineSpectrum { modulus: f64, tol: f64 },

    #[error("spectrum has no expanding eigenvalues; not a C-system")]
    NotCSystem,

    #[error("index convention {convention} is not defined for N = {n}")]
    UnsupportedConvention { convention: &'static str, n: usize },

    #[error("seed must not be empty")]
    InvalidSeed,

    #[error("undersampled: {samples} samples, at least {required} required")]
    Undersampled { samples: usize, required: usize },

    #[error("sequence has zero variance")]
    ZeroVariance,

    #[error("degenerate frame: |e_{i} ^ e_{j}|^2 = {area:e}")]
    DegenerateFrame { i: usize, j: usize, area: f64 },

    #[error("integration accuracy lost: relative energy drift {drift:e}")]
    Accuracy { drift: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Capacity { .. } => ErrorKind::Capacity,
            Error::NoConvergence { .. }
            | Error::DeterminantResidual { .. }
            | Error::BorderlineSpectrum { .. }
            | Error::NotCSystem
            | Error::ZeroVariance
            | Error::DegenerateFrame { .. }
            | Error::Accuracy { .. } => ErrorKind::Numeric,
            _ => ErrorKind::InvalidInput,
        }
    }
}
