use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::UnitCircleWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is singular: {0}")]
    Singular(String),

    /// Some eigenvalue of the operator sits on (or within tolerance of) a pole
    /// of the kernel being evaluated.
    #[error("kernel singular: eigenvalue {eigenvalue} is within {distance:e} of the pole {pole}")]
    KernelSingular {
        eigenvalue: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("degree-1 part is not exponential solvable: {witness}")]
    NotSolvable { witness: UnitCircleWitness },

    #[error("exponential solvability is inconclusive at exponent bound {bound}; rerun with force to proceed")]
    Inconclusive { bound: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Domain(_) => "domain",
            Error::Singular(_) => "singular",
            Error::KernelSingular { .. } => "kernel_singular",
            Error::NotSolvable { .. } => "not_solvable",
            Error::Inconclusive { .. } => "inconclusive",
            Error::Precondition(_) => "precondition",
            Error::Unsupported(_) => "unsupported",
            Error::Verification(_) => "verification",
            Error::Parse(_) => "parse",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
