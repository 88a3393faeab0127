use thiserror::Error;

/// Errors raised while constructing states or evaluating bounds and oracles.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square or does not match the 2 x {dim_b} layout ({rows}x{cols})")]
    Shape { rows: usize, cols: usize, dim_b: usize },

    #[error("matrix is not Hermitian: max |M - M^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix does not have unit trace: |Tr - 1| = {deviation:e}")]
    NotUnitTrace { deviation: f64 },

    #[error("matrix is not positive semi-definite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("Bell-diagonal coefficients ({c1}, {c2}, {c3}) do not define a positive state")]
    NotPositiveBellDiagonal { c1: f64, c2: f64, c3: f64 },

    #[error("matrix is not unitary: max |U U^dagger - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid rank {rank} for a state of dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("alpha = {0} must lie in [0, 1]")]
    InvalidAlpha(f64),

    #[error("probability {0} must lie strictly inside (0, 1)")]
    InvalidProbability(f64),

    #[error("Bloch vector length {0} exceeds 1")]
    InvalidBlochLength(f64),

    #[error("filter is singular: |det F| = {det:e}")]
    SingularFilter { det: f64 },

    #[error("reduced state of the qubit is singular: minimum eigenvalue {min_eigenvalue:e}")]
    SingularMarginal { min_eigenvalue: f64 },

    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("operation requires qudit dimension {expected}, got {actual}")]
    WrongDimension { expected: usize, actual: usize },

    #[error("Lorentz spectrum has an imaginary part {imag:e} above tolerance")]
    ComplexSpectrum { imag: f64 },

    #[error("argument {value} is outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("X-state parameters violate the coincidence condition: {lhs} > {rhs}")]
    ConditionViolated { lhs: f64, rhs: f64 },

    #[error("numerical coincidence check failed: |q2 - t1| = {gap:e}")]
    CoincidenceFailed { gap: f64 },

    #[error("closed-form lower bound requires u1 = 0 and d >= 4 (u1 = {u1:e}, d = {d})")]
    Regime { u1: f64, d: usize },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Variant name, used by the CLI to report which invariant failed.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Shape { .. } => "Shape",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotUnitTrace { .. } => "NotUnitTrace",
            Error::NotPositive { .. } => "NotPositive",
            Error::NotPositiveBellDiagonal { .. } => "NotPositiveBellDiagonal",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::InvalidRank { .. } => "InvalidRank",
            Error::InvalidAlpha(_) => "InvalidAlpha",
            Error::InvalidProbability(_) => "InvalidProbability",
            Error::InvalidBlochLength(_) => "InvalidBlochLength",
            Error::SingularFilter { .. } => "SingularFilter",
            Error::SingularMarginal { .. } => "SingularMarginal",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::WrongDimension { .. } => "WrongDimension",
            Error::ComplexSpectrum { .. } => "ComplexSpectrum",
            Error::Domain { .. } => "Domain",
            Error::ConditionViolated { .. } => "ConditionViolated",
            Error::CoincidenceFailed { .. } => "CoincidenceFailed",
            Error::Regime { .. } => "Regime",
            Error::InvalidPovm(_) => "InvalidPovm",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
