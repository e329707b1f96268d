//! Crate-wide error type.

/// Errors produced by simulator, observable, and estimator operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A register or matrix exceeds the supported size guard.
    #[error("size out of range: {0}")]
    Size(String),
    /// A qubit, branch, or level index is out of range.
    #[error("index out of range: {0}")]
    Index(String),
    /// Dimensions of two objects do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A scalar argument lies outside its domain.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A gate angle could not be resolved from the parameter vector.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A parametric gate is not compatible with the parameter-shift rule.
    #[error("unsupported gate for parameter shift: {0}")]
    UnsupportedGate(String),
    /// A mixing coefficient is below the positivity floor.
    #[error("singular mixing coefficient: {0}")]
    SingularMixing(String),
    /// Input data contains non-finite or otherwise unusable values.
    #[error("invalid data: {0}")]
    Data(String),
    /// The ratio estimator's denominator underflowed.
    #[error("denominator underflow: {0}")]
    Underflow(String),
    /// A text input (observable file, angle file) failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
