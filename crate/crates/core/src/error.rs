use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the simulator can report.
///
/// Variants fall into three families that the CLI maps onto exit codes:
/// input problems (parse/validation), numerical invariant violations, and
/// internal faults. See [`Error::exit_code`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("entry is not finite")]
    NonFinite,

    #[error("matrix shape does not match entry count")]
    BadShape,

    #[error("state vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("state vector is zero and cannot be normalized")]
    ZeroVector,

    #[error("operator is not positive semidefinite (min eigenvalue = {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is not one (trace = {trace})")]
    TraceNotOne { trace: f64 },

    #[error("bad mixture weights: {0}")]
    BadWeights(String),

    #[error("observables {first} and {second} do not commute (commutator norm {norm:e})")]
    NotCommuting { first: usize, second: usize, norm: f64 },

    #[error("expectation value has imaginary part {imag:e}")]
    NonRealExpectation { imag: f64 },

    #[error("apparatus dimension {dim_apparatus} is smaller than the number of outcomes {n_outcomes}")]
    TooSmall { n_outcomes: usize, dim_apparatus: usize },

    #[error("basis is not orthonormal (max |V^dagger V - I| = {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("measured observable is degenerate (outcome {outcome} has multiplicity {multiplicity})")]
    Degenerate { outcome: f64, multiplicity: usize },

    #[error("element is not in the algebra (off-block residual {residual:e})")]
    NotInAlgebra { residual: f64 },

    #[error("amplitudes are not normalized (|c1|^2 + |c2|^2 = {norm_sq})")]
    BadAmplitudes { norm_sq: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("unknown format `{0}` (expected `table` or `json`)")]
    UnknownFormat(String),

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Wraps an inner error as a validation failure on a named scenario field.
    pub fn at_field(self, field: impl Into<String>) -> Error {
        match self {
            e @ (Error::Validation { .. } | Error::Parse { .. }) => e,
            other => Error::Validation {
                field: field.into(),
                reason: other.to_string(),
            },
        }
    }

    /// Process exit code: 1 input error, 2 numerical invariant violation, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::Validation { .. }
            | Error::UnknownFormat(_)
            | Error::InvalidArgument(_)
            | Error::BadAmplitudes { .. }
            | Error::BadWeights(_)
            | Error::NotHermitian { .. }
            | Error::NotNormalized { .. }
            | Error::ZeroVector
            | Error::NotPositive { .. }
            | Error::TraceNotOne { .. }
            | Error::NotSquare { .. }
            | Error::DimMismatch { .. }
            | Error::NonFinite
            | Error::BadShape
            | Error::TooSmall { .. }
            | Error::Degenerate { .. }
            | Error::NotCommuting { .. }
            | Error::NotOrthonormal { .. }
            | Error::NotInAlgebra { .. }
            | Error::Io(_) => 1,
            Error::InvariantViolation(_) | Error::NonRealExpectation { .. } => 2,
        }
    }
}
