use thiserror::Error;

#[derive(Debug, Error)]
pub enum NlmError {
    #[error("local dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("amplitude matrix is {rows}x{cols}, expected {dim}x{dim}")]
    ShapeMismatch { dim: usize, rows: usize, cols: usize },

    #[error("state or spectrum is not normalised: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("Schmidt coefficient {index} is negative or non-finite ({value})")]
    InvalidCoefficient { index: usize, value: f64 },

    #[error("Schmidt coefficients are not sorted in descending order")]
    NotSorted,

    #[error("closed form available only for dimensions 2, 3, 4 and 5; got {0}")]
    UnsupportedDimension(usize),

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("expected {expected} parameters, got {got}")]
    ParamLength { expected: usize, got: usize },

    #[error("operation requires local dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("invalid exponent pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid optimiser configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("malformed scan file: {0}")]
    MalformedScan(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = NlmError> = std::result::Result<T, E>;
