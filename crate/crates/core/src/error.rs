use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `s·y` is zero, negative, or below the near-zero curvature guard.
    #[error("curvature s'y = {sy:e} is not positive")]
    CurvatureNonPositive { sy: f64 },
    #[error("degenerate gradient pair: {0}")]
    DegeneratePair(&'static str),
    #[error("gamma = {0} is outside [0, 1]")]
    GammaOutOfRange(f64),
    #[error("tau = {0} is outside [0, 1]")]
    TauOutOfRange(f64),
    #[error("psi has no sign change on [bb2, bb1]")]
    NoSignChange,
    #[error("missing parameter: {0}")]
    MissingParameter(&'static str),
    #[error("spectrum layout {kind} needs n >= {min_n}, got {n}")]
    BadFraction { kind: String, n: usize, min_n: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gradient is zero")]
    ZeroGradient,
    #[error("insufficient history: {0}")]
    InsufficientHistory(&'static str),
    #[error("sequence too short: need {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("expected a two-dimensional problem, got n = {0}")]
    DimensionNotTwo(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("gradient history in eigen-coordinates was not recorded")]
    MissingEigenbasis,
    #[error("starting point violates the nonzero-component condition: {0}")]
    StartCondition(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
