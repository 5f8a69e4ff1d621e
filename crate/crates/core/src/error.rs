use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },

    #[error("width mismatch: expected {expected}, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("level {level} is invalid for an index set of size {size}")]
    InvalidLevel { level: usize, size: usize },

    #[error("width {width} exceeds the enumeration cap of {cap}")]
    EnumerationCap { width: usize, cap: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Recall coefficient is zero, so the purity ratio has no value.
    #[error("purity undefined: recall coefficient is zero")]
    UndefinedPurity,

    #[error("precision undefined: factor activation rate is zero")]
    UndefinedPrecision,

    #[error("no feasible (p, q) pair with p + q <= {cap}")]
    InfeasibleTuple { cap: u32 },

    #[error("sampling gave up after {0} instants without a usable factor activation")]
    SamplingTimeout(u64),

    /// Draining left no input vertex connected to the output.
    #[error("no input vertex survived draining")]
    NoSurvivors,

    #[error("estimator never fired during evaluation")]
    EstimatorSilent,

    #[error("snapshot parse error at line {line}: {msg}")]
    Snapshot { line: usize, msg: String },
}
