use thiserror::Error;

/// Errors reported by the toolkit.
///
/// Every variant names the violated precondition or the offending input so
/// that CLI messages can be emitted verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV row at line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("non-monotonic timestamps in {group} at line {line}: {at} does not increase on {prev}")]
    NonMonotonic {
        group: String,
        line: u64,
        prev: f64,
        at: f64,
    },

    #[error("run {run} has no FAILURE trailer row")]
    MissingFailureTrailer { run: String },

    #[error("invalid record for {group}: {message}")]
    InvalidRecord { group: String, message: String },

    #[error("column {column} is constant (min == max == {value}); cannot normalize")]
    ConstantColumn { column: String, value: f64 },

    #[error("arity mismatch: expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("non-finite input value at position {index}")]
    NonFiniteInput { index: usize },

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("degenerate sample: all {n} values are identical ({value}); shape parameter is unbounded")]
    DegenerateSample { n: usize, value: f64 },

    #[error("non-positive duration {value} at index {index}")]
    NonPositiveDuration { index: usize, value: f64 },

    #[error("negative duration {value} not allowed")]
    NegativeDuration { value: f64 },

    #[error("empty batch: {context}")]
    EmptyBatch { context: &'static str },

    #[error("training diverged at epoch {epoch}: mean squared error is not finite")]
    Divergence { epoch: usize },

    #[error(
        "ill-conditioned training problem: {params} network parameters exceed {rows} training rows{context}"
    )]
    Conditioning {
        params: usize,
        rows: usize,
        context: String,
    },

    #[error("normal matrix is singular even at the damping cap")]
    SingularNormalMatrix,

    #[error("invalid configuration: {message}")]
    InvalidConfig { message: String },

    #[error("invalid model file {path}: {message}")]
    InvalidModelFile { path: String, message: String },

    #[error("risk variable undefined: elapsed time T={t} must be positive")]
    RiskNonPositiveElapsed { t: f64 },

    #[error("risk variable undefined: first failure T1={t1} exceeds elapsed time T={t}")]
    RiskFirstFailureAfterElapsed { t1: f64, t: f64 },

    #[error("overlapping run ids between training and test sets: {id}")]
    OverlappingGroups { id: String },

    #[error("cross-validation needs at least 2 groups, got {got}")]
    TooFewGroups { got: usize },

    #[error("{0}")]
    Protocol(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            message: message.into(),
        }
    }
}
