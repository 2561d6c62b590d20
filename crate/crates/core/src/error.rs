use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the moment, reconstruction and testing routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid statistic: {0}")]
    InvalidSpec(String),

    #[error("degenerate statistic: all weights are zero")]
    DegenerateWeights,

    #[error("negative weights are not supported here (normalized statistic must lie in [0,1])")]
    NegativeWeights,

    #[error("operation requires a {expected} statistic")]
    WrongMode { expected: &'static str },

    #[error("instance too large: {what} = {size} exceeds cap {cap}")]
    SizeCap { what: &'static str, size: String, cap: String },

    #[error("moment sequence violates the Hausdorff condition at order r={order}, index j={index}")]
    InvalidMoments { order: usize, index: usize },

    #[error("requested {requested} moments but only {available} are available")]
    NotEnoughMoments { requested: usize, available: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("sample value {value} lies outside the support of the null distribution")]
    OutsideSupport { value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True when the error signals a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::InvalidMoments { .. })
    }
}
