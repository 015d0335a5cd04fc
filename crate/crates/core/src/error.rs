use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operation called with the wrong input form (representation tag, ordering).
    #[error("usage error: {0}")]
    Usage(String),

    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exponent outside the range covered by the theory (p > p^*).
    #[error("exponent out of range: {0}")]
    OutOfRange(String),

    /// Problem too large for an O(M^2) direct evaluation.
    #[error("size error: {points} grid points exceed the direct-sum cap of {cap}; use the convolution variant")]
    Size { points: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("component index {index} out of range for {count} components")]
    ComponentIndex { index: usize, count: usize },

    #[error("non-finite values detected at t = {time}")]
    Divergence { time: f64 },

    #[error("empty input: {0}")]
    Empty(String),
}
