use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty interval: lower bound {lo} exceeds upper bound {hi}")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("interval [{lo}, {hi}] lies below unison; ratios must be >= 1")]
    BelowUnison { lo: f64, hi: f64 },

    #[error("rational search exceeded the denominator guard {guard}")]
    GuardExceeded { guard: u64 },

    #[error("value {value} outside domain: {expected}")]
    Domain { value: f64, expected: &'static str },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("field is not swap-symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error(
        "mode with frequency {max_freq} is not resolvable on a {grid}x{grid} grid \
         (needs every |c| < {grid}/2); raise the grid or lower the mode count"
    )]
    Nyquist { max_freq: u32, grid: usize },

    #[error("index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
