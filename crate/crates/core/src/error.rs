use thiserror::Error;

/// Errors raised by the filtering library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pgm parse error at byte {offset}: {message}")]
    Pgm { offset: usize, message: String },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("kernel not truncatable: {0}")]
    NotTruncatable(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("requested {requested} terms but only {available} coefficients are available")]
    NotEnoughCoefficients { requested: usize, available: usize },

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("image too small for ssim: {width}x{height} (need at least {min} in each dimension)")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("no cached radius covers T_r = {0:.4}")]
    NoCachedRadius(f64),

    #[error("cache does not hold frequency {frequency} (max {max})")]
    FrequencyNotCached { frequency: usize, max: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
