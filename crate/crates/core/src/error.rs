use std::fmt;

/// Errors shared across the synthesis and detection pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its documented precondition.
    InvalidArgument(String),
    /// An integration point coincided with a transceiver (r_T or r_R ~ 0).
    SingularGeometry(String),
    /// A CSI-ratio denominator sample fell below the magnitude floor.
    DegenerateDenominator { frame: usize, magnitude: f64 },
    /// The AGC series is too short to estimate a quiet baseline.
    InsufficientBaseline { needed: usize, got: usize },
    /// Too few samples survived for phase tracking.
    InsufficientData(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::SingularGeometry(msg) => write!(f, "singular geometry: {msg}"),
            Error::DegenerateDenominator { frame, magnitude } => write!(
                f,
                "degenerate ratio denominator at frame {frame} (|sample| = {magnitude:.3e})"
            ),
            Error::InsufficientBaseline { needed, got } => write!(
                f,
                "insufficient baseline: need more than {needed} frames, got {got}"
            ),
            Error::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
