//! Error types shared across the crate.

use thiserror::Error;

/// Rejected construction of a box or instance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("box corners have mismatched lengths ({lo} vs {hi})")]
    CornerLengthMismatch { lo: usize, hi: usize },
    #[error("box dimension must be at least 1")]
    ZeroDimension,
    #[error("coordinate {value} in axis {axis} is not finite")]
    NonFiniteCoordinate { axis: usize, value: f64 },
    #[error("lower corner exceeds upper corner in axis {axis}: {lo} > {hi}")]
    InvertedCorner { axis: usize, lo: f64, hi: f64 },
    #[error("instance is {expected}-dimensional but box {index} is {got}-dimensional")]
    BoxDimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("declared dimension {declared} does not match domain dimension {domain}")]
    DeclaredDimensionMismatch { declared: usize, domain: usize },
}

/// The brute-force oracle refuses inputs it cannot handle in reasonable time.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid oracle handles at most {cap} boxes, got {n}")]
    TooManyBoxes { n: usize, cap: usize },
    #[error("grid oracle handles dimension at most {cap}, got {d}")]
    DimensionTooHigh { d: usize, cap: usize },
}

/// Rejected parameters for an instance family generator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("family '{family}' requires n >= 1, got {n}")]
    EmptyFamily { family: &'static str, n: usize },
    #[error("family '{family}' requires d >= 1, got {d}")]
    ZeroDimension { family: &'static str, d: usize },
    #[error("family '{family}' requires parameter '{name}' in 1..={max}, got {got}")]
    BadParameter {
        family: &'static str,
        name: &'static str,
        got: usize,
        max: usize,
    },
    #[error("family '{family}' requires parameter '{name}'")]
    MissingParameter {
        family: &'static str,
        name: &'static str,
    },
    #[error("unknown family '{0}'")]
    UnknownFamily(String),
}
