use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length {len} is too small, need at least {min}")]
    LengthTooSmall { len: usize, min: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error(
        "interior-point solver did not converge after {iterations} iterations \
         (gap {duality_gap:e}, residual {kkt_residual:e})"
    )]
    NotConverged {
        iterations: usize,
        duality_gap: f64,
        kkt_residual: f64,
    },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(&'static str),

    #[error("insufficient history: need {needed} samples, have {available}")]
    InsufficientHistory { needed: usize, available: usize },

    #[error("segment of length {len} is too short, need at least {min}")]
    SegmentTooShort { len: usize, min: usize },

    #[error("variance is zero")]
    ZeroVariance,

    #[error("non-positive price at index {index}")]
    NonPositivePrice { index: usize },

    #[error("series is empty")]
    EmptySeries,

    #[error("series {index} has length {found}, expected {expected}")]
    UnequalLengths {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("time stamps are not strictly increasing at position {index}")]
    NonMonotoneTime { index: usize },

    #[error("optimizer failed: {0}")]
    OptimizerFailure(&'static str),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::NotConverged { .. }
                | Error::NumericalBreakdown(_)
                | Error::OptimizerFailure(_)
        )
    }
}
