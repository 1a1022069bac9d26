use thiserror::Error;

use crate::curve::SegmentTag;

/// Errors raised by parameter validation, the numeric kernels and the
/// curve constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("missing parameter `{0}`")]
    MissingKey(String),
    #[error("unknown parameter `{0}`")]
    UnknownKey(String),
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no sign change in bracket: {0}")]
    NoBracket(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("field blow-up: {0}")]
    FieldBlowup(String),
    #[error("cancellation loss: {0}")]
    CancellationLoss(String),
    #[error("outside domain: {0}")]
    OutsideDomain(String),
    #[error("regime violation: {0}")]
    RegimeViolation(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("eta = {eta} is below the admissible minimum {eta_min}")]
    EtaTooSmall { eta: f64, eta_min: f64 },
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("io: {0}")]
    Io(String),
    #[error("segment {tag}: {source}")]
    Segment {
        tag: SegmentTag,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps the error with the tag of the curve segment that produced it.
    pub fn in_segment(self, tag: SegmentTag) -> Error {
        match self {
            e @ Error::Segment { .. } => e,
            e => Error::Segment {
                tag,
                source: Box::new(e),
            },
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// | code | meaning |
    /// |------|---------|
    /// | 1 | invalid parameters or arguments |
    /// | 2 | numerical failure |
    /// | 3 | regime or assumption violated |
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingKey(_)
            | Error::UnknownKey(_)
            | Error::InvalidRegime(_)
            | Error::InvalidArgument(_)
            | Error::EtaTooSmall { .. }
            | Error::DivisionByZero(_)
            | Error::Io(_) => 1,
            Error::NoBracket(_)
            | Error::NonConvergence(_)
            | Error::FieldBlowup(_)
            | Error::CancellationLoss(_) => 2,
            Error::OutsideDomain(_) | Error::RegimeViolation(_) | Error::AssumptionViolated(_) => 3,
            Error::Segment { source, .. } => source.exit_code(),
        }
    }
}
