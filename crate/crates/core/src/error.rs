use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("regime {regime} requires {requirement}")]
    RegimeMismatch {
        regime: &'static str,
        requirement: &'static str,
    },

    #[error("Fock truncation overflow at t = {time}: tail mass {tail:.3e} exceeds {limit:.3e} of W; raise n_max")]
    TruncationOverflow { time: f64, tail: f64, limit: f64 },

    #[error("step size underflow at t = {time} (h = {step:.3e})")]
    StepSizeUnderflow { time: f64, step: f64 },

    #[error("survival record is not monotone at index {index}")]
    NonMonotoneRecord { index: usize },

    #[error("invalid survival record: {0}")]
    InvalidRecord(String),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("survival tail too heavy: W(t_end) = {w_end:.3e} above cutoff {cutoff:.3e} and no exponential tail applies")]
    TailTooHeavy { w_end: f64, cutoff: f64 },

    #[error("quadrature failed to converge on [{lo}, {hi}] (estimated error {error:.3e})")]
    QuadratureFailure { lo: f64, hi: f64, error: f64 },

    #[error("degenerate cubic: {0}")]
    DegenerateCubic(&'static str),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
