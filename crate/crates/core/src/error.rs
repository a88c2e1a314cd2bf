use thiserror::Error;

/// Errors produced by the models, the optimizer and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("object index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),

    /// A closed-form approximation was asked to evaluate outside the range
    /// where it tracks the exact model.
    #[error("outside approximation validity: {quantity} = {value} violates {bound} ({limit})")]
    OutOfValidity {
        quantity: &'static str,
        value: f64,
        bound: &'static str,
        limit: f64,
    },

    #[error("interval volume {volume} is shorter than the cache lifetime {lifetime}")]
    IntervalTooShort { volume: f64, lifetime: f64 },

    #[error("time {t} outside [0, {period}]")]
    TimeOutOfRange { t: f64, period: f64 },

    #[error("no transient period completed within {requests} requests")]
    UnderSampled { requests: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("search grid is empty")]
    EmptyGrid,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
