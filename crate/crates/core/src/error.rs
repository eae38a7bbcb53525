use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rational {input:?}: {reason}")]
    InvalidRational { input: String, reason: String },

    #[error("invalid piecewise-linear function: {0}")]
    InvalidFunction(String),

    #[error("invalid schedule field `{field}`: {reason}")]
    InvalidSchedule { field: &'static str, reason: String },

    #[error("`{name}` = {value} is outside {domain}")]
    OutOfDomain {
        name: &'static str,
        value: Rational,
        domain: &'static str,
    },

    #[error("epsilon {eps} is too large for positive interval [{left}, {right}]: new breakpoints would collide or invert")]
    StepCollision {
        left: Rational,
        right: Rational,
        eps: Rational,
    },

    #[error("positive-slope interval [{left}, {right}] is not contained in [0, alpha]")]
    NotConstructionInput { left: Rational, right: Rational },

    #[error("schedule provides {available} epsilons, depth {requested} requested")]
    ScheduleExhausted { requested: usize, available: usize },

    #[error("depth {requested} exceeds the full-construction limit {max}")]
    DepthPolicy { requested: usize, max: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
