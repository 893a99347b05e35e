use thiserror::Error;

/// Errors produced by the geometry and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DragonError {
    #[error("{name} = {value} is outside the valid domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("level {level} exceeds the resource guard of {max}")]
    Resource { level: u32, max: u32 },

    #[error("segment index {index} out of range for level {level} ({count} segments)")]
    IndexOutOfRange { level: u32, index: u64, count: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown condition id `{0}`")]
    UnknownCondition(String),

    #[error("no sign change on [{lo}, {hi}]: residuals {f_lo:e} and {f_hi:e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("invalid bracket [{lo}, {hi}]: {reason}")]
    InvalidBracket { lo: f64, hi: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, DragonError>;
