use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid interval: left end must be strictly below right end")]
    InvalidInterval,
    #[error("invalid sequence representation: {0}")]
    InvalidRepresentation(String),
    #[error("this operation requires pairwise distinct voters")]
    RequiresDistinctVoters,
    #[error("sweep event at {event} precedes the sweep line at {sweep}")]
    SweepOrderViolation { sweep: String, event: String },
    #[error("invalid gains: alpha {alpha} is smaller than beta {beta}")]
    InvalidGains { alpha: usize, beta: usize },
    #[error("instance too large for the exhaustive oracle: {0}")]
    OracleTooLarge(String),
    #[error("internal error: {0}")]
    InternalError(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
