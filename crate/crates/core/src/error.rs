use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("rule `{0}` has no decision value")]
    UnsupportedRule(&'static str),

    #[error("seed window of {window} exceeds base sequence of length {base_len}")]
    InvalidSeed { window: usize, base_len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sweep cell ({axis1}={value1}, {axis2}={value2}) is invalid: {reason}")]
    InvalidCell {
        axis1: String,
        value1: f64,
        axis2: String,
        value2: f64,
        reason: String,
    },

    #[error("rank-deficient fit: {0}")]
    RankDeficient(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
