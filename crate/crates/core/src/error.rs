use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("bit string lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("no path from {from} to {to}")]
    NoPath { from: String, to: String },

    #[error("{a} and {b} share no link")]
    NotALink { a: String, b: String },

    #[error("protocol deadlocked at round {round}: {reason}")]
    Deadlock { round: usize, reason: String },

    #[error("corruption set does not separate alice from bob")]
    NotSeparating,

    #[error("group of order {order} is too large to brute-force")]
    RefusesToBruteForce { order: u64 },

    #[error("ciphertext does not decrypt to a value below {bound}")]
    DecryptionFailed { bound: u64 },

    #[error("exact enumeration needs more than {bound} random tapes")]
    EnumerationBound { bound: u64 },

    #[error("tamper check aborted: opened run {run} is inconsistent")]
    Abort { run: usize },

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { path: path.into(), message: message.into() }
    }
}
