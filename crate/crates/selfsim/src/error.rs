use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("depth {0} exceeds the portrait capacity of {max}", max = crate::tree::MAX_DEPTH)]
    Capacity(usize),
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("vertex of level {vertex} is deeper than a portrait of depth {depth}")]
    TooDeep { vertex: usize, depth: usize },
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("budget exhausted: {what} (last completed radius {last_radius:?})")]
    Budget {
        what: String,
        last_radius: Option<usize>,
        counts: Vec<u64>,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 2,
            Error::Usage(_) => 64,
            Error::Invariant(_) | Error::Overflow(_) => 70,
            _ => 65,
        }
    }
}
