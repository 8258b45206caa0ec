use std::fmt::Display;

/// Why a command stopped, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or flag combinations (exit 1).
    Usage(String),
    /// Unreadable, malformed or unsuitable input (exit 2).
    Data(String),
    /// A bug (exit 3).
    Internal(String),
}

impl Failure {
    pub fn data(e: impl Display) -> Self {
        Failure::Data(e.to_string())
    }

    pub fn internal(e: impl Display) -> Self {
        Failure::Internal(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}
