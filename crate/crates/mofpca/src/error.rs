use std::path::PathBuf;

/// Errors surfaced by the library and mapped onto CLI exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    FileRead {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    FileWrite {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("enumeration cap exceeded: C({d},{r}) = {count} subsets > cap {cap}")]
    EnumerationCap {
        d: usize,
        r: usize,
        count: u64,
        cap: u64,
    },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    /// Process exit code for the CLI: 2 input, 3 config, 4 enumeration cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::FileRead { .. } | Error::FileWrite { .. } | Error::InvalidInput(_) => 2,
            Error::InvalidConfig(_) => 3,
            Error::EnumerationCap { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
