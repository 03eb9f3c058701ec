use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),
    #[error("parameter regime violation: {0}")]
    Regime(String),
    #[error("degree {requested} exceeds cached maximum {max}")]
    DegreeOutOfRange { requested: usize, max: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point outside domain: {0}")]
    Domain(String),
    #[error("singular input: {0}")]
    Singular(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::Io(_) | Error::Serialization(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
