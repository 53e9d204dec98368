use thiserror::Error;

/// Errors raised across the wave laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no interaction: {0}")]
    NoInteraction(String),

    #[error("outgoing fan not found: {0}")]
    FanNotFound(String),

    #[error("profile construction failed: {0}")]
    Profile(String),

    #[error("integration failed at tau = {tau}: {reason}")]
    Integration {
        tau: f64,
        reason: String,
        /// Where the failing state was dumped, when a dump was possible.
        snapshot: Option<std::path::PathBuf>,
    },

    #[error("empty sample set: {0}")]
    EmptySample(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl Error {
    /// Process exit status: 2 for configuration problems, 3 for solver
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Usage(_) | Error::Domain(_) => 2,
            Error::NoInteraction(_)
            | Error::FanNotFound(_)
            | Error::Profile(_)
            | Error::Integration { .. }
            | Error::EmptySample(_) => 3,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
