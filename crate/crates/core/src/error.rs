use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    Domain(String),

    #[error("invalid subdomain: {0}")]
    Subdomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field invariant violated: {0}")]
    Invariant(String),

    #[error("incompatible Neumann data: mean {mean:e} exceeds {limit:e}")]
    IncompatibleNeumann { mean: f64, limit: f64 },

    #[error("non-finite value in {what} at step {step}, t = {time}")]
    NonFinite { what: String, step: usize, time: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("snapshot cadence too coarse: interval {interval:e} > required {required:e}")]
    Cadence { interval: f64, required: f64 },

    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("snapshot format error at byte {offset}: {msg}")]
    Format { offset: usize, msg: String },

    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(u32),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Subdomain(_) | Error::InvalidArgument(_) => 2,
            Error::Io { .. } | Error::Format { .. } | Error::UnsupportedVersion(_) => 4,
            _ => 3,
        }
    }

    /// Short machine-parsable code.
    pub fn code(&self) -> &'static str {
        match self.exit_code() {
            2 => "E_CONFIG",
            4 => "E_IO",
            _ => "E_NUMERIC",
        }
    }
}
