//! Pipeline behind the `orbispec` binary. Each subcommand writes its outputs
//! and a `<command>-manifest.json` into `--out-dir`.

pub mod args;
pub mod commands;
pub mod manifest;

use std::path::Path;

use thiserror::Error;

pub use args::{Cli, Command, Common};
pub use commands::run;
pub use manifest::RunManifest;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl RunError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 usage, 3 numerical refusal, 4 I/O, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io { .. } => 4,
            RunError::Internal(_) => 1,
        }
    }
}

impl From<orbifold_spectral::Error> for RunError {
    fn from(e: orbifold_spectral::Error) -> Self {
        use orbifold_spectral::Error as E;
        match e {
            E::Nyquist { .. } | E::GuardExceeded { .. } => RunError::Numerical(e.to_string()),
            E::Io(source) => RunError::Io {
                path: "<output>".into(),
                source,
            },
            E::InvalidParameter(_)
            | E::Domain { .. }
            | E::OutOfRange { .. }
            | E::EmptyInterval { .. }
            | E::BelowUnison { .. } => RunError::Usage(e.to_string()),
            E::ShapeMismatch(_) | E::NotSymmetric { .. } => RunError::Internal(e.to_string()),
        }
    }
}
