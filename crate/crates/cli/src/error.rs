use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{context}: {source}")]
    Invalid {
        context: &'static str,
        source: qgraph_core::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read `{}`: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write `{}`: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("computation failed: {0}")]
    Compute(qgraph_core::Error),
}

impl CliError {
    pub fn schema(path: String, message: String) -> Self {
        let path = if path.is_empty() || path == "." { "document".into() } else { path };
        CliError::Schema { path, message }
    }

    pub fn invalid(context: &'static str, source: qgraph_core::Error) -> Self {
        CliError::Invalid { context, source }
    }

    /// Numerical breakdowns count as check failures; everything about the
    /// shape of the request is an input error.
    pub fn from_core(e: qgraph_core::Error) -> Self {
        use qgraph_core::Error as E;
        match e {
            E::Pole { .. }
            | E::WindingUnstable { .. }
            | E::EigenpairResidual { .. }
            | E::ClosureTau { .. }
            | E::SchurFailed
            | E::Singular => CliError::Compute(e),
            _ => CliError::invalid("input", e),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(_) => EXIT_CHECK_FAILED,
            _ => EXIT_INPUT,
        }
    }
}
