//! Front end for `ncinterp`: tuple files, reports, and the `compute`,
//! `verify` and `gen` commands.

pub mod commands;
pub mod report;
pub mod tuple_file;

pub use commands::{generate, run_compute, run_verify, ComputeArgs, Method, Suite, VerifyArgs};
pub use report::{Check, Instance, Report, Trial};
pub use tuple_file::{load_tuple, save_tuple, tuple_json, TupleFile};

use ncinterp_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Numeric(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Regime { .. } | Error::OutOfRange(_) | Error::InvalidExponent(_) => Self::Usage(e.to_string()),
            Error::Shape(_) | Error::NonFinite => Self::Input(e.to_string()),
            _ => Self::Numeric(e),
        }
    }
}

impl CliError {
    /// 1 for numerical failures, 2 for everything the caller got wrong.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Numeric(_) => 1,
            _ => 2,
        }
    }
}

/// Worker count from `NCINTERP_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("NCINTERP_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => Err(CliError::Usage(format!(
                "NCINTERP_THREADS = `{v}` is not a positive integer"
            ))),
            Ok(n) => Ok(Some(n)),
        },
        Err(_) => Ok(None),
    }
}
