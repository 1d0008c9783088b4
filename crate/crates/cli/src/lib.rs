//! Library half of the batch front end: config parsing, job dispatch, and
//! the artifact schema. The binary in `main.rs` is a thin wrapper, so
//! integration tests can drive jobs and inspect artifacts directly.

pub mod artifact;
pub mod config;
pub mod jobs;

/// CLI-level failure, mapped to the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: config, parameters, or filesystem trouble. Exit 2.
    Validation(String),
    /// Library failure; internal inconsistencies exit 3, the rest 2.
    Lib(cotorlab::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Lib(e) if e.is_internal() => 3,
            CliError::Lib(_) => 2,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Validation(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

impl From<cotorlab::Error> for CliError {
    fn from(e: cotorlab::Error) -> Self {
        CliError::Lib(e)
    }
}
