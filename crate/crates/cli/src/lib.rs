//! Configuration, market-data loading and the command pipeline behind the
//! `illiquid` binary.

pub mod commands;
pub mod config;
pub mod market;

use thiserror::Error;

pub use commands::{bootstrap, figures, price, verify, Format, VerifyOptions, VerifyRow};
pub use config::{parse_ttl, RunConfig, Ttl};
pub use market::{load_market, IssuerSet, Market};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Calibration(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<illiquid_core::TermStructureError> for CliError {
    fn from(e: illiquid_core::TermStructureError) -> Self {
        match e {
            illiquid_core::TermStructureError::Calibration { .. } => CliError::Calibration(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<illiquid_core::EngineError> for CliError {
    fn from(e: illiquid_core::EngineError) -> Self {
        match e {
            illiquid_core::EngineError::TermStructure(t) => t.into(),
            other => CliError::Calibration(other.to_string()),
        }
    }
}

impl From<illiquid_mc::McError> for CliError {
    fn from(e: illiquid_mc::McError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl CliError {
    /// Prefixes the message with the instrument it concerns.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{what}: {m}")),
            CliError::Calibration(m) => CliError::Calibration(format!("{what}: {m}")),
            CliError::Verification(m) => CliError::Verification(format!("{what}: {m}")),
        }
    }
}
