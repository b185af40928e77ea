//! Front end for the conormal engine: variety specs, run configuration,
//! JSON reports, the on-disk piece cache and the named catalog suites.

pub mod cache;
pub mod commands;
pub mod config;
pub mod grammar;
pub mod report;
pub mod suites;

use thiserror::Error;

use conormal_core::conormal::ConormalError;
use conormal_core::deform::DeformError;
use conormal_core::exactalg::AlgError;
use conormal_core::varieties::VarietyError;

pub use cache::DiskCache;
pub use config::{RunConfig, Session};
pub use grammar::parse_variety;
pub use report::{Record, Report, SCHEMA_VERSION};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const INCONCLUSIVE: i32 = 2;
    pub const NO_LIFT: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad variety spec: {0}")]
    Spec(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Conormal(#[from] ConormalError),
    #[error(transparent)]
    Deform(#[from] DeformError),
    #[error(transparent)]
    Alg(#[from] AlgError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
