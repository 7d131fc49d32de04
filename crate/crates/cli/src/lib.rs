//! Library side of the `anosovlab` command-line tool.

pub mod bundle;
pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use error::{CliError, CliResult};
