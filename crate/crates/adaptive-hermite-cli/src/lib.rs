//! Configuration, tensor cache handling and report output behind the
//! `ahsolve` binary.

pub mod commands;
pub mod config;
pub mod error;

pub use config::RunConfig;
pub use error::CliError;
