//! Configuration, artifact formats and the command surface of `rt`.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{exit_code, run_command, Command};
pub use config::RunConfig;
