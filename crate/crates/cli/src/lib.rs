//! Configuration parsing, command dispatch and reports for the `qgraph`
//! command-line tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{run_command, Command, Report};
pub use config::{parse_config, RunConfig};
pub use error::CliError;
pub use report::{emit_report, Format};
