//! Batch runner for the homstab experiments: commands, caching, output
//! formats and the acceptance criteria.

pub mod cache;
pub mod commands;
pub mod oracles;
pub mod output;
pub mod result;
pub mod verify;

pub use commands::{CliError, Command, Runner};
pub use output::Format;
pub use result::{ExperimentResult, Record, Status, Value};
pub use verify::Scale;
