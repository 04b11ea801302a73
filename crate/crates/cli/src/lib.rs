//! File formats, reports and the command-line surface for `subtori-core`.

pub mod commands;
pub mod corpus;
pub mod error;
pub mod format;
pub mod report;

pub use commands::{run_command, Outcome};
pub use error::{CliError, Kind};
