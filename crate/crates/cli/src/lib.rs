//! Workspace files, reports and property suites behind the `hocolim`
//! command-line tool.

pub mod commands;
pub mod fixtures;
pub mod report;
pub mod suites;
pub mod workspace;

pub use commands::{CliError, Mode};
pub use report::{Check, Report};
pub use workspace::{InputError, Workspace};
