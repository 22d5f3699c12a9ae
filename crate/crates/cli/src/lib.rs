//! Library half of the `elr` command-line tool.
//!
//! `elr <command> --input <json|path>` runs one of `bounds`, `divergence`,
//! `zipf`, `means` or `verify` and writes a JSON [`report::Report`]. Floats
//! are written with 17 significant digits so equal inputs give byte-identical
//! reports. Exit status: 0 ok, 1 input error, 2 an inequality failed.

#![forbid(unsafe_code)]

pub mod error;
pub mod fuzz;
pub mod input;
pub mod num;
pub mod registry;
pub mod report;
pub mod run;

pub use error::CliError;
pub use report::{Report, Status};
pub use run::{run, Command, RunConfig};
