//! Front end for `unbias-core`: CSV ingestion, report rendering, the seeded
//! Monte Carlo harness and the `unbias` command-line tool.

pub mod bench;
pub mod cli;
pub mod error;
pub mod io;
pub mod report;

pub use error::CliError;
