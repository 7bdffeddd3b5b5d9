//! Command-line front end for the `runlab` engine.

pub mod analyze;
pub mod app;
pub mod fasta;
pub mod pmf;
pub mod report;
pub mod simulate;
pub mod verify;

pub use app::{run, AppError, Cli};
