//! File formats, reports, the parallel simulation driver and the pieces
//! of the `scoresphere` command-line tool.

pub mod analysis;
pub mod error;
pub mod ingest;
pub mod parallel;
pub mod report;
pub mod scenarios;
pub mod verify;

pub use error::CliError;
