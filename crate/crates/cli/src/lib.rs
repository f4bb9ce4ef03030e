//! Command-line driver, result files and threaded assembly for `npspec-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod parallel;
pub mod report;
pub mod shape_file;

pub use commands::run;
pub use config::{Args, Command, Format, RunConfig};
pub use error::{CliError, CliResult, EXIT_CONFIG, EXIT_NUMERICAL};
pub use parallel::ParallelAssembler;
pub use report::Report;
pub use shape_file::{load_shape, ShapeFile, ShapeTerm};
