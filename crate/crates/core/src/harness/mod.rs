//! Grid harness: configuration, execution, result persistence and tables.

pub mod config;
pub mod results;
pub mod run;
pub mod tables;

pub use config::RunConfig;
pub use results::{read_results, read_results_file, write_results, write_results_file, CellStatus, ResultRow};
pub use run::{derive_seed, evaluate_grid, evaluate_grid_simple, run_grid, GridOutcome, RunArtifacts, Timing};
pub use tables::{emit_full, emit_summary, Table};
