//! File formats, benchmark orchestration, plots and the command-line front end for
//! `fraudbench-core`.

pub mod bench;
pub mod config;
pub mod csvio;
pub mod error;
pub mod persist;
pub mod plots;
pub mod report;

pub use bench::{run_benchmark, run_on, write_outputs, RunOptions};
pub use config::{BenchmarkConfig, DatasetSource, ModelEntry, SyntheticSpec};
pub use csvio::{load_csv, write_csv, Schema};
pub use error::{Error, Result};
pub use persist::{load_model, save_model, SavedModel};
pub use report::BenchmarkReport;
