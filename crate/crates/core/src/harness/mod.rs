//! Configuration, sweep orchestration and row emission.

pub mod config;
pub mod rows;
pub mod suites;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{BoxSpec, ExperimentConfig, OutputFormat, OutputSpec, Resolutions};
pub use rows::{emit, from_csv, from_json, render, to_csv, to_json, Quantity, ResultRow, RowContext, CSV_HEADER};
pub use suites::{
    run_bestapprox, run_johnen, run_kfunc, run_lemma21, run_modulus, run_suite, run_taylor,
    run_whitney, t_sweep, Suite, SuiteOutput,
};

#[derive(Error, Debug)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
