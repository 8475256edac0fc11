//! Experiment files, figure presets, sweeps and CSV output behind the
//! `nfcrb` binary.

pub mod config;
pub mod csv;
pub mod presets;
pub mod run;

use crate::error::Error;

pub use config::{ExperimentConfig, RawConfig};
pub use csv::{read_csv, write_csv, CsvTable, ResultRow};
pub use presets::{preset, preset_names, preset_text, presets};
pub use run::{evaluate_method, header_comments, run_experiment};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Runs a config and renders the CSV text.
pub fn render(cfg: &ExperimentConfig, name: Option<&str>, db: bool) -> crate::Result<String> {
    let rows = run_experiment(cfg)?;
    Ok(write_csv(&header_comments(cfg, name, db), &rows, cfg.monte_carlo.is_some(), db))
}
