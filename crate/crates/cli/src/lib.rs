//! Experiment runner: JSON configs in, CSV sweeps out, plus the acceptance
//! suite behind `darkjump verify`.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod output;

pub use commands::{analytic_rows, cmd_analytic, cmd_ensemble, EnsembleOutput};
pub use config::{ConfigError, ExperimentConfig};
pub use output::SweepRow;
