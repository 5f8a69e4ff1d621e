//! Seeded experiment harness around the `firing-graph` library.
//!
//! [`run`] executes one resolved [`ExperimentConfig`]: repetitions run in
//! parallel and their files are written in repetition order, so two runs with
//! the same configuration produce byte-identical outputs.

pub mod config;
pub mod experiments;
pub mod output;
pub mod props;
pub mod stats;

use std::path::PathBuf;

pub use config::{Experiment, ExperimentConfig, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] firing_graph::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("experiment cannot run: {0}")]
    Infeasible(String),
}

/// Files written by a run, the summary text and the number of failed checks.
#[derive(Debug, Default)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub failures: usize,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    match cfg.experiment {
        Experiment::SpnSingle => experiments::spn_single(cfg),
        Experiment::SpnEstimator => experiments::spn_estimator(cfg),
        Experiment::SpnJoint => experiments::spn_joint(cfg),
        Experiment::SparseSingle => experiments::sparse_single(cfg),
        Experiment::SparseDelta => experiments::sparse_delta(cfg),
        Experiment::CheckProps => experiments::check_props(cfg),
    }
}
