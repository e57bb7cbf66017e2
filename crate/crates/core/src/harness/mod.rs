//! Experiment runner: configs, single trials and CSV sweeps.

pub mod config;
pub mod sweep;
pub mod trial;

pub use config::{CleanupConfig, ExperimentConfig, ModelSpec, Parameterization};
pub use sweep::{resolve_parallelism, run_sweep, write_csv, write_summary, SweepRow};
pub use trial::{run_trial, run_trial_captured, subspace_error, TrialArtifacts, TrialReport};
