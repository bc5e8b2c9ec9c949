//! Experiment engine and file formats behind the `sfr` command line tool.

pub mod experiment;
pub mod io;
pub mod selftest;
pub mod spec;

pub use experiment::{
    run_experiment, run_experiment_with_threads, run_trial, summarize, trials_csv,
    write_trials_csv, PreparedTarget, SummaryRow, TrialOutcome, TrialRecord,
};
pub use io::{export_profile, export_result, load_profile, load_trm_file, write_trm_file};
pub use spec::{ExperimentSpec, TargetSpec};
