//! Experiment runner: configuration, run farm, output files and timing.

pub mod config;
pub mod emit;
pub mod farm;
pub mod timing;

pub use config::{
    checkpoint_nfes, default_checkpoint_fractions, AlgorithmSpec, ExperimentConfig, PRESETS,
};
pub use emit::{
    compare, read_json, read_runs_csv, read_summary_csv, write_all, write_comparison_csv,
    write_friedman_csv, write_json, write_runs_csv, write_summary_csv, Comparison, ComparisonRow,
    CsvRecord, ExperimentDocument, FriedmanTable,
};
pub use farm::{run_experiment, summarize, workers_from_env, ExperimentResult, SummaryRow, WORKERS_ENV};
pub use timing::{timing_protocol, TimingReport};
