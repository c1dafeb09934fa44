//! Experiment orchestration: configuration, training and greedy evaluation
//! runs, paired comparisons, and CSV/JSON artifacts.

pub mod artifacts;
mod compare;
mod config;
mod experiment;

pub use compare::{compare_runs, sign_test, Comparison};
pub use config::{AgentKind, ExperimentConfig};
pub use experiment::{
    evaluate, run_experiment, train, AgentSnapshot, EvalPath, Metrics, PnlStats, RunMetadata,
    RunSummary, TrainedAgent, SNAPSHOT_VERSION, SUMMARY_VERSION,
};
