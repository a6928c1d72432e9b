//! Config-driven experiment runner: builds benchmark instances, runs the
//! solvers across seeds in a worker pool, writes one CSV per run plus a
//! median/IQR aggregate and a manifest, and renders comparison plots.

mod aggregate;
mod config;
mod plot;
mod runner;

pub use aggregate::{aggregate_runs, quantile, read_aggregate_csv, read_run_csv, AggregateRow};
pub use config::{ExperimentConfig, InstanceSpec, ResolvedSolver, SolverSpec, ValidationReport};
pub use plot::plot_results;
pub use runner::{run_experiment, ExperimentSummary, RunRecord, RunnerOptions};
