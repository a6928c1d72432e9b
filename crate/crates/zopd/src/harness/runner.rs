//! Executes a configured experiment: one run per (solver, seed) in a rayon
//! worker pool, streaming each run's metric rows to its own CSV, then
//! aggregating and writing a manifest.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use super::aggregate::{aggregate_runs, read_run_csv, AGGREGATE_HEADER};
use super::config::{ExperimentConfig, ResolvedSolver};
use crate::baselines;
use crate::diagnostics::{DiagnosticsLevel, MetricRow};
use crate::error::{Error, Result};
use crate::solver::{self, RunOptions};

#[derive(Debug, Clone, Default)]
pub struct RunnerOptions {
    /// Worker threads; 0 uses the number of available cores.
    pub jobs: usize,
    /// Added to every configured seed.
    pub seed_offset: u64,
    /// Force all solvers past parameter-condition violations.
    pub force: bool,
    /// Overrides the config's diagnostics level when set.
    pub diagnostics: Option<DiagnosticsLevel>,
}

/// Outcome of one (solver, seed) run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub solver: String,
    pub seed: u64,
    pub csv: PathBuf,
    pub oracle_calls: u64,
    pub sampled_index: usize,
    pub status: String,
}

#[derive(Debug, Serialize)]
pub struct ExperimentSummary {
    pub output: PathBuf,
    pub instance_file: PathBuf,
    pub aggregate_file: PathBuf,
    pub manifest_file: PathBuf,
    pub runs: Vec<RunRecord>,
    pub failures: usize,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(MetricRow::CSV_HEADER)?;
    Ok(w)
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Runs every (solver, seed) pair of the config and writes the results
/// bundle under `config.output`. Individual run failures are recorded in the
/// manifest (and reflected in `failures`) while the remaining runs proceed.
pub fn run_experiment(
    config: &ExperimentConfig,
    opts: &RunnerOptions,
) -> Result<ExperimentSummary> {
    let structural = config.check_structure();
    if !structural.is_empty() {
        return Err(Error::Config(structural.join("; ")));
    }

    let diagnostics = match opts.diagnostics {
        Some(level) => level,
        None => config.diagnostics_level()?,
    };
    let out_dir = &config.output;
    let runs_dir = out_dir.join("runs");
    std::fs::create_dir_all(&runs_dir)?;

    let instance = config.build_instance()?;
    let instance_file = out_dir.join("instance.json");
    instance.save_json(&instance_file)?;

    let resolved: Vec<ResolvedSolver> = config
        .solvers
        .iter()
        .map(|s| s.resolve(config.iterations))
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, u64)> = (0..resolved.len())
        .flat_map(|si| config.seeds.iter().map(move |&seed| (si, seed)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(if opts.jobs == 0 { 0 } else { opts.jobs })
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    let records: Mutex<Vec<RunRecord>> = Mutex::new(Vec::new());
    let problem = &instance.problem;

    pool.install(|| {
        tasks.par_iter().for_each(|&(si, seed)| {
            let solver_def = &resolved[si];
            let name = solver_def.name().to_string();
            let master_seed = seed.wrapping_add(opts.seed_offset);
            let path = runs_dir.join(format!("{}_seed{}.csv", sanitize(&name), master_seed));

            let record = (|| -> Result<RunRecord> {
                let mut writer = csv_writer(&path)?;
                let mut write_row = |row: &MetricRow| {
                    // Serialization failures surface at flush time.
                    let _ = writer.write_record(row.csv_record());
                };
                let outcome = match solver_def {
                    ResolvedSolver::PzoPda { params, force, .. } => solver::run(
                        problem,
                        params,
                        master_seed,
                        &RunOptions {
                            force: *force || opts.force,
                            diagnostics,
                        },
                        &mut write_row,
                    ),
                    ResolvedSolver::Baseline { params, .. } => baselines::run_baseline(
                        problem,
                        params,
                        master_seed,
                        diagnostics,
                        &mut write_row,
                    ),
                };
                writer.flush()?;
                match outcome {
                    Ok(out) => Ok(RunRecord {
                        solver: name.clone(),
                        seed: master_seed,
                        csv: path.clone(),
                        oracle_calls: out.total_oracle_calls,
                        sampled_index: out.sampled_index,
                        status: "ok".into(),
                    }),
                    Err(failure) => Ok(RunRecord {
                        solver: name.clone(),
                        seed: master_seed,
                        csv: path.clone(),
                        oracle_calls: failure.partial.total_oracle_calls,
                        sampled_index: failure.partial.sampled_index,
                        status: format!("failed: {}", failure.error),
                    }),
                }
            })();

            let record = record.unwrap_or_else(|e| RunRecord {
                solver: name,
                seed: master_seed,
                csv: path,
                oracle_calls: 0,
                sampled_index: 0,
                status: format!("failed: {e}"),
            });
            records.lock().unwrap().push(record);
        });
    });

    let mut runs = records.into_inner().unwrap();
    // Deterministic manifest order regardless of scheduling.
    runs.sort_by(|a, b| (&a.solver, a.seed).cmp(&(&b.solver, b.seed)));
    let failures = runs.iter().filter(|r| r.status != "ok").count();

    // Aggregate the successful runs per solver, in config order.
    let aggregate_file = out_dir.join("aggregate.csv");
    {
        let mut writer = csv::Writer::from_path(&aggregate_file)?;
        writer.write_record(AGGREGATE_HEADER)?;
        for solver_def in &resolved {
            let name = solver_def.name();
            let replicates: Vec<_> = runs
                .iter()
                .filter(|r| r.solver == name && r.status == "ok")
                .map(|r| read_run_csv(&r.csv))
                .collect::<Result<_>>()?;
            if replicates.is_empty() {
                continue;
            }
            for row in aggregate_runs(name, &replicates) {
                writer.write_record([
                    row.solver.clone(),
                    row.iteration.to_string(),
                    row.psi_median.to_string(),
                    row.psi_q25.to_string(),
                    row.psi_q75.to_string(),
                    row.cv_median.to_string(),
                    row.cv_q25.to_string(),
                    row.cv_q75.to_string(),
                ])?;
            }
        }
        writer.flush()?;
    }

    let manifest_file = out_dir.join("manifest.json");
    let manifest = Manifest {
        config: config.clone(),
        build: BuildInfo::current(),
        instance_file: instance_file.clone(),
        instance_smoothness: instance.smoothness(),
        instance_gradient_bound: instance.gradient_bound(),
        total_oracle_calls: runs.iter().map(|r| r.oracle_calls).sum(),
        runs: runs.clone(),
        failures,
    };
    std::fs::write(&manifest_file, serde_json::to_string_pretty(&manifest)?)?;

    Ok(ExperimentSummary {
        output: out_dir.clone(),
        instance_file,
        aggregate_file,
        manifest_file,
        runs,
        failures,
    })
}

#[derive(Debug, Serialize)]
struct Manifest {
    config: ExperimentConfig,
    build: BuildInfo,
    instance_file: PathBuf,
    instance_smoothness: f64,
    instance_gradient_bound: f64,
    total_oracle_calls: u64,
    runs: Vec<RunRecord>,
    failures: usize,
}

#[derive(Debug, Serialize)]
struct BuildInfo {
    version: String,
    describe: String,
}

impl BuildInfo {
    fn current() -> Self {
        let describe = std::process::Command::new("git")
            .args(["describe", "--always", "--dirty"])
            .output()
            .ok()
            .filter(|o| o.status.success())
            .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
            .unwrap_or_else(|| "unknown".into());
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            describe,
        }
    }
}
