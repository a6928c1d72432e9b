//! `zopd` command line: runs configured experiments, validates solver
//! parameters, renders plots, and self-tests the composite prox against the
//! brute-force oracle.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zopd::diagnostics::DiagnosticsLevel;
use zopd::harness::{self, ExperimentConfig, RunnerOptions};
use zopd::pca;
use zopd::problem::{composite_prox_bruteforce, FeasibleSet, NonsmoothTerm};

#[derive(Parser)]
#[command(
    name = "zopd",
    version,
    about = "Zeroth-order primal-dual optimization harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DiagLevel {
    Basic,
    Full,
}

impl From<DiagLevel> for DiagnosticsLevel {
    fn from(v: DiagLevel) -> Self {
        match v {
            DiagLevel::Basic => DiagnosticsLevel::Basic,
            DiagLevel::Full => DiagnosticsLevel::Full,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every (solver, seed) pair of a config and write the results bundle.
    Run {
        config: PathBuf,
        /// Added to each configured seed.
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
        /// Proceed despite parameter-condition violations.
        #[arg(long)]
        force: bool,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Overrides the config's diagnostics level.
        #[arg(long, value_enum)]
        diagnostics: Option<DiagLevel>,
    },
    /// Check a config: structure plus each solver's convergence conditions.
    Validate {
        config: PathBuf,
        /// Exit zero even when conditions are violated.
        #[arg(long)]
        force: bool,
    },
    /// Render SVG comparison plots from a results directory.
    Plot { results_dir: PathBuf },
    /// Validate the closed-form composite prox against the brute-force
    /// oracle on random instances.
    ProxSelftest {
        #[arg(long, default_value_t = 500)]
        cases: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> zopd::error::Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            seed_offset,
            force,
            jobs,
            diagnostics,
        } => {
            let config = ExperimentConfig::from_toml_file(&config)?;
            let report = config.validate()?;
            if !report.is_clean() {
                eprint!("{}", report.render());
                if !force && !config.solvers.iter().all(|s| s.force) {
                    let blocking: Vec<&str> = report
                        .solver_violations
                        .iter()
                        .zip(&config.solvers)
                        .filter(|((_, v), s)| !v.is_empty() && !s.force)
                        .map(|((n, _), _)| n.as_str())
                        .collect();
                    if !blocking.is_empty() || !report.structural.is_empty() {
                        eprintln!(
                            "refusing to run (pass --force or set force=true per solver): {}",
                            blocking.join(", ")
                        );
                        return Ok(ExitCode::FAILURE);
                    }
                }
            }
            let summary = harness::run_experiment(
                &config,
                &RunnerOptions {
                    jobs,
                    seed_offset,
                    force,
                    diagnostics: diagnostics.map(Into::into),
                },
            )?;
            println!(
                "wrote {} runs to {} ({} failed); aggregate: {}",
                summary.runs.len(),
                summary.output.display(),
                summary.failures,
                summary.aggregate_file.display()
            );
            Ok(if summary.failures == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Validate { config, force } => {
            let config = ExperimentConfig::from_toml_file(&config)?;
            let report = config.validate()?;
            print!("{}", report.render());
            if report.is_clean() {
                println!("config is valid");
                Ok(ExitCode::SUCCESS)
            } else if force {
                println!("violations present (ignored via --force)");
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Plot { results_dir } => {
            let files = harness::plot_results(&results_dir)?;
            if files.is_empty() {
                println!("no solver data found; nothing plotted");
            } else {
                for f in files {
                    println!("wrote {}", f.display());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ProxSelftest { cases, seed } => {
            let worst = prox_selftest(cases, seed)?;
            println!("prox selftest: {cases} cases, max deviation {worst:.3e}");
            Ok(if worst <= 1e-6 {
                ExitCode::SUCCESS
            } else {
                eprintln!("deviation exceeds 1e-6");
                ExitCode::FAILURE
            })
        }
    }
}

/// Compares shrink-then-project against the brute-force prox on random
/// (weight, scale, point) triples in dimensions 1–4, for both the plain and
/// the nonnegative ball; returns the worst componentwise deviation.
fn prox_selftest(cases: usize, seed: u64) -> zopd::error::Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let dim = 1 + (rng.random::<u64>() % 4) as usize;
        let weight = 2.0 * rng.random::<f64>();
        let scale = 0.1 + 4.9 * rng.random::<f64>();
        let v = Array1::from_shape_fn(dim, |_| 6.0 * rng.random::<f64>() - 3.0);
        let nonneg = case % 5 == 4;
        let set = FeasibleSet::BlockBalls {
            blocks: 1,
            block_dim: dim,
            radius: 1.0,
            nonneg,
        };
        let h = NonsmoothTerm::L1 { weight };
        let fast = if nonneg {
            set.composite_prox(scale, &v.view(), &h)?
        } else {
            pca::composite_prox_l1_ball(weight, scale, &v.view())
        };
        let slow = composite_prox_bruteforce(&h, &set, scale, &v.view(), 500_000)?;
        let dev = (&fast - &slow)
            .mapv(f64::abs)
            .iter()
            .cloned()
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    Ok(worst)
}
