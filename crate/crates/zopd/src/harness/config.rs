//! Experiment configuration: a single TOML file describing the instance,
//! the solvers to compare, the seeds, and the output location.
//!
//! Documented keys (see `configs/pca_benchmark.toml` for a complete file):
//!
//! ```text
//! iterations        outer iterations R, shared by all solvers
//! seeds             master seeds; one run per (solver, seed)
//! output            results directory
//! [instance]        kind = "pca" plus the generator parameters and its seed
//! [[solver]]        kind = "pzo-pda" | "rgf" | "zo-sgd" with per-kind keys;
//!                   mu defaults to 1/sqrt(R), samples to R (1 for rgf)
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineParams;
use crate::error::{Error, Result};
use crate::pca::{self, PcaConfig, PcaInstance};
use crate::solver::{validate_params, ParamViolation, ScalingMode, SolverParams};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub iterations: usize,
    pub seeds: Vec<u64>,
    pub output: PathBuf,
    /// `"basic"` (default) or `"full"`; the CLI flag overrides this.
    #[serde(default)]
    pub diagnostics: Option<String>,
    pub instance: InstanceSpec,
    #[serde(rename = "solver")]
    pub solvers: Vec<SolverSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub kind: String,
    pub seed: u64,
    #[serde(flatten)]
    pub pca: PcaConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub kind: String,
    /// Label used in file names and plots; defaults to `kind`.
    pub name: Option<String>,
    pub rho: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    /// Smoothing radius; defaults to `1/sqrt(iterations)`.
    pub mu: Option<f64>,
    /// Oracle-call pairs per iteration; defaults to `iterations`
    /// (`1` for rgf).
    pub samples: Option<usize>,
    /// `"closed-form"` (default) or `"identity-complement"`.
    pub scaling: Option<String>,
    /// Run even if the parameter conditions are violated.
    #[serde(default)]
    pub force: bool,
    /// Optional quadratic-penalty wrapper for the baselines.
    pub penalty_rho: Option<f64>,
}

/// A solver spec resolved against the experiment's iteration count.
#[derive(Debug, Clone)]
pub enum ResolvedSolver {
    PzoPda {
        name: String,
        params: SolverParams,
        force: bool,
    },
    Baseline {
        name: String,
        params: BaselineParams,
    },
}

impl ResolvedSolver {
    pub fn name(&self) -> &str {
        match self {
            ResolvedSolver::PzoPda { name, .. } => name,
            ResolvedSolver::Baseline { name, .. } => name,
        }
    }
}

impl SolverSpec {
    pub fn resolve(&self, iterations: usize) -> Result<ResolvedSolver> {
        let default_mu = 1.0 / (iterations.max(1) as f64).sqrt();
        let mu = self.mu.unwrap_or(default_mu);
        let name = self.name.clone().unwrap_or_else(|| self.kind.clone());
        match self.kind.as_str() {
            "pzo-pda" => {
                let rho = self
                    .rho
                    .ok_or_else(|| Error::Config(format!("solver `{name}` needs rho")))?;
                let gamma = self
                    .gamma
                    .ok_or_else(|| Error::Config(format!("solver `{name}` needs gamma")))?;
                let beta = self
                    .beta
                    .ok_or_else(|| Error::Config(format!("solver `{name}` needs beta")))?;
                let scaling = match self.scaling.as_deref() {
                    None | Some("closed-form") => ScalingMode::ClosedForm,
                    Some("identity-complement") => ScalingMode::IdentityComplement,
                    Some(other) => {
                        return Err(Error::Config(format!("unknown scaling mode `{other}`")))
                    }
                };
                let params = SolverParams::new(
                    rho,
                    gamma,
                    beta,
                    mu,
                    self.samples.unwrap_or(iterations.max(1)),
                    iterations,
                    scaling,
                )?;
                Ok(ResolvedSolver::PzoPda {
                    name,
                    params,
                    force: self.force,
                })
            }
            "rgf" => {
                let mut params = BaselineParams::rgf(mu, iterations);
                if let Some(s) = self.samples {
                    params.samples = s;
                }
                params.penalty_rho = self.penalty_rho;
                params.validate()?;
                Ok(ResolvedSolver::Baseline { name, params })
            }
            "zo-sgd" => {
                let mut params = BaselineParams::zo_sgd(
                    mu,
                    self.samples.unwrap_or(iterations.max(1)),
                    iterations,
                );
                params.penalty_rho = self.penalty_rho;
                params.validate()?;
                Ok(ResolvedSolver::Baseline { name, params })
            }
            other => Err(Error::Config(format!("unknown solver kind `{other}`"))),
        }
    }
}

/// Outcome of validating a config: structural problems plus, per solver, the
/// violated convergence conditions.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub structural: Vec<String>,
    pub solver_violations: Vec<(String, Vec<ParamViolation>)>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.structural.is_empty() && self.solver_violations.iter().all(|(_, v)| v.is_empty())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.structural {
            out.push_str(&format!("config error: {s}\n"));
        }
        for (name, violations) in &self.solver_violations {
            if violations.is_empty() {
                out.push_str(&format!("solver `{name}`: all parameter conditions hold\n"));
            } else {
                for v in violations {
                    out.push_str(&format!("solver `{name}`: violated {v}\n"));
                }
            }
        }
        out
    }
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{e}")))
    }

    pub fn diagnostics_level(&self) -> Result<crate::diagnostics::DiagnosticsLevel> {
        match self.diagnostics.as_deref() {
            None | Some("basic") => Ok(crate::diagnostics::DiagnosticsLevel::Basic),
            Some("full") => Ok(crate::diagnostics::DiagnosticsLevel::Full),
            Some(other) => Err(Error::Config(format!(
                "unknown diagnostics level `{other}`"
            ))),
        }
    }

    /// Structural checks that must pass before anything runs.
    pub fn check_structure(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if let Err(e) = self.diagnostics_level() {
            problems.push(e.to_string());
        }
        if self.solvers.is_empty() {
            problems.push("at least one solver is required".into());
        }
        if self.seeds.is_empty() {
            problems.push("seeds must be nonempty".into());
        }
        if self.iterations == 0 {
            problems.push("iterations must be at least 1".into());
        }
        if self.instance.kind != "pca" {
            problems.push(format!("unknown instance kind `{}`", self.instance.kind));
        }
        let mut names = std::collections::HashSet::new();
        for s in &self.solvers {
            let name = s.name.clone().unwrap_or_else(|| s.kind.clone());
            if !names.insert(name.clone()) {
                problems.push(format!("duplicate solver name `{name}`"));
            }
            if let Err(e) = s.resolve(self.iterations.max(1)) {
                problems.push(e.to_string());
            }
        }
        problems
    }

    pub fn build_instance(&self) -> Result<PcaInstance> {
        pca::generate_instance(&self.instance.pca, self.instance.seed)
    }

    /// Full validation: structure plus the per-solver parameter conditions
    /// evaluated against the generated instance's smoothness constant.
    pub fn validate(&self) -> Result<ValidationReport> {
        let mut report = ValidationReport {
            structural: self.check_structure(),
            solver_violations: Vec::new(),
        };
        if !report.structural.is_empty() {
            return Ok(report);
        }
        let instance = self.build_instance()?;
        let l = instance.smoothness();
        for spec in &self.solvers {
            let resolved = spec.resolve(self.iterations)?;
            match &resolved {
                ResolvedSolver::PzoPda { name, params, .. } => {
                    report
                        .solver_violations
                        .push((name.clone(), validate_params(params, l)));
                }
                ResolvedSolver::Baseline { name, .. } => {
                    report.solver_violations.push((name.clone(), Vec::new()));
                }
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::BaselineVariant;

    const SMALL: &str = r#"
iterations = 2
seeds = [1]
output = "out"

[instance]
kind = "pca"
seed = 3
n_agents = 3
n_edges = 2
dim = 2
batch = 4
l1_weight = 1e-4
noise_sd = 0.01

[[solver]]
kind = "pzo-pda"
rho = 10.0
gamma = 0.09
beta = 10.0
force = true
"#;

    #[test]
    fn parses_and_resolves() {
        let config: ExperimentConfig = toml::from_str(SMALL).unwrap();
        assert!(config.check_structure().is_empty());
        let resolved = config.solvers[0].resolve(config.iterations).unwrap();
        match resolved {
            ResolvedSolver::PzoPda { params, force, .. } => {
                assert_eq!(params.samples, 2);
                assert!((params.mu - 1.0 / 2.0f64.sqrt()).abs() < 1e-15);
                assert!(force);
            }
            _ => panic!("wrong resolution"),
        }
    }

    #[test]
    fn empty_solver_list_is_flagged() {
        let mut config: ExperimentConfig = toml::from_str(SMALL).unwrap();
        config.solvers.clear();
        assert!(config
            .check_structure()
            .iter()
            .any(|p| p.contains("at least one solver")));
    }

    #[test]
    fn broken_beta_names_the_condition() {
        let mut config: ExperimentConfig = toml::from_str(SMALL).unwrap();
        config.solvers[0].beta = Some(1e-8);
        let report = config.validate().unwrap();
        let (_, violations) = &report.solver_violations[0];
        assert!(violations.iter().any(|v| v.condition == "beta_margin"));
    }

    #[test]
    fn baseline_defaults() {
        let spec = SolverSpec {
            kind: "rgf".into(),
            name: None,
            rho: None,
            gamma: None,
            beta: None,
            mu: None,
            samples: None,
            scaling: None,
            force: false,
            penalty_rho: None,
        };
        match spec.resolve(100).unwrap() {
            ResolvedSolver::Baseline { params, .. } => {
                assert_eq!(params.samples, 1);
                assert_eq!(params.variant, BaselineVariant::Rgf);
                assert!((params.mu - 0.1).abs() < 1e-15);
            }
            _ => panic!(),
        }
    }
}
