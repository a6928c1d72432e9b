//! PZO-PDA: the proximal zeroth-order primal-dual solver.
//!
//! Each iteration builds a batched zeroth-order gradient surrogate at the
//! current point, minimizes a strongly convex proximal subproblem over the
//! feasible set (one prox when the scaling matrix is chosen to diagonalize
//! the quadratic, otherwise an accelerated inner loop), and then performs a
//! perturbed dual ascent `λ⁺ = (1−ργ)λ + ρ(Ax⁺ − b)`. The `(1−ργ)` shrinkage
//! keeps the dual sequence bounded and is what the parameter conditions in
//! [`validate_params`] protect.

use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{self, DiagnosticsLevel, MetricRow};
use crate::error::{Error, Result};
use crate::estimator::{self, derive_seed, GradientEstimate, SmoothingConfig};
use crate::linalg;
use crate::problem::{LinearConstraint, ProblemInstance};

/// RNG stream tags used to derive independent per-purpose seeds from one
/// master seed.
pub const STREAM_ESTIMATION: u64 = 1;
pub const STREAM_OUTPUT_SAMPLE: u64 = 2;

/// How the scaling Gram `BᵀB` of the proximal term is chosen.
///
/// The solver only ever uses `B` through `BᵀB`, so the Gram is what is built
/// and stored.
#[derive(Debug, Clone)]
pub enum ScalingMode {
    /// `BᵀB = (η/β) I − (ρ/β) AᵀA` with `η = ρ σ_max(AᵀA) + β`, so that
    /// `ρAᵀA + βBᵀB = ηI` and the primal update collapses to one prox.
    ClosedForm,
    /// `BᵀB = c I − AᵀA` with `c = max(1, σ_max(AᵀA))`.
    IdentityComplement,
    /// Caller-supplied Gram, checked positive semidefinite and
    /// `AᵀA + BᵀB ⪰ I`.
    ExplicitGram(Array2<f64>),
}

/// Solver parameters. `rho` is the penalty, `gamma` the dual perturbation
/// (`ργ < 1`), `beta` the proximal weight, `mu`/`samples` the smoothing
/// configuration, and `iterations` the outer iteration count `R`.
#[derive(Debug, Clone)]
pub struct SolverParams {
    pub rho: f64,
    pub gamma: f64,
    pub beta: f64,
    pub mu: f64,
    pub samples: usize,
    pub iterations: usize,
    pub scaling: ScalingMode,
}

impl SolverParams {
    pub fn new(
        rho: f64,
        gamma: f64,
        beta: f64,
        mu: f64,
        samples: usize,
        iterations: usize,
        scaling: ScalingMode,
    ) -> Result<Self> {
        for (name, v) in [("rho", rho), ("gamma", gamma), ("beta", beta), ("mu", mu)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Parameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if samples == 0 {
            return Err(Error::Parameter("samples must be at least 1".into()));
        }
        Ok(Self {
            rho,
            gamma,
            beta,
            mu,
            samples,
            iterations,
            scaling,
        })
    }

    pub fn smoothing(&self) -> SmoothingConfig {
        SmoothingConfig {
            mu: self.mu,
            samples: self.samples,
        }
    }

    /// Smallest `ργ` product for which the dual-margin condition can hold:
    /// `(5 − √17)/2 ≈ 0.4384`.
    pub fn min_alpha0() -> f64 {
        (5.0 - 17.0f64.sqrt()) / 2.0
    }

    /// Derives `(ρ, γ, β)` satisfying every validated condition for a given
    /// gradient Lipschitz constant and target product `α₀ = ργ`, with the
    /// batch schedule `J = R` and smoothing radius `μ = 1/√R`.
    pub fn theory_preset(l: f64, alpha0: f64, iterations: usize) -> Result<Self> {
        if !(alpha0 > Self::min_alpha0() && alpha0 < 1.0) {
            return Err(Error::Parameter(format!(
                "alpha0 must lie in ({:.6}, 1), got {alpha0}",
                Self::min_alpha0()
            )));
        }
        if iterations == 0 {
            return Err(Error::Parameter(
                "preset needs at least one iteration".into(),
            ));
        }
        let beta = ((3.0 + 3.0 * l) * l + 2.0) * (1.0 + 1e-6) + 1e-9;
        let rho = beta;
        let gamma = alpha0 / rho;
        let r = iterations as f64;
        Self::new(
            rho,
            gamma,
            beta,
            1.0 / r.sqrt(),
            iterations,
            iterations,
            ScalingMode::ClosedForm,
        )
    }

    /// High-accuracy batch schedule `J = R²` (keeps the potential function
    /// bounded below along the whole run).
    pub fn with_squared_batch(mut self) -> Self {
        self.samples = self.iterations * self.iterations;
        self
    }
}

/// One violated parameter condition with both evaluated sides.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamViolation {
    pub condition: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl std::fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: lhs {:.6e} vs rhs {:.6e}",
            self.condition, self.lhs, self.rhs
        )
    }
}

/// Checks the convergence conditions; returns one entry per violated
/// inequality and never fails. The smoothed Lipschitz constant is
/// conservatively replaced by `l` (valid since every condition is monotone
/// in it).
///
/// Conditions: `ργ < 1`, `ρ ≥ β`, `β > 3L+1`,
/// `(1−ργ)γ/2 + γ − (1−ργ)/ρ > 0` and `β > (3+3L)L + 2`.
pub fn validate_params(p: &SolverParams, l: f64) -> Vec<ParamViolation> {
    let mut out = Vec::new();
    let a0 = p.rho * p.gamma;
    if !(a0 < 1.0) {
        out.push(ParamViolation {
            condition: "rho_gamma_lt_one",
            lhs: a0,
            rhs: 1.0,
        });
    }
    if !(p.rho >= p.beta) {
        out.push(ParamViolation {
            condition: "rho_ge_beta",
            lhs: p.rho,
            rhs: p.beta,
        });
    }
    if !(p.beta > 3.0 * l + 1.0) {
        out.push(ParamViolation {
            condition: "beta_gt_3l_plus_1",
            lhs: p.beta,
            rhs: 3.0 * l + 1.0,
        });
    }
    let margin = (1.0 - a0) * p.gamma / 2.0 + p.gamma - (1.0 - a0) / p.rho;
    if !(margin > 0.0) {
        out.push(ParamViolation {
            condition: "gamma_rho_margin",
            lhs: margin,
            rhs: 0.0,
        });
    }
    let beta_floor = (3.0 + 3.0 * l) * l + 2.0;
    if !(p.beta > beta_floor) {
        out.push(ParamViolation {
            condition: "beta_margin",
            lhs: p.beta,
            rhs: beta_floor,
        });
    }
    out
}

/// The scaling Gram `BᵀB`, plus the diagonalization constant `η` when the
/// closed-form mode applies (`ρAᵀA + βBᵀB = ηI`).
#[derive(Debug, Clone)]
pub struct ScalingGram {
    pub gram: Array2<f64>,
    pub eta: Option<f64>,
}

/// Builds `BᵀB` for the chosen mode; see [`ScalingMode`].
pub fn build_scaling_matrix(
    a: &Array2<f64>,
    rho: f64,
    beta: f64,
    mode: &ScalingMode,
) -> Result<ScalingGram> {
    let n = a.ncols();
    let gram_a = linalg::gram(&a.view());
    let sigma_max = if n == 0 {
        0.0
    } else {
        linalg::max_eigenvalue(&gram_a.view()).max(0.0)
    };
    match mode {
        ScalingMode::ClosedForm => {
            let eta = rho * sigma_max + beta;
            let gram = Array2::eye(n) * (eta / beta) - &(gram_a * (rho / beta));
            Ok(ScalingGram {
                gram,
                eta: Some(eta),
            })
        }
        ScalingMode::IdentityComplement => {
            let c = sigma_max.max(1.0);
            let gram = Array2::eye(n) * c - &gram_a;
            Ok(ScalingGram { gram, eta: None })
        }
        ScalingMode::ExplicitGram(g) => {
            if g.nrows() != n || g.ncols() != n {
                return Err(Error::DimensionMismatch {
                    context: "explicit scaling Gram",
                    expected: n,
                    actual: g.nrows(),
                });
            }
            if linalg::asymmetry(&g.view()) > 1e-10 {
                return Err(Error::Parameter(
                    "explicit scaling Gram must be symmetric".into(),
                ));
            }
            if linalg::min_eigenvalue(&g.view()) < -1e-10 {
                return Err(Error::Parameter(
                    "explicit scaling Gram must be positive semidefinite".into(),
                ));
            }
            let total = &gram_a + g;
            let min_eig = linalg::min_eigenvalue(&total.view());
            if min_eig < 1.0 - 1e-10 {
                return Err(Error::Parameter(format!(
                    "AᵀA + BᵀB must dominate the identity; min eigenvalue {min_eig:.6}"
                )));
            }
            Ok(ScalingGram {
                gram: g.clone(),
                eta: None,
            })
        }
    }
}

/// Which route solves the primal subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimalStrategy {
    /// Single composite prox; requires the closed-form scaling Gram.
    OneProx,
    /// Accelerated proximal gradient on the quadratic part, run to a
    /// fixed-point residual of 1e-10.
    Iterative,
}

/// Inner tolerance of the iterative subproblem solver. The outer analysis
/// assumes exact subproblem solutions, so this sits far below any outer
/// tolerance used in tests.
pub const INNER_TOLERANCE: f64 = 1e-10;

/// Minimizer of the proximal subproblem
///
/// ```text
/// argmin_{x∈X}  ⟨Ḡ, x−xʳ⟩ + h(x) + ⟨(1−ργ)λ, Ax−b⟩
///               + (ρ/2)‖Ax−b‖² + (β/2)‖x−xʳ‖²_{BᵀB}
/// ```
///
/// With the closed-form Gram the quadratic completes to
/// `(η/2)‖x − c‖²` with `c = xʳ − (Ḡ + (1−ργ)Aᵀλ + ρAᵀ(Axʳ−b))/η`, so the
/// minimizer is `prox_{h+ι_X}^η(c)`. The iterative strategy solves the same
/// subproblem by accelerated proximal gradient and is used to cross-validate
/// the closed form.
pub fn primal_update(
    problem: &ProblemInstance,
    x_curr: &ArrayView1<f64>,
    lambda: &ArrayView1<f64>,
    params: &SolverParams,
    g_bar: &ArrayView1<f64>,
    scaling: &ScalingGram,
    strategy: PrimalStrategy,
) -> Result<Array1<f64>> {
    let a = &problem.constraint.a;
    let shrink = 1.0 - params.rho * params.gamma;
    let residual = problem.constraint.residual(x_curr)?;
    let drift =
        g_bar.to_owned() + &(shrink * a.t().dot(lambda)) + &(params.rho * a.t().dot(&residual));
    match strategy {
        PrimalStrategy::OneProx => {
            let eta = scaling.eta.ok_or_else(|| {
                Error::Parameter("one-prox update requires the closed-form scaling Gram".into())
            })?;
            let target = x_curr.to_owned() - &(drift / eta);
            problem.composite_prox(eta, &target.view())
        }
        PrimalStrategy::Iterative => {
            solve_subproblem_iteratively(problem, x_curr, lambda, params, g_bar, &scaling.gram)
        }
    }
}

/// Accelerated proximal gradient on
/// `s(x) = ⟨Ḡ, x⟩ + ⟨(1−ργ)Aᵀλ, x⟩ + (ρ/2)‖Ax−b‖² + (β/2)‖x−xʳ‖²_G + h(x) + ι_X`.
fn solve_subproblem_iteratively(
    problem: &ProblemInstance,
    x_curr: &ArrayView1<f64>,
    lambda: &ArrayView1<f64>,
    params: &SolverParams,
    g_bar: &ArrayView1<f64>,
    gram: &Array2<f64>,
) -> Result<Array1<f64>> {
    let a = &problem.constraint.a;
    let shrink = 1.0 - params.rho * params.gamma;
    let hessian = linalg::gram(&a.view()) * params.rho + &(gram * params.beta);
    let lip = linalg::max_eigenvalue(&hessian.view());
    let strong = linalg::min_eigenvalue(&hessian.view());
    if !(strong > 0.0) {
        return Err(Error::Parameter(format!(
            "primal subproblem is not strongly convex (min curvature {strong:.3e})"
        )));
    }
    let kappa = lip / strong;
    let momentum = (kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0);
    // Budget scales with sqrt of the condition number; the floor keeps cold
    // starts convergent when kappa is small.
    let cap = ((10.0 * kappa.sqrt()).ceil() as usize).max(1000);

    let linear_base = g_bar.to_owned() + &(shrink * a.t().dot(lambda))
        - &(params.rho * a.t().dot(&problem.constraint.b));
    let grad_s = |p: &Array1<f64>| -> Array1<f64> {
        &linear_base
            + &(params.rho * a.t().dot(&a.dot(p)))
            + &(params.beta * gram.dot(&(p - &x_curr.to_owned())))
    };

    let prox_step = |p: &Array1<f64>| -> Result<Array1<f64>> {
        let target = p - &(grad_s(p) / lip);
        problem.composite_prox(lip, &target.view())
    };

    let mut z = x_curr.to_owned();
    let mut y = z.clone();
    let mut last_residual = f64::INFINITY;
    for _ in 0..cap {
        let z_next = prox_step(&y)?;
        // Fixed-point residual of the prox-gradient map at the new point.
        let check = prox_step(&z_next)?;
        let diff = &check - &z_next;
        last_residual = diff.dot(&diff).sqrt();
        if last_residual <= INNER_TOLERANCE {
            return Ok(z_next);
        }
        y = &z_next + &((&z_next - &z) * momentum);
        z = z_next;
    }
    Err(Error::InnerSolverNoConvergence {
        iterations: cap,
        residual: last_residual,
    })
}

/// Perturbed dual ascent `λ⁺ = (1−ργ)λ + ρ(Ax⁺ − b)`.
pub fn dual_update(
    lambda: &ArrayView1<f64>,
    x_next: &ArrayView1<f64>,
    constraint: &LinearConstraint,
    rho: f64,
    gamma: f64,
) -> Result<Array1<f64>> {
    let residual = constraint.residual(x_next)?;
    Ok((1.0 - rho * gamma) * lambda.to_owned() + &(rho * residual))
}

/// Current and previous primal/dual iterates, plus the last gradient
/// surrogate.
#[derive(Debug, Clone)]
pub struct IterateState {
    pub x_curr: Array1<f64>,
    pub x_prev: Array1<f64>,
    pub lambda_curr: Array1<f64>,
    pub lambda_prev: Array1<f64>,
    pub last_estimate: Option<GradientEstimate>,
    pub iteration: usize,
}

/// Everything a finished (or aborted) run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    /// One row per completed iteration.
    pub trajectory: Vec<MetricRow>,
    /// Stored primal iterates `x⁰ … x^R`.
    pub iterates: Vec<Array1<f64>>,
    pub final_state: IterateState,
    /// Index drawn uniformly from `{0, …, R}` on a stream independent of the
    /// estimation randomness.
    pub sampled_index: usize,
    /// The iterate at `sampled_index`.
    pub sampled_iterate: Array1<f64>,
    pub total_oracle_calls: u64,
    /// Iterations at which the dual-boundedness diagnostic failed even with
    /// its statistical slack (full diagnostics only).
    pub dual_bound_violations: usize,
}

/// A failed run with whatever trajectory had accumulated.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: RunOutput,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "run aborted after {} iterations: {}",
            self.partial.trajectory.len(),
            self.error
        )
    }
}

impl std::error::Error for RunFailure {}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Proceed despite parameter-condition violations (logged).
    pub force: bool,
    pub diagnostics: DiagnosticsLevel,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            force: false,
            diagnostics: DiagnosticsLevel::Basic,
        }
    }
}

/// Statistical slack factor applied to single-trajectory checks of
/// in-expectation bounds.
pub const STAT_SLACK: f64 = 10.0;

/// Runs PZO-PDA for `params.iterations` outer iterations from the problem's
/// initial point with `λ⁰ = 0`, invoking `on_row` once per iteration.
pub fn run(
    problem: &ProblemInstance,
    params: &SolverParams,
    master_seed: u64,
    options: &RunOptions,
    mut on_row: impl FnMut(&MetricRow),
) -> std::result::Result<RunOutput, Box<RunFailure>> {
    let setup = || -> Result<(ScalingGram, PrimalStrategy)> {
        let violations = validate_params(params, problem.oracle.smoothness());
        if !violations.is_empty() {
            if options.force {
                for v in &violations {
                    log::warn!("parameter condition violated (forced run): {v}");
                }
            } else {
                return Err(Error::Parameter(format!(
                    "parameter conditions violated: {}",
                    violations
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("; ")
                )));
            }
        }
        let scaling = build_scaling_matrix(
            &problem.constraint.a,
            params.rho,
            params.beta,
            &params.scaling,
        )?;
        let strategy = if scaling.eta.is_some() {
            PrimalStrategy::OneProx
        } else {
            PrimalStrategy::Iterative
        };
        // Strong-convexity certificate of the subproblem quadratic.
        let hessian = linalg::gram(&problem.constraint.a.view()) * params.rho
            + &(scaling.gram.clone() * params.beta);
        let min_curv = linalg::min_eigenvalue(&hessian.view());
        if params.rho >= params.beta && min_curv < params.beta * (1.0 - 1e-9) {
            log::warn!(
                "subproblem curvature {min_curv:.6e} fell below the proximal weight {:.6e}",
                params.beta
            );
        }
        Ok((scaling, strategy))
    };

    let empty_failure = |error: Error, problem: &ProblemInstance| {
        let x0 = problem.initial_point.clone();
        let m = problem.constraint.rows();
        Box::new(RunFailure {
            error,
            partial: RunOutput {
                trajectory: Vec::new(),
                iterates: vec![x0.clone()],
                final_state: IterateState {
                    x_curr: x0.clone(),
                    x_prev: x0.clone(),
                    lambda_curr: Array1::zeros(m),
                    lambda_prev: Array1::zeros(m),
                    last_estimate: None,
                    iteration: 0,
                },
                sampled_index: 0,
                sampled_iterate: x0,
                total_oracle_calls: 0,
                dual_bound_violations: 0,
            },
        })
    };

    let (scaling, strategy) = match setup() {
        Ok(v) => v,
        Err(e) => return Err(empty_failure(e, problem)),
    };

    let oracle = problem.oracle.as_ref();
    let n_dim = problem.dimension();
    let m = problem.constraint.rows();
    let smoothing = params.smoothing();
    let sigma_sq_over_j = estimator::variance_bound(
        oracle.gradient_bound(),
        oracle.noise_variance().sqrt(),
        params.mu,
        oracle.smoothness(),
        n_dim,
        params.samples,
    );
    let shift_per_iter = 3.5 * sigma_sq_over_j;

    let mut x = problem.initial_point.clone();
    let mut lambda = Array1::<f64>::zeros(m);
    let mut x_prev = x.clone();
    let mut lambda_prev = lambda.clone();
    let mut last_estimate: Option<GradientEstimate> = None;

    let mut trajectory: Vec<MetricRow> = Vec::with_capacity(params.iterations);
    let mut iterates: Vec<Array1<f64>> = Vec::with_capacity(params.iterations + 1);
    iterates.push(x.clone());
    let mut total_calls: u64 = 0;
    let mut q_zero: Option<f64> = None;
    let mut dual_bound_violations = 0usize;

    let fail = |error: Error,
                trajectory: Vec<MetricRow>,
                iterates: Vec<Array1<f64>>,
                state: IterateState,
                total_calls: u64,
                dual_bound_violations: usize| {
        let last = iterates.len() - 1;
        let sampled_iterate = iterates[last].clone();
        Box::new(RunFailure {
            error,
            partial: RunOutput {
                trajectory,
                iterates,
                final_state: state,
                sampled_index: last,
                sampled_iterate,
                total_oracle_calls: total_calls,
                dual_bound_violations,
            },
        })
    };

    for r in 1..=params.iterations {
        let iter_start = Instant::now();
        let est_seed = derive_seed(master_seed, STREAM_ESTIMATION, r as u64);
        let state_snapshot = || IterateState {
            x_curr: x.clone(),
            x_prev: x_prev.clone(),
            lambda_curr: lambda.clone(),
            lambda_prev: lambda_prev.clone(),
            last_estimate: last_estimate.clone(),
            iteration: r - 1,
        };

        let estimate = match estimator::estimate_batch(oracle, &x.view(), &smoothing, est_seed) {
            Ok(e) => e,
            Err(e) => {
                return Err(fail(
                    e,
                    trajectory,
                    iterates,
                    state_snapshot(),
                    total_calls,
                    dual_bound_violations,
                ))
            }
        };
        total_calls += 2 * params.samples as u64;

        let x_next = match primal_update(
            problem,
            &x.view(),
            &lambda.view(),
            params,
            &estimate.value.view(),
            &scaling,
            strategy,
        ) {
            Ok(v) => v,
            Err(e) => {
                return Err(fail(
                    e,
                    trajectory,
                    iterates,
                    state_snapshot(),
                    total_calls,
                    dual_bound_violations,
                ))
            }
        };
        let lambda_next = match dual_update(
            &lambda.view(),
            &x_next.view(),
            &problem.constraint,
            params.rho,
            params.gamma,
        ) {
            Ok(v) => v,
            Err(e) => {
                return Err(fail(
                    e,
                    trajectory,
                    iterates,
                    state_snapshot(),
                    total_calls,
                    dual_bound_violations,
                ))
            }
        };

        let wall_ms = iter_start.elapsed().as_secs_f64() * 1e3;
        let row = match diagnostics::metric_row(
            problem,
            r,
            &x.view(),
            &x_next.view(),
            &lambda.view(),
            &lambda_next.view(),
            params.rho,
            params.gamma,
            params.beta,
            params.mu,
            Some(&scaling.gram),
            options.diagnostics,
            shift_per_iter,
            total_calls,
            wall_ms,
        ) {
            Ok(v) => v,
            Err(e) => {
                return Err(fail(
                    e,
                    trajectory,
                    iterates,
                    state_snapshot(),
                    total_calls,
                    dual_bound_violations,
                ))
            }
        };

        if options.diagnostics == DiagnosticsLevel::Full {
            if let Some(q) = row.potential {
                if q_zero.is_none() {
                    q_zero = Some(q);
                }
                // Dual boundedness: γ(1−ργ)/2 ‖λʳ‖² ≤ Q⁰ + (7(r−1)/2) σ̃²/J,
                // with statistical slack on the noise term.
                let lhs = params.gamma * (1.0 - params.rho * params.gamma) / 2.0
                    * lambda_next.dot(&lambda_next);
                let rhs = q_zero.unwrap() + shift_per_iter * (r as f64 - 1.0) * STAT_SLACK;
                if lhs > rhs {
                    dual_bound_violations += 1;
                    log::warn!(
                        "dual boundedness diagnostic failed at iteration {r}: {lhs:.6e} > {rhs:.6e}"
                    );
                }
            }
        }

        on_row(&row);
        trajectory.push(row);
        iterates.push(x_next.clone());
        x_prev = x;
        lambda_prev = lambda;
        x = x_next;
        lambda = lambda_next;
        last_estimate = Some(estimate);
    }

    let mut out_rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, STREAM_OUTPUT_SAMPLE, 0));
    let sampled_index = out_rng.random_range(0..=params.iterations);
    let sampled_iterate = iterates[sampled_index].clone();

    Ok(RunOutput {
        trajectory,
        iterates,
        final_state: IterateState {
            x_curr: x,
            x_prev,
            lambda_curr: lambda,
            lambda_prev,
            last_estimate,
            iteration: params.iterations,
        },
        sampled_index,
        sampled_iterate,
        total_oracle_calls: total_calls,
        dual_bound_violations,
    })
}
