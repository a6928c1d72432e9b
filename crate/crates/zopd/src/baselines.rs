//! Comparison solvers: random gradient-free descent (RGF) and zeroth-order
//! stochastic gradient descent (ZO-SGD).
//!
//! Both share the gradient estimator and take proximal steps on `f + h`
//! over `X`; neither enforces the linear equality constraint (an optional
//! quadratic-penalty oracle wrapper is available for fairness studies, off
//! by default). The constraint violation they leave behind is exactly what
//! the benchmark comparisons measure.

use std::sync::Arc;
use std::time::Instant;

use ndarray::{Array1, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{self, DiagnosticsLevel};
use crate::error::Error;
use crate::estimator::{self, derive_seed, SmoothingConfig};
use crate::problem::{ProblemInstance, SmoothOracle};
use crate::solver::{IterateState, RunFailure, RunOutput, STREAM_ESTIMATION, STREAM_OUTPUT_SAMPLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineVariant {
    Rgf,
    ZoSgd,
}

impl BaselineVariant {
    pub fn label(&self) -> &'static str {
        match self {
            BaselineVariant::Rgf => "rgf",
            BaselineVariant::ZoSgd => "zo-sgd",
        }
    }
}

/// Step size at iteration `r ≥ 1`: `0.01·√(log 2)/r` for RGF and `0.01/√r`
/// for ZO-SGD.
pub fn step_size(variant: BaselineVariant, r: usize) -> f64 {
    assert!(r >= 1);
    match variant {
        BaselineVariant::Rgf => 0.01 * 2.0f64.ln().sqrt() / r as f64,
        BaselineVariant::ZoSgd => 0.01 / (r as f64).sqrt(),
    }
}

#[derive(Debug, Clone)]
pub struct BaselineParams {
    pub variant: BaselineVariant,
    pub mu: f64,
    /// Oracle-call pairs per iteration; RGF conventionally uses 1.
    pub samples: usize,
    pub iterations: usize,
    /// When set, the oracle is wrapped with `(ρ/2)‖Ax−b‖²` so the baseline
    /// sees the constraint through a penalty.
    pub penalty_rho: Option<f64>,
}

impl BaselineParams {
    pub fn rgf(mu: f64, iterations: usize) -> Self {
        Self {
            variant: BaselineVariant::Rgf,
            mu,
            samples: 1,
            iterations,
            penalty_rho: None,
        }
    }

    pub fn zo_sgd(mu: f64, samples: usize, iterations: usize) -> Self {
        Self {
            variant: BaselineVariant::ZoSgd,
            mu,
            samples,
            iterations,
            penalty_rho: None,
        }
    }

    pub fn validate(&self) -> crate::error::Result<()> {
        SmoothingConfig::new(self.mu, self.samples)?;
        for r in [1usize, 2, 10] {
            if !(step_size(self.variant, r) > 0.0) {
                return Err(Error::Parameter(format!("step size nonpositive at r={r}")));
            }
        }
        Ok(())
    }
}

/// Oracle wrapper adding the quadratic constraint penalty to every value.
struct PenalizedOracle {
    inner: Arc<dyn SmoothOracle>,
    constraint: crate::problem::LinearConstraint,
    rho: f64,
    smoothness: f64,
}

impl SmoothOracle for PenalizedOracle {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn query(&self, x: ArrayView1<f64>, noise_seed: u64) -> f64 {
        self.inner.query(x, noise_seed)
            + self.rho / 2.0 * self.constraint.violation_sq(&x).unwrap_or(f64::NAN)
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn gradient_bound(&self) -> f64 {
        self.inner.gradient_bound()
    }

    fn noise_variance(&self) -> f64 {
        self.inner.noise_variance()
    }

    fn exact_value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(self.inner.exact_value(x)? + self.rho / 2.0 * self.constraint.violation_sq(&x).ok()?)
    }

    fn exact_gradient(&self, x: ArrayView1<f64>) -> Option<Array1<f64>> {
        let base = self.inner.exact_gradient(x)?;
        let res = self.constraint.residual(&x).ok()?;
        Some(base + &(self.rho * self.constraint.a.t().dot(&res)))
    }
}

/// Runs the chosen baseline: `x⁺ = prox_{h+ι_X}^{1/step}(x − step·Ḡ_μ)`.
///
/// Metric rows reuse the shared schema; the gap column is computed with unit
/// prox scale and a zero dual, which reduces to the plain proximal-residual
/// metric `‖x − prox_{h+ι_X}[x − ∇f(x)]‖²` plus the squared step length.
pub fn run_baseline(
    problem: &ProblemInstance,
    params: &BaselineParams,
    master_seed: u64,
    level: DiagnosticsLevel,
    mut on_row: impl FnMut(&diagnostics::MetricRow),
) -> std::result::Result<RunOutput, Box<RunFailure>> {
    let effective;
    let problem = match params.penalty_rho {
        None => problem,
        Some(rho) => {
            let wrapped = PenalizedOracle {
                inner: Arc::clone(&problem.oracle),
                constraint: problem.constraint.clone(),
                rho,
                smoothness: problem.oracle.smoothness()
                    + rho
                        * crate::linalg::max_eigenvalue(
                            &crate::linalg::gram(&problem.constraint.a.view()).view(),
                        ),
            };
            effective = ProblemInstance::new(
                Arc::new(wrapped),
                problem.h.clone(),
                problem.feasible.clone(),
                problem.constraint.clone(),
                problem.initial_point.clone(),
            )
            .expect("penalized instance keeps the original dimensions");
            &effective
        }
    };

    let m = problem.constraint.rows();
    let lambda = Array1::<f64>::zeros(m);
    let mut x = problem.initial_point.clone();
    let mut x_prev = x.clone();
    let mut iterates = vec![x.clone()];
    let mut trajectory = Vec::with_capacity(params.iterations);
    let mut total_calls: u64 = 0;
    let smoothing = SmoothingConfig {
        mu: params.mu,
        samples: params.samples,
    };

    let fail = |error: Error,
                trajectory: Vec<diagnostics::MetricRow>,
                iterates: Vec<Array1<f64>>,
                x: Array1<f64>,
                x_prev: Array1<f64>,
                iteration: usize,
                total_calls: u64| {
        let last = iterates.len() - 1;
        let sampled_iterate = iterates[last].clone();
        Box::new(RunFailure {
            error,
            partial: RunOutput {
                trajectory,
                iterates,
                final_state: IterateState {
                    x_curr: x,
                    x_prev,
                    lambda_curr: Array1::zeros(m),
                    lambda_prev: Array1::zeros(m),
                    last_estimate: None,
                    iteration,
                },
                sampled_index: last,
                sampled_iterate,
                total_oracle_calls: total_calls,
                dual_bound_violations: 0,
            },
        })
    };

    if let Err(e) = params.validate() {
        return Err(fail(e, trajectory, iterates, x.clone(), x_prev, 0, 0));
    }

    for r in 1..=params.iterations {
        let iter_start = Instant::now();
        let est_seed = derive_seed(master_seed, STREAM_ESTIMATION, r as u64);
        let estimate = match estimator::estimate_batch(
            problem.oracle.as_ref(),
            &x.view(),
            &smoothing,
            est_seed,
        ) {
            Ok(e) => e,
            Err(e) => {
                return Err(fail(
                    e,
                    trajectory,
                    iterates,
                    x.clone(),
                    x_prev,
                    r - 1,
                    total_calls,
                ))
            }
        };
        total_calls += 2 * params.samples as u64;

        let step = step_size(params.variant, r);
        let target = &x - &(step * &estimate.value);
        let x_next = match problem.composite_prox(1.0 / step, &target.view()) {
            Ok(v) => v,
            Err(e) => {
                return Err(fail(
                    e,
                    trajectory,
                    iterates,
                    x.clone(),
                    x_prev,
                    r - 1,
                    total_calls,
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
            &lambda.view(),
            1.0,
            1.0,
            1.0,
            params.mu,
            None,
            level,
            0.0,
            total_calls,
            wall_ms,
        ) {
            Ok(v) => v,
            Err(e) => {
                return Err(fail(
                    e,
                    trajectory,
                    iterates,
                    x.clone(),
                    x_prev,
                    r - 1,
                    total_calls,
                ))
            }
        };
        on_row(&row);
        trajectory.push(row);
        iterates.push(x_next.clone());
        x_prev = x;
        x = x_next;
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
            lambda_curr: Array1::zeros(m),
            lambda_prev: Array1::zeros(m),
            last_estimate: None,
            iteration: params.iterations,
        },
        sampled_index,
        sampled_iterate,
        total_oracle_calls: total_calls,
        dual_bound_violations: 0,
    })
}
