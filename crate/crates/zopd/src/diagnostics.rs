//! Analysis quantities: optimality gaps, the perturbed augmented-Lagrangian
//! value `C`, the potential functions `Q_c` and its shifted companion, and a
//! stationarity check.
//!
//! All functions here are pure; the solver calls [`metric_row`] once per
//! iteration, and the harness serializes the rows to CSV.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimator;
use crate::linalg;
use crate::problem::ProblemInstance;

/// How much per-iteration bookkeeping a run records.
///
/// `Full` adds the smoothed gap and the potential columns; those need
/// `f_μ` access and are skipped in timed runs by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticsLevel {
    Basic,
    Full,
}

/// Per-iteration record. Row `r` describes the transition into the iterate
/// produced by outer iteration `r`, so `optimality_gap` is the gap evaluated
/// at the pre-update point together with the step lengths of the transition.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub iteration: usize,
    /// Optimality gap: prox residual of the stationarity map plus squared
    /// primal and dual step lengths.
    pub optimality_gap: f64,
    /// Same gap with the smoothed gradient in the prox argument.
    pub smoothed_gap: Option<f64>,
    /// `‖Ax − b‖²` at the new iterate.
    pub constraint_violation: f64,
    /// Potential `Q` on the transition pair.
    pub potential: Option<f64>,
    /// `Q̃ = Q − (r+1)(7/2)σ̃²/J` (noise-shifted potential).
    pub shifted_potential: Option<f64>,
    /// `‖x⁺ − x‖²`.
    pub primal_step_sq: f64,
    /// `‖λ⁺ − λ‖²`.
    pub dual_step_sq: f64,
    /// Cumulative oracle calls after this iteration.
    pub oracle_calls: u64,
    pub wall_ms: f64,
}

impl MetricRow {
    /// CSV header shared by every run file.
    pub const CSV_HEADER: [&'static str; 10] = [
        "r",
        "psi",
        "psi_mu",
        "constraint_violation",
        "q",
        "q_tilde",
        "primal_step",
        "dual_step",
        "oracle_calls_cum",
        "wall_ms",
    ];

    /// The fields in header order; optional quantities become empty cells.
    pub fn csv_record(&self) -> Vec<String> {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        vec![
            self.iteration.to_string(),
            self.optimality_gap.to_string(),
            opt(self.smoothed_gap),
            self.constraint_violation.to_string(),
            opt(self.potential),
            opt(self.shifted_potential),
            self.primal_step_sq.to_string(),
            self.dual_step_sq.to_string(),
            self.oracle_calls.to_string(),
            self.wall_ms.to_string(),
        ]
    }
}

/// Which gradient enters the stationarity map of the optimality gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientSource {
    /// `∇f`, from the oracle's exact hook.
    Exact,
    /// `∇f_μ`, from the oracle's closed-form smoothed hook.
    Smoothed { mu: f64 },
}

/// Optimality gap
///
/// ```text
/// Ψ = ‖x − prox_{h+ι_X}^β [x − (g(x) + Aᵀλ)/β]‖² + ‖x⁺−x‖²/β² + ‖λ⁺−λ‖²/ρ²
/// ```
///
/// with `g = ∇f` (exact) or `∇f_μ` (smoothed).
#[allow(clippy::too_many_arguments)]
pub fn optimality_gap(
    problem: &ProblemInstance,
    x_curr: &ArrayView1<f64>,
    x_next: &ArrayView1<f64>,
    lambda_curr: &ArrayView1<f64>,
    lambda_next: &ArrayView1<f64>,
    beta: f64,
    rho: f64,
    source: GradientSource,
) -> Result<f64> {
    let g = match source {
        GradientSource::Exact => problem
            .oracle
            .exact_gradient(*x_curr)
            .ok_or_else(|| Error::Capability("optimality gap needs an exact gradient".into()))?,
        GradientSource::Smoothed { mu } => problem
            .oracle
            .smoothed_gradient(*x_curr, mu)
            .ok_or_else(|| Error::Capability("smoothed gap needs a smoothed gradient".into()))?,
    };
    let target = x_curr.to_owned() - &((g + &problem.constraint.a.t().dot(lambda_curr)) / beta);
    let proxed = problem.composite_prox(beta, &target.view())?;
    let prox_res = x_curr.to_owned() - &proxed;
    let dx = x_next.to_owned() - x_curr;
    let dl = lambda_next.to_owned() - lambda_curr;
    Ok(prox_res.dot(&prox_res) + dx.dot(&dx) / (beta * beta) + dl.dot(&dl) / (rho * rho))
}

/// Where the smoothed value `f_μ` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FMuSource {
    /// Oracle's closed form (exact for the quadratic benchmarks).
    Analytic { mu: f64 },
    /// Uniform-ball Monte Carlo; `samples` must be at least 10⁴.
    MonteCarlo { mu: f64, samples: usize, seed: u64 },
}

fn smoothed_value(
    problem: &ProblemInstance,
    x: &ArrayView1<f64>,
    source: &FMuSource,
) -> Result<f64> {
    match *source {
        FMuSource::Analytic { mu } => problem
            .oracle
            .smoothed_value(*x, mu)
            .ok_or_else(|| Error::Capability("oracle has no closed-form smoothed value".into())),
        FMuSource::MonteCarlo { mu, samples, seed } => {
            if samples < 10_000 {
                return Err(Error::Parameter(
                    "Monte-Carlo smoothed values need at least 10000 samples".into(),
                ));
            }
            Ok(
                estimator::smoothed_value_monte_carlo(
                    problem.oracle.as_ref(),
                    x,
                    mu,
                    samples,
                    seed,
                )
                .0,
            )
        }
    }
}

/// The perturbed augmented-Lagrangian value
/// `C(x, λ) = f_μ(x) + h(x) + ⟨(1−ργ)λ, Ax−b−γλ⟩ + (ρ/2)‖Ax−b‖²`.
pub fn al_value_c(
    problem: &ProblemInstance,
    x: &ArrayView1<f64>,
    lambda: &ArrayView1<f64>,
    rho: f64,
    gamma: f64,
    f_mu: &FMuSource,
) -> Result<f64> {
    let fmu = smoothed_value(problem, x, f_mu)?;
    let h = problem.h.evaluate(x);
    let res = problem.constraint.residual(x)?;
    let inner = (1.0 - rho * gamma) * lambda.dot(&(res.clone() - &(gamma * lambda.to_owned())));
    Ok(fmu + h + inner + rho / 2.0 * res.dot(&res))
}

/// Potential
///
/// ```text
/// Q_c = C(x⁺, λ⁺) + (1−ργ)γ/2 ‖λ⁺‖²
///     + c/2 [ (1−ργ)/ρ ‖λ⁺−λ‖² + β‖x⁺−x‖²_{BᵀB} + 3L_μ²‖x⁺−x‖² ]
/// ```
///
/// `l_mu` is the smoothness constant of `f_μ` (conservatively `L`).
#[allow(clippy::too_many_arguments)]
pub fn potential_q(
    problem: &ProblemInstance,
    x_next: &ArrayView1<f64>,
    lambda_next: &ArrayView1<f64>,
    x_curr: &ArrayView1<f64>,
    lambda_curr: &ArrayView1<f64>,
    rho: f64,
    gamma: f64,
    beta: f64,
    gram: &ArrayView2<f64>,
    l_mu: f64,
    c: f64,
    f_mu: &FMuSource,
) -> Result<f64> {
    let base = al_value_c(problem, x_next, lambda_next, rho, gamma, f_mu)?;
    let shrink = 1.0 - rho * gamma;
    let dl = lambda_next.to_owned() - lambda_curr;
    let dx = x_next.to_owned() - x_curr;
    let coupling = shrink / rho * dl.dot(&dl)
        + beta * linalg::weighted_norm_sq(gram, &dx.view())
        + 3.0 * l_mu * l_mu * dx.dot(&dx);
    Ok(base + shrink * gamma / 2.0 * lambda_next.dot(lambda_next) + c / 2.0 * coupling)
}

/// Report of [`stationarity_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport {
    /// `‖Ax − b‖`.
    pub constraint_norm: f64,
    /// Largest variational-inequality value over the probed feasible points.
    pub vi_max: f64,
    pub stationary: bool,
}

/// Checks the two stationarity conditions at `(x, λ)`: feasibility
/// `Ax − b = 0` and the variational inequality
/// `⟨∇f(x) + Aᵀλ + η, x − y⟩ ≤ 0` for all feasible `y`, with the
/// subgradient `η` of `h + ι_X` recovered from one composite-prox step.
pub fn stationarity_check(
    problem: &ProblemInstance,
    x: &ArrayView1<f64>,
    lambda: &ArrayView1<f64>,
    tol: f64,
    probes: usize,
    seed: u64,
) -> Result<StationarityReport> {
    let grad = problem
        .oracle
        .exact_gradient(*x)
        .ok_or_else(|| Error::Capability("stationarity check needs an exact gradient".into()))?;
    let res = problem.constraint.residual(x)?;
    let constraint_norm = res.dot(&res).sqrt();

    // Prox optimality at unit scale: η = (x − s) − p ∈ ∂(h+ι_X)(p) for
    // p = prox_{h+ι_X}^1(x − s), so ∇f + Aᵀλ + η = x − p.
    let s = grad + &problem.constraint.a.t().dot(lambda);
    let target = x.to_owned() - &s;
    let proxed = problem.composite_prox(1.0, &target.view())?;
    let witness = x.to_owned() - &proxed;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Probe the prox point itself (worst case when x is not a fixed point)
    // plus random feasible points.
    let mut vi_max = witness.dot(&(x.to_owned() - &proxed));
    for _ in 0..probes {
        let y = problem.feasible.sample_point(&mut rng);
        vi_max = vi_max.max(witness.dot(&(x.to_owned() - &y)));
    }
    Ok(StationarityReport {
        constraint_norm,
        vi_max,
        stationary: constraint_norm <= tol && vi_max <= tol,
    })
}

/// Assembles one [`MetricRow`] for the transition
/// `(x, λ) → (x⁺, λ⁺)` of outer iteration `r`.
///
/// The gap uses the exact gradient when the oracle has one, otherwise the
/// closed-form smoothed gradient. `shift_per_iter` is `(7/2)σ̃²/J`.
#[allow(clippy::too_many_arguments)]
pub fn metric_row(
    problem: &ProblemInstance,
    iteration: usize,
    x_curr: &ArrayView1<f64>,
    x_next: &ArrayView1<f64>,
    lambda_curr: &ArrayView1<f64>,
    lambda_next: &ArrayView1<f64>,
    rho: f64,
    gamma: f64,
    beta: f64,
    mu: f64,
    gram: Option<&Array2<f64>>,
    level: DiagnosticsLevel,
    shift_per_iter: f64,
    oracle_calls: u64,
    wall_ms: f64,
) -> Result<MetricRow> {
    let source = if problem.oracle.exact_gradient(*x_curr).is_some() {
        GradientSource::Exact
    } else if problem.oracle.smoothed_gradient(*x_curr, mu).is_some() {
        GradientSource::Smoothed { mu }
    } else {
        return Err(Error::Capability(
            "metrics need an exact or smoothed gradient hook".into(),
        ));
    };
    let gap = optimality_gap(
        problem,
        x_curr,
        x_next,
        lambda_curr,
        lambda_next,
        beta,
        rho,
        source,
    )?;
    let dx = x_next.to_owned() - x_curr;
    let dl = lambda_next.to_owned() - lambda_curr;
    let violation = problem.constraint.violation_sq(x_next)?;

    let mut smoothed_gap = None;
    let mut potential = None;
    let mut shifted_potential = None;
    if level == DiagnosticsLevel::Full {
        if problem.oracle.smoothed_gradient(*x_curr, mu).is_some() {
            smoothed_gap = Some(optimality_gap(
                problem,
                x_curr,
                x_next,
                lambda_curr,
                lambda_next,
                beta,
                rho,
                GradientSource::Smoothed { mu },
            )?);
        }
        if let Some(g) = gram {
            if problem.oracle.smoothed_value(*x_curr, mu).is_some() {
                let q = potential_q(
                    problem,
                    x_next,
                    lambda_next,
                    x_curr,
                    lambda_curr,
                    rho,
                    gamma,
                    beta,
                    &g.view(),
                    problem.oracle.smoothness(),
                    1.0,
                    &FMuSource::Analytic { mu },
                )?;
                potential = Some(q);
                // Row r carries Q^{r−1}, so the shift index (r−1)+1 is r.
                shifted_potential = Some(q - iteration as f64 * shift_per_iter);
            }
        }
    }

    Ok(MetricRow {
        iteration,
        optimality_gap: gap,
        smoothed_gap,
        constraint_violation: violation,
        potential,
        shifted_potential,
        primal_step_sq: dx.dot(&dx),
        dual_step_sq: dl.dot(&dl),
        oracle_calls,
        wall_ms,
    })
}
