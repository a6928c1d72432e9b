//! Problem abstraction: noisy smooth oracle, nonsmooth term with a
//! proximity operator, convex feasible set, and a linear equality constraint.
//!
//! Every solver in this crate is written against [`ProblemInstance`]. The
//! smooth part `f` is only reachable through [`SmoothOracle::query`], which
//! returns a noisy value `F(x, ξ)` for a caller-supplied noise seed; the
//! query must be a pure function of `(x, seed)` so that instances can be
//! shared across concurrent runs.

use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Noisy zeroth-order access to the smooth objective `f`.
///
/// `query(x, seed)` returns `F(x, ξ)` where `ξ` is fully determined by
/// `seed`; the expectation of `F(x, ·)` over seeds is `f(x)`. The constants
/// describe the regularity the analysis relies on: `smoothness` is a
/// Lipschitz constant `L` of `∇f`, `gradient_bound` is a bound `K` on
/// `‖∇f(x)‖` over the region the solver visits, and `noise_variance` bounds
/// `E‖∇F(x,ξ) − ∇f(x)‖²` (zero for additive value noise).
pub trait SmoothOracle: Send + Sync {
    fn dimension(&self) -> usize;

    /// Noisy function value `F(x, ξ)`; must be pure in `(x, seed)`.
    fn query(&self, x: ArrayView1<f64>, noise_seed: u64) -> f64;

    /// Lipschitz constant of the gradient (`L`).
    fn smoothness(&self) -> f64;

    /// Bound on the gradient norm (`K`).
    fn gradient_bound(&self) -> f64;

    /// Gradient-noise variance bound (`σ²`).
    fn noise_variance(&self) -> f64;

    /// Noise-free value `f(x)`, when computable.
    fn exact_value(&self, _x: ArrayView1<f64>) -> Option<f64> {
        None
    }

    /// Exact gradient `∇f(x)`, when computable (diagnostics only).
    fn exact_gradient(&self, _x: ArrayView1<f64>) -> Option<Array1<f64>> {
        None
    }

    /// Closed-form ball-smoothed value `f_μ(x)`, when available.
    fn smoothed_value(&self, _x: ArrayView1<f64>, _mu: f64) -> Option<f64> {
        None
    }

    /// Closed-form gradient of the smoothed function `∇f_μ(x)`, when available.
    fn smoothed_gradient(&self, _x: ArrayView1<f64>, _mu: f64) -> Option<Array1<f64>> {
        None
    }
}

/// Quadratic test oracle `f(x) = xᵀQx` with optional additive Gaussian value
/// noise. `Q` must be symmetric.
///
/// Ball smoothing of a quadratic has a closed form,
/// `f_μ(x) = xᵀQx + μ² tr(Q)/(N+2)`, so this oracle doubles as the analytic
/// reference for estimator tests.
#[derive(Clone)]
pub struct QuadraticOracle {
    q: Array2<f64>,
    noise_sd: f64,
    smoothness: f64,
    gradient_bound: f64,
}

impl QuadraticOracle {
    /// `gradient_bound` must dominate `‖2Qx‖` on the points the caller will
    /// evaluate; there is no global bound for a quadratic.
    pub fn new(q: Array2<f64>, noise_sd: f64, gradient_bound: f64) -> Result<Self> {
        if q.nrows() != q.ncols() {
            return Err(Error::DimensionMismatch {
                context: "quadratic oracle matrix",
                expected: q.nrows(),
                actual: q.ncols(),
            });
        }
        if crate::linalg::asymmetry(&q.view()) > 1e-10 {
            return Err(Error::Parameter(
                "quadratic oracle requires symmetric Q".into(),
            ));
        }
        let spectral = crate::linalg::symmetric_eigenvalues(&q.view())
            .iter()
            .fold(0.0f64, |m, &e| m.max(e.abs()));
        Ok(Self {
            q,
            noise_sd,
            smoothness: 2.0 * spectral,
            gradient_bound,
        })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.q
    }
}

impl SmoothOracle for QuadraticOracle {
    fn dimension(&self) -> usize {
        self.q.nrows()
    }

    fn query(&self, x: ArrayView1<f64>, noise_seed: u64) -> f64 {
        self.exact_value(x).unwrap() + gaussian_noise(noise_seed, self.noise_sd)
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn gradient_bound(&self) -> f64 {
        self.gradient_bound
    }

    fn noise_variance(&self) -> f64 {
        // Additive value noise leaves the gradient untouched.
        0.0
    }

    fn exact_value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(x.dot(&self.q.dot(&x)))
    }

    fn exact_gradient(&self, x: ArrayView1<f64>) -> Option<Array1<f64>> {
        Some(2.0 * self.q.dot(&x))
    }

    fn smoothed_value(&self, x: ArrayView1<f64>, mu: f64) -> Option<f64> {
        let n = self.dimension() as f64;
        let trace = self.q.diag().sum();
        Some(x.dot(&self.q.dot(&x)) + mu * mu * trace / (n + 2.0))
    }

    fn smoothed_gradient(&self, x: ArrayView1<f64>, _mu: f64) -> Option<Array1<f64>> {
        // Smoothing a quadratic shifts the value by a constant only.
        self.exact_gradient(x)
    }
}

pub type ValueFn = Box<dyn Fn(ArrayView1<f64>) -> f64 + Send + Sync>;
pub type GradientFn = Box<dyn Fn(ArrayView1<f64>) -> Array1<f64> + Send + Sync>;

/// Closure-backed oracle for tests and ad-hoc problems.
pub struct FnOracle {
    pub dim: usize,
    pub value: ValueFn,
    pub gradient: Option<GradientFn>,
    pub noise_sd: f64,
    pub smoothness: f64,
    pub gradient_bound: f64,
}

impl FnOracle {
    pub fn noiseless(
        dim: usize,
        value: impl Fn(ArrayView1<f64>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            value: Box::new(value),
            gradient: None,
            noise_sd: 0.0,
            smoothness: 0.0,
            gradient_bound: 0.0,
        }
    }
}

impl SmoothOracle for FnOracle {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn query(&self, x: ArrayView1<f64>, noise_seed: u64) -> f64 {
        (self.value)(x) + gaussian_noise(noise_seed, self.noise_sd)
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn gradient_bound(&self) -> f64 {
        self.gradient_bound
    }

    fn noise_variance(&self) -> f64 {
        0.0
    }

    fn exact_value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some((self.value)(x))
    }

    fn exact_gradient(&self, x: ArrayView1<f64>) -> Option<Array1<f64>> {
        self.gradient.as_ref().map(|g| g(x))
    }
}

/// One standard normal draw scaled by `sd`, fully determined by the seed.
fn gaussian_noise(seed: u64, sd: f64) -> f64 {
    if sd == 0.0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z: f64 = rng.sample(StandardNormal);
    sd * z
}

/// Componentwise soft-threshold at level `t ≥ 0`.
pub fn soft_threshold(v: &ArrayView1<f64>, t: f64) -> Array1<f64> {
    v.mapv(|z| z.signum() * (z.abs() - t).max(0.0))
}

/// Euclidean projection onto the ball of the given radius.
pub fn project_ball(v: &ArrayView1<f64>, radius: f64) -> Array1<f64> {
    let norm = v.dot(v).sqrt();
    if norm <= radius {
        v.to_owned()
    } else {
        v.mapv(|z| z * radius / norm)
    }
}

/// Convex nonsmooth term `h` with a closed-form proximity operator.
#[derive(Debug, Clone, PartialEq)]
pub enum NonsmoothTerm {
    /// `h ≡ 0`.
    Zero,
    /// `h(x) = weight · ‖x‖₁`.
    L1 { weight: f64 },
}

impl NonsmoothTerm {
    pub fn evaluate(&self, x: &ArrayView1<f64>) -> f64 {
        match self {
            NonsmoothTerm::Zero => 0.0,
            NonsmoothTerm::L1 { weight } => weight * x.iter().map(|z| z.abs()).sum::<f64>(),
        }
    }

    /// `prox_h^α(v) = argmin_z (α/2)‖v−z‖² + h(z)`.
    pub fn prox(&self, alpha: f64, v: &ArrayView1<f64>) -> Array1<f64> {
        assert!(alpha > 0.0, "prox scale must be positive");
        match self {
            NonsmoothTerm::Zero => v.to_owned(),
            NonsmoothTerm::L1 { weight } => soft_threshold(v, weight / alpha),
        }
    }
}

/// Closed convex feasible set `X` with membership test and a composite prox
/// for the nonsmooth terms shipped with it.
///
/// `composite_prox` computes `prox_{h+ι_X}^α`, the prox of the *sum* of `h`
/// and the set indicator. A sum prox has no generic closed form, so each
/// variant implements the combinations it supports and rejects the rest; the
/// shipped combinations are validated against [`composite_prox_bruteforce`]
/// in the test suite.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    /// `X = ℝᴺ`.
    Free { dim: usize },
    /// Cartesian product of `blocks` balls of dimension `block_dim` and the
    /// given radius, optionally intersected with the nonnegative orthant.
    BlockBalls {
        blocks: usize,
        block_dim: usize,
        radius: f64,
        nonneg: bool,
    },
}

impl FeasibleSet {
    pub fn unit_ball(dim: usize) -> Self {
        FeasibleSet::BlockBalls {
            blocks: 1,
            block_dim: dim,
            radius: 1.0,
            nonneg: false,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Free { dim } => *dim,
            FeasibleSet::BlockBalls {
                blocks, block_dim, ..
            } => blocks * block_dim,
        }
    }

    pub fn contains(&self, x: &ArrayView1<f64>, tol: f64) -> bool {
        match self {
            FeasibleSet::Free { dim } => x.len() == *dim,
            FeasibleSet::BlockBalls {
                blocks,
                block_dim,
                radius,
                nonneg,
            } => {
                if x.len() != blocks * block_dim {
                    return false;
                }
                (0..*blocks).all(|i| {
                    let b = x.slice(ndarray::s![i * block_dim..(i + 1) * block_dim]);
                    let ok_ball = b.dot(&b).sqrt() <= radius + tol;
                    let ok_sign = !nonneg || b.iter().all(|&z| z >= -tol);
                    ok_ball && ok_sign
                })
            }
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, v: &ArrayView1<f64>) -> Array1<f64> {
        match self {
            FeasibleSet::Free { .. } => v.to_owned(),
            FeasibleSet::BlockBalls {
                blocks,
                block_dim,
                radius,
                nonneg,
            } => {
                let mut out = Array1::zeros(v.len());
                for i in 0..*blocks {
                    let range = ndarray::s![i * block_dim..(i + 1) * block_dim];
                    let b = v.slice(range);
                    // Projection onto cone ∩ ball factors: clamp to the cone,
                    // then clip to the ball.
                    let clamped = if *nonneg {
                        b.mapv(|z| z.max(0.0))
                    } else {
                        b.to_owned()
                    };
                    out.slice_mut(range)
                        .assign(&project_ball(&clamped.view(), *radius));
                }
                out
            }
        }
    }

    /// `prox_{h+ι_X}^α(v)`.
    pub fn composite_prox(
        &self,
        alpha: f64,
        v: &ArrayView1<f64>,
        h: &NonsmoothTerm,
    ) -> Result<Array1<f64>> {
        if alpha <= 0.0 {
            return Err(Error::Parameter(
                "composite prox scale must be positive".into(),
            ));
        }
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "composite prox input",
                expected: self.dim(),
                actual: v.len(),
            });
        }
        match (self, h) {
            (FeasibleSet::Free { .. }, _) => Ok(h.prox(alpha, v)),
            (FeasibleSet::BlockBalls { .. }, NonsmoothTerm::Zero) => Ok(self.project(v)),
            (
                FeasibleSet::BlockBalls {
                    blocks,
                    block_dim,
                    radius,
                    nonneg,
                },
                NonsmoothTerm::L1 { weight },
            ) => {
                let level = weight / alpha;
                let mut out = Array1::zeros(v.len());
                for i in 0..*blocks {
                    let range = ndarray::s![i * block_dim..(i + 1) * block_dim];
                    let b = v.slice(range);
                    // Shrink, then project: exact for the l1 + ball (and the
                    // nonnegative variant) composite; validated against the
                    // brute-force oracle in tests.
                    let shrunk = if *nonneg {
                        b.mapv(|z| (z - level).max(0.0))
                    } else {
                        soft_threshold(&b, level)
                    };
                    out.slice_mut(range)
                        .assign(&project_ball(&shrunk.view(), *radius));
                }
                Ok(out)
            }
        }
    }

    /// A point drawn from the set (used to probe variational inequalities).
    pub fn sample_point<R: Rng>(&self, rng: &mut R) -> Array1<f64> {
        match self {
            FeasibleSet::Free { dim } => {
                Array1::from_shape_fn(*dim, |_| rng.sample::<f64, _>(StandardNormal))
            }
            FeasibleSet::BlockBalls {
                blocks,
                block_dim,
                radius,
                nonneg,
            } => {
                let mut out = Array1::zeros(blocks * block_dim);
                for i in 0..*blocks {
                    let mut b: Array1<f64> =
                        Array1::from_shape_fn(*block_dim, |_| rng.sample(StandardNormal));
                    if *nonneg {
                        b.mapv_inplace(f64::abs);
                    }
                    let norm = b.dot(&b).sqrt().max(f64::MIN_POSITIVE);
                    let r = radius * rng.random::<f64>().powf(1.0 / *block_dim as f64);
                    b.mapv_inplace(|z| z * r / norm);
                    out.slice_mut(ndarray::s![i * block_dim..(i + 1) * block_dim])
                        .assign(&b);
                }
                out
            }
        }
    }
}

/// Linear equality constraint `Ax = b`.
#[derive(Debug, Clone)]
pub struct LinearConstraint {
    pub a: Array2<f64>,
    pub b: Array1<f64>,
}

impl LinearConstraint {
    pub fn new(a: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                context: "linear constraint right-hand side",
                expected: a.nrows(),
                actual: b.len(),
            });
        }
        if a.iter().any(|z| !z.is_finite()) {
            return Err(Error::Parameter(
                "constraint matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { a, b })
    }

    /// Unconstrained problems: an empty `0 × dim` system.
    pub fn none(dim: usize) -> Self {
        Self {
            a: Array2::zeros((0, dim)),
            b: Array1::zeros(0),
        }
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    /// `Ax − b`.
    pub fn residual(&self, x: &ArrayView1<f64>) -> Result<Array1<f64>> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                context: "constraint residual input",
                expected: self.cols(),
                actual: x.len(),
            });
        }
        Ok(self.a.dot(x) - &self.b)
    }

    /// `‖Ax − b‖²`.
    pub fn violation_sq(&self, x: &ArrayView1<f64>) -> Result<f64> {
        let r = self.residual(x)?;
        Ok(r.dot(&r))
    }
}

/// Immutable bundle of everything a solver needs: the oracle for `f`, the
/// nonsmooth term `h`, the feasible set `X`, the linear constraint, and a
/// starting point.
#[derive(Clone)]
pub struct ProblemInstance {
    pub oracle: Arc<dyn SmoothOracle>,
    pub h: NonsmoothTerm,
    pub feasible: FeasibleSet,
    pub constraint: LinearConstraint,
    pub initial_point: Array1<f64>,
}

impl ProblemInstance {
    pub fn new(
        oracle: Arc<dyn SmoothOracle>,
        h: NonsmoothTerm,
        feasible: FeasibleSet,
        constraint: LinearConstraint,
        initial_point: Array1<f64>,
    ) -> Result<Self> {
        let n = oracle.dimension();
        for (what, actual) in [
            ("feasible set", feasible.dim()),
            ("constraint matrix columns", constraint.cols()),
            ("initial point", initial_point.len()),
        ] {
            if actual != n {
                return Err(Error::DimensionMismatch {
                    context: match what {
                        "feasible set" => "problem feasible set",
                        "constraint matrix columns" => "problem constraint",
                        _ => "problem initial point",
                    },
                    expected: n,
                    actual,
                });
            }
        }
        Ok(Self {
            oracle,
            h,
            feasible,
            constraint,
            initial_point,
        })
    }

    pub fn dimension(&self) -> usize {
        self.oracle.dimension()
    }

    pub fn composite_prox(&self, alpha: f64, v: &ArrayView1<f64>) -> Result<Array1<f64>> {
        self.feasible.composite_prox(alpha, v, &self.h)
    }
}

/// Reference solver for `argmin_z (α/2)‖v−z‖² + h(z) + ι_X(z)`, used only to
/// validate the closed-form composite proxes on small instances (dimension at
/// most 4).
///
/// Douglas–Rachford splitting between `f₁ = (α/2)‖·−v‖² + h` (whose prox is
/// a soft-threshold of a weighted average, independent of `X`) and
/// `f₂ = ι_X` (projection). The splitting never evaluates the
/// shrink-then-project composition it is used to validate.
pub fn composite_prox_bruteforce(
    h: &NonsmoothTerm,
    set: &FeasibleSet,
    alpha: f64,
    v: &ArrayView1<f64>,
    max_iterations: usize,
) -> Result<Array1<f64>> {
    if v.len() > 4 {
        return Err(Error::Parameter(
            "brute-force prox oracle is restricted to dimension <= 4".into(),
        ));
    }
    if alpha <= 0.0 {
        return Err(Error::Parameter(
            "brute-force prox scale must be positive".into(),
        ));
    }
    let tol = 1e-10;
    // prox of s·f₁ at w: the two quadratics combine into one centered at the
    // weighted average, then h shrinks.
    let s = 1.0 / alpha;
    let prox_f1 = |w: &ArrayView1<f64>| -> Array1<f64> {
        let scale = alpha + 1.0 / s;
        let avg = (alpha * v.to_owned() + w.mapv(|z| z / s)) / scale;
        h.prox(scale, &avg.view())
    };
    let mut u = v.to_owned();
    let mut y = prox_f1(&u.view());
    for _ in 0..max_iterations {
        let reflected = 2.0 * &y - &u;
        let z = set.project(&reflected.view());
        let step = &z - &y;
        let step_norm = step.dot(&step).sqrt();
        u = &u + &step;
        y = prox_f1(&u.view());
        if step_norm <= tol {
            return Ok(set.project(&y.view()));
        }
    }
    let reflected = 2.0 * &y - &u;
    let z = set.project(&reflected.view());
    let step = &z - &y;
    Err(Error::BruteForceNoConvergence {
        iterations: max_iterations,
        residual: step.dot(&step).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn residual_zero_case() {
        let c = LinearConstraint::new(Array2::eye(2), Array1::zeros(2)).unwrap();
        let r = c.residual(&array![0.0, 0.0].view()).unwrap();
        assert_eq!(r, array![0.0, 0.0]);
    }

    #[test]
    fn residual_consensus_symmetry() {
        // 2-node, 1-edge consensus: A = [1, -1].
        let c = LinearConstraint::new(array![[1.0, -1.0]], Array1::zeros(1)).unwrap();
        let r = c.residual(&array![0.7, 0.7].view()).unwrap();
        assert!(r[0].abs() < 1e-15);
    }

    #[test]
    fn residual_hand_arithmetic() {
        let c = LinearConstraint::new(array![[1.0, 1.0]], array![1.0]).unwrap();
        let r = c.residual(&array![0.25, 0.5].view()).unwrap();
        assert!((r[0] - (-0.25)).abs() < 1e-15);
    }

    #[test]
    fn residual_dimension_mismatch() {
        let c = LinearConstraint::new(array![[1.0, 1.0]], array![1.0]).unwrap();
        assert!(matches!(
            c.residual(&array![1.0].view()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bruteforce_ball_projection() {
        let out = composite_prox_bruteforce(
            &NonsmoothTerm::Zero,
            &FeasibleSet::unit_ball(2),
            1.0,
            &array![2.0, 0.0].view(),
            20_000,
        )
        .unwrap();
        assert!((out[0] - 1.0).abs() < 1e-8);
        assert!(out[1].abs() < 1e-8);
    }

    #[test]
    fn bruteforce_soft_threshold() {
        let out = composite_prox_bruteforce(
            &NonsmoothTerm::L1 { weight: 1.0 },
            &FeasibleSet::Free { dim: 2 },
            1.0,
            &array![2.0, -0.5].view(),
            20_000,
        )
        .unwrap();
        assert!((out[0] - 1.0).abs() < 1e-8);
        assert!(out[1].abs() < 1e-8);
    }

    #[test]
    fn bruteforce_identity_on_free_space() {
        let v = array![0.3, -1.2, 4.0];
        let out = composite_prox_bruteforce(
            &NonsmoothTerm::Zero,
            &FeasibleSet::Free { dim: 3 },
            2.5,
            &v.view(),
            20_000,
        )
        .unwrap();
        for i in 0..3 {
            assert!((out[i] - v[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn composite_prox_matches_bruteforce_on_shipped_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pairs: Vec<(FeasibleSet, NonsmoothTerm)> = vec![
            (FeasibleSet::Free { dim: 2 }, NonsmoothTerm::Zero),
            (
                FeasibleSet::Free { dim: 3 },
                NonsmoothTerm::L1 { weight: 0.7 },
            ),
            (FeasibleSet::unit_ball(2), NonsmoothTerm::Zero),
            (FeasibleSet::unit_ball(3), NonsmoothTerm::L1 { weight: 0.3 }),
            (
                FeasibleSet::BlockBalls {
                    blocks: 1,
                    block_dim: 2,
                    radius: 1.0,
                    nonneg: true,
                },
                NonsmoothTerm::L1 { weight: 0.2 },
            ),
            (
                FeasibleSet::BlockBalls {
                    blocks: 1,
                    block_dim: 3,
                    radius: 1.0,
                    nonneg: true,
                },
                NonsmoothTerm::Zero,
            ),
        ];
        for (set, h) in &pairs {
            for _ in 0..100 {
                let alpha = 0.2 + 3.0 * rng.random::<f64>();
                let v = Array1::from_shape_fn(set.dim(), |_| 4.0 * rng.random::<f64>() - 2.0);
                let fast = set.composite_prox(alpha, &v.view(), h).unwrap();
                let slow = composite_prox_bruteforce(h, set, alpha, &v.view(), 200_000).unwrap();
                let diff = (&fast - &slow)
                    .mapv(f64::abs)
                    .iter()
                    .cloned()
                    .fold(0.0, f64::max);
                assert!(
                    diff <= 1e-6,
                    "composite prox mismatch {diff:.2e} for {set:?} / {h:?} at alpha={alpha}"
                );
            }
        }
    }

    #[test]
    fn composite_prox_output_is_feasible_and_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let set = FeasibleSet::BlockBalls {
            blocks: 2,
            block_dim: 3,
            radius: 1.0,
            nonneg: false,
        };
        for _ in 0..50 {
            let v = Array1::from_shape_fn(6, |_| 6.0 * rng.random::<f64>() - 3.0);
            let h = NonsmoothTerm::L1 { weight: 0.1 };
            let out = set.composite_prox(1.3, &v.view(), &h).unwrap();
            assert!(set.contains(&out.view(), 1e-12));
            let again = set
                .composite_prox(1.3, &out.view(), &NonsmoothTerm::Zero)
                .unwrap();
            let diff = (&again - &out).mapv(f64::abs).sum();
            assert!(diff < 1e-12, "projection not idempotent: {diff}");
        }
    }

    #[test]
    fn quadratic_oracle_unbiased() {
        let q = array![[1.0, 0.2], [0.2, 2.0]];
        let oracle = QuadraticOracle::new(q, 0.5, 10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let x = Array1::from_shape_fn(2, |_| 2.0 * rng.random::<f64>() - 1.0);
            let exact = oracle.exact_value(x.view()).unwrap();
            let n = 100_000usize;
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..n {
                let val = oracle.query(x.view(), rng.random());
                sum += val;
                sumsq += val * val;
            }
            let mean = sum / n as f64;
            let sd = (sumsq / n as f64 - mean * mean).sqrt();
            let band = 4.0 * sd / (n as f64).sqrt();
            assert!(
                (mean - exact).abs() <= band,
                "oracle mean {mean} vs exact {exact}, band {band}"
            );
        }
    }

    #[test]
    fn nonsmooth_convexity_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = NonsmoothTerm::L1 { weight: 0.8 };
        for _ in 0..200 {
            let a = Array1::from_shape_fn(4, |_| 4.0 * rng.random::<f64>() - 2.0);
            let b = Array1::from_shape_fn(4, |_| 4.0 * rng.random::<f64>() - 2.0);
            let mid = (&a + &b) / 2.0;
            assert!(
                h.evaluate(&mid.view())
                    <= 0.5 * (h.evaluate(&a.view()) + h.evaluate(&b.view())) + 1e-12
            );
        }
    }

    #[test]
    fn prox_beats_random_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = NonsmoothTerm::L1 { weight: 0.5 };
        let alpha = 1.7;
        let v = array![0.9, -0.1, 2.0];
        let z = h.prox(alpha, &v.view());
        let objective = |p: &ArrayView1<f64>| {
            let d = &v - p;
            0.5 * alpha * d.dot(&d) + h.evaluate(p)
        };
        let base = objective(&z.view());
        for _ in 0..100 {
            let noise = Array1::from_shape_fn(3, |_| 0.2 * (rng.random::<f64>() - 0.5));
            let candidate = &z + &noise;
            assert!(objective(&candidate.view()) >= base - 1e-12);
        }
    }

    proptest! {
        #[test]
        fn prop_projection_feasible(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set = FeasibleSet::BlockBalls { blocks: 2, block_dim: 2, radius: 1.0, nonneg: seed % 2 == 0 };
            let v = Array1::from_shape_fn(4, |_| 8.0 * rng.random::<f64>() - 4.0);
            let p = set.project(&v.view());
            prop_assert!(set.contains(&p.view(), 1e-12));
        }

        #[test]
        fn prop_soft_threshold_shrinks(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = Array1::from_shape_fn(5, |_| 4.0 * rng.random::<f64>() - 2.0);
            let t = rng.random::<f64>();
            let s = soft_threshold(&v.view(), t);
            for i in 0..5 {
                prop_assert!(s[i].abs() <= v[i].abs() + 1e-15);
                prop_assert!(s[i] * v[i] >= 0.0);
            }
        }
    }
}
