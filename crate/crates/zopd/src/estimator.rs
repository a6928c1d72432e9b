//! Zeroth-order gradient estimation by finite differences along random
//! unit directions.
//!
//! The estimator approximates the gradient of the ball-smoothed function
//! `f_μ(x) = E[f(x + μu)]` (u uniform in the unit ball) from value queries
//! only:
//!
//! ```text
//! G_μ(x, v, ξ) = (N/μ) (F(x + μv, ξ) − F(x, ξ)) v
//! ```
//!
//! with `v` uniform on the unit *sphere* (the pairing under which
//! `E[G_μ] = ∇f_μ` holds exactly) and the same noise seed `ξ` for both
//! oracle calls, so additive value noise cancels. Batches of `J` independent
//! estimates are averaged into `Ḡ_μ` to cut the variance by `1/J`.

use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::SmoothOracle;

/// Smoothing radius and per-estimate batch size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    /// Smoothing radius `μ > 0`.
    pub mu: f64,
    /// Number of (direction, seed) pairs averaged per estimate (`J ≥ 1`).
    pub samples: usize,
}

impl SmoothingConfig {
    pub fn new(mu: f64, samples: usize) -> Result<Self> {
        let cfg = Self { mu, samples };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::Parameter(format!(
                "smoothing radius must be positive, got {}",
                self.mu
            )));
        }
        if self.samples == 0 {
            return Err(Error::Parameter("batch size must be at least 1".into()));
        }
        Ok(())
    }
}

/// A batch-averaged zeroth-order gradient estimate with enough sampling
/// metadata to reproduce it bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientEstimate {
    /// `Ḡ_μ`, the mean of the batch.
    pub value: Array1<f64>,
    pub mu: f64,
    pub samples: usize,
    /// Seed of the RNG stream that produced the batch.
    pub seed: u64,
}

/// One direction drawn uniformly from the unit sphere in `ℝⁿ`
/// (normalized Gaussian; degenerate draws are redrawn).
pub fn sample_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Array1<f64> {
    assert!(n >= 1);
    loop {
        let v: Array1<f64> = Array1::from_shape_fn(n, |_| rng.sample(StandardNormal));
        let norm = v.dot(&v).sqrt();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Single two-point estimate `(N/μ)(F(x+μv, ξ) − F(x, ξ)) v`.
///
/// Both oracle calls share the noise seed `ξ`.
pub fn estimate_single(
    oracle: &dyn SmoothOracle,
    x: &ArrayView1<f64>,
    direction: &ArrayView1<f64>,
    noise_seed: u64,
    mu: f64,
) -> Result<Array1<f64>> {
    let n = oracle.dimension();
    if x.len() != n || direction.len() != n {
        return Err(Error::DimensionMismatch {
            context: "gradient estimate input",
            expected: n,
            actual: x.len().min(direction.len()),
        });
    }
    let shifted = x.to_owned() + &(mu * direction.to_owned());
    let forward = oracle.query(shifted.view(), noise_seed);
    let base = oracle.query(*x, noise_seed);
    let coeff = (n as f64 / mu) * (forward - base);
    if !coeff.is_finite() {
        return Err(Error::NonFiniteOracleValue);
    }
    Ok(coeff * direction.to_owned())
}

/// Mean of `config.samples` independent single estimates, each with a fresh
/// direction and noise seed drawn from a ChaCha stream seeded by `seed`.
pub fn estimate_batch(
    oracle: &dyn SmoothOracle,
    x: &ArrayView1<f64>,
    config: &SmoothingConfig,
    seed: u64,
) -> Result<GradientEstimate> {
    config.validate()?;
    let n = oracle.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = Array1::<f64>::zeros(n);
    for _ in 0..config.samples {
        let v = sample_direction(&mut rng, n);
        let xi: u64 = rng.random();
        acc += &estimate_single(oracle, x, &v.view(), xi, config.mu)?;
    }
    acc /= config.samples as f64;
    Ok(GradientEstimate {
        value: acc,
        mu: config.mu,
        samples: config.samples,
        seed,
    })
}

/// Exact ball-smoothed value of `f(x) = xᵀQx`:
/// `f_μ(x) = xᵀQx + μ² tr(Q)/(N+2)`, from `E[uuᵀ] = I/(N+2)` under the
/// uniform ball distribution.
pub fn smoothed_value_analytic_quadratic(
    q: &ArrayView2<f64>,
    x: &ArrayView1<f64>,
    mu: f64,
) -> Result<f64> {
    if q.nrows() != q.ncols() || q.nrows() != x.len() {
        return Err(Error::DimensionMismatch {
            context: "analytic smoothed value",
            expected: x.len(),
            actual: q.nrows(),
        });
    }
    if crate::linalg::asymmetry(q) > 1e-10 {
        return Err(Error::Parameter(
            "analytic smoothed value requires a symmetric matrix".into(),
        ));
    }
    let n = x.len() as f64;
    let trace = q.diag().sum();
    Ok(x.dot(&q.dot(x)) + mu * mu * trace / (n + 2.0))
}

/// Variance bound `σ̃²/J` of the batch estimator, with
/// `σ̃² = 2N [K² + σ² + μ²L²N]`.
pub fn variance_bound(k: f64, sigma: f64, mu: f64, l: f64, n: usize, j: usize) -> f64 {
    assert!(j >= 1);
    let nf = n as f64;
    2.0 * nf * (k * k + sigma * sigma + mu * mu * l * l * nf) / j as f64
}

/// Monte-Carlo estimate of `f_μ(x)` by uniform ball sampling; returns the
/// sample mean and its standard error. Uses the exact value when the oracle
/// exposes one, otherwise noisy queries (both are unbiased for `f_μ`).
pub fn smoothed_value_monte_carlo(
    oracle: &dyn SmoothOracle,
    x: &ArrayView1<f64>,
    mu: f64,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let n = oracle.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..samples {
        let dir = sample_direction(&mut rng, n);
        let radius = rng.random::<f64>().powf(1.0 / n as f64);
        let point = x.to_owned() + &(mu * radius * dir);
        let value = match oracle.exact_value(point.view()) {
            Some(v) => v,
            None => oracle.query(point.view(), rng.random()),
        };
        sum += value;
        sumsq += value * value;
    }
    let mean = sum / samples as f64;
    let var = (sumsq / samples as f64 - mean * mean).max(0.0);
    (mean, (var / samples as f64).sqrt())
}

/// Deterministic derivation of per-purpose RNG seeds from a master seed
/// (SplitMix64 mixing). Stable across platforms and releases.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = splitmix64(z);
    z ^= index.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    splitmix64(z)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
