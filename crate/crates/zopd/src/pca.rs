//! Networked sparse-PCA benchmark generator.
//!
//! Builds a connected multi-agent network where agent `i` holds a data Gram
//! `Z_i = M_iᵀ M_i` and a local variable `x_i ∈ ℝᵈ`, and the agents minimize
//!
//! ```text
//! Σᵢ −⟨x_i, Z_i x_i⟩ + α‖x_i‖₁    s.t.  x_i = x_j on every edge, ‖x_i‖ ≤ 1
//! ```
//!
//! The consensus constraint is expressed as `Ax = 0` with one signed
//! identity-block pair per edge. The objective is nonconvex (each `−Z_i` is
//! negative semidefinite) and the oracle adds Gaussian value noise, which is
//! the regime the zeroth-order solvers are built for.

use std::path::Path;
use std::sync::Arc;

use ndarray::{s, Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{
    project_ball, soft_threshold, FeasibleSet, LinearConstraint, NonsmoothTerm, ProblemInstance,
    SmoothOracle,
};

/// Undirected connected graph over the agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTopology {
    pub n_agents: usize,
    /// Unordered pairs `(i, j)` with `i < j`, no duplicates or self-loops.
    pub edges: Vec<(usize, usize)>,
}

impl NetworkTopology {
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &self.edges {
            if i >= self.n_agents || j >= self.n_agents {
                return Err(Error::Parameter(format!("edge ({i},{j}) out of range")));
            }
            if i == j {
                return Err(Error::Parameter(format!("self-loop at agent {i}")));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::Parameter(format!("duplicate edge ({i},{j})")));
            }
        }
        if !self.is_connected() {
            return Err(Error::Parameter("topology is not connected".into()));
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        if self.n_agents == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.n_agents];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut seen = vec![false; self.n_agents];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Consensus matrix: for edge `k = (i, j)`, rows `kd..(k+1)d` carry `+I_d`
    /// at block `i` and `−I_d` at block `j`, so `Ax = 0` iff all blocks agree.
    pub fn consensus_matrix(&self, block_dim: usize) -> Array2<f64> {
        let rows = self.edges.len() * block_dim;
        let cols = self.n_agents * block_dim;
        let mut a = Array2::zeros((rows, cols));
        for (k, &(i, j)) in self.edges.iter().enumerate() {
            for t in 0..block_dim {
                a[[k * block_dim + t, i * block_dim + t]] = 1.0;
                a[[k * block_dim + t, j * block_dim + t]] = -1.0;
            }
        }
        a
    }
}

/// Generation parameters for a benchmark instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaConfig {
    pub n_agents: usize,
    pub n_edges: usize,
    /// Per-agent variable dimension `d`.
    pub dim: usize,
    /// Measurements per agent `p` (rows of `M_i`).
    pub batch: usize,
    /// ℓ1 regularization weight `α`.
    pub l1_weight: f64,
    /// Standard deviation of the additive Gaussian value noise.
    pub noise_sd: f64,
    /// Restrict each block to the nonnegative part of the unit ball.
    #[serde(default)]
    pub nonneg: bool,
}

impl Default for PcaConfig {
    fn default() -> Self {
        Self {
            n_agents: 10,
            n_edges: 27,
            dim: 10,
            batch: 100,
            l1_weight: 1e-4,
            noise_sd: 0.01,
            nonneg: false,
        }
    }
}

/// Oracle for `f(x) = Σᵢ −x_iᵀ Z_i x_i` with additive Gaussian value noise.
pub struct PcaOracle {
    z_blocks: Vec<Array2<f64>>,
    dim: usize,
    noise_sd: f64,
    smoothness: f64,
    gradient_bound: f64,
    trace: f64,
}

impl PcaOracle {
    fn new(z_blocks: Vec<Array2<f64>>, dim: usize, noise_sd: f64) -> Self {
        let max_spectral = z_blocks
            .iter()
            .map(|z| linalg::max_eigenvalue(&z.view()).max(0.0))
            .fold(0.0f64, f64::max);
        let n_agents = z_blocks.len();
        let trace: f64 = z_blocks.iter().map(|z| z.diag().sum()).sum();
        Self {
            z_blocks,
            dim,
            noise_sd,
            smoothness: 2.0 * max_spectral,
            // ‖∇f‖² = Σ‖2Z_i x_i‖² ≤ n (2 max σ)² on the unit balls.
            gradient_bound: 2.0 * max_spectral * (n_agents as f64).sqrt(),
            trace,
        }
    }
}

impl SmoothOracle for PcaOracle {
    fn dimension(&self) -> usize {
        self.z_blocks.len() * self.dim
    }

    fn query(&self, x: ArrayView1<f64>, noise_seed: u64) -> f64 {
        let clean = self.exact_value(x).unwrap();
        if self.noise_sd == 0.0 {
            return clean;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
        let z: f64 = rng.sample(StandardNormal);
        clean + self.noise_sd * z
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn gradient_bound(&self) -> f64 {
        self.gradient_bound
    }

    fn noise_variance(&self) -> f64 {
        // Additive value noise does not perturb the gradient.
        0.0
    }

    fn exact_value(&self, x: ArrayView1<f64>) -> Option<f64> {
        Some(objective_and_gradient_blocks(&self.z_blocks, self.dim, &x).0)
    }

    fn exact_gradient(&self, x: ArrayView1<f64>) -> Option<Array1<f64>> {
        Some(objective_and_gradient_blocks(&self.z_blocks, self.dim, &x).1)
    }

    fn smoothed_value(&self, x: ArrayView1<f64>, mu: f64) -> Option<f64> {
        // f is a quadratic form with block-diagonal matrix −diag(Z_i); its
        // ball smoothing only shifts the value by μ²·tr/(N+2).
        let n = self.dimension() as f64;
        Some(self.exact_value(x)? + mu * mu * (-self.trace) / (n + 2.0))
    }

    fn smoothed_gradient(&self, x: ArrayView1<f64>, _mu: f64) -> Option<Array1<f64>> {
        self.exact_gradient(x)
    }
}

fn objective_and_gradient_blocks(
    z_blocks: &[Array2<f64>],
    dim: usize,
    x: &ArrayView1<f64>,
) -> (f64, Array1<f64>) {
    let mut value = 0.0;
    let mut grad = Array1::zeros(x.len());
    for (i, z) in z_blocks.iter().enumerate() {
        let xi = x.slice(s![i * dim..(i + 1) * dim]);
        let zx = z.dot(&xi);
        value -= xi.dot(&zx);
        grad.slice_mut(s![i * dim..(i + 1) * dim])
            .assign(&(-2.0 * zx));
    }
    (value, grad)
}

/// A generated benchmark instance, ready to be handed to any solver.
pub struct PcaInstance {
    pub config: PcaConfig,
    pub seed: u64,
    pub topology: NetworkTopology,
    /// Per-agent measurement matrices `M_i` (`batch × dim`).
    pub measurements: Vec<Array2<f64>>,
    /// Cached Grams `Z_i = M_iᵀ M_i`.
    pub z_blocks: Vec<Array2<f64>>,
    pub problem: ProblemInstance,
}

impl PcaInstance {
    pub fn dimension(&self) -> usize {
        self.config.n_agents * self.config.dim
    }

    /// `f(x)` and `∇f(x)` (block `i` is `−2 Z_i x_i`).
    pub fn exact_objective_and_gradient(&self, x: &ArrayView1<f64>) -> (f64, Array1<f64>) {
        objective_and_gradient_blocks(&self.z_blocks, self.config.dim, x)
    }

    pub fn smoothness(&self) -> f64 {
        self.problem.oracle.smoothness()
    }

    pub fn gradient_bound(&self) -> f64 {
        self.problem.oracle.gradient_bound()
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = PcaInstanceFile::from_instance(self);
        let text = serde_json::to_string_pretty(&file)?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: PcaInstanceFile = serde_json::from_str(&text)?;
        file.into_instance()
    }
}

/// Generates the benchmark: a connected random graph (spanning tree plus
/// uniformly chosen extra edges), `M_i ~ U(0,1)` entrywise, `Z_i = M_iᵀM_i`,
/// the consensus constraint `Ax = 0`, and `x⁰ ~ U(0,1)` entrywise.
pub fn generate_instance(config: &PcaConfig, seed: u64) -> Result<PcaInstance> {
    let n = config.n_agents;
    if n < 2 {
        return Err(Error::Parameter("need at least two agents".into()));
    }
    if config.dim == 0 || config.batch == 0 {
        return Err(Error::Parameter("dim and batch must be positive".into()));
    }
    let max_edges = n * (n - 1) / 2;
    if config.n_edges < n - 1 || config.n_edges > max_edges {
        return Err(Error::Parameter(format!(
            "edge count {} outside [{}, {}] for {} agents",
            config.n_edges,
            n - 1,
            max_edges,
            n
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Spanning tree: attach each new agent to a uniformly chosen earlier one.
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(config.n_edges);
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u.min(v), u.max(v)));
    }
    // Extra edges drawn without replacement from the remaining pairs.
    let mut pool: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|e| !edges.contains(e))
        .collect();
    for _ in 0..(config.n_edges - (n - 1)) {
        let k = rng.random_range(0..pool.len());
        edges.push(pool.swap_remove(k));
    }
    let topology = NetworkTopology { n_agents: n, edges };
    topology.validate()?;

    let mut measurements = Vec::with_capacity(n);
    for _ in 0..n {
        measurements.push(Array2::from_shape_fn((config.batch, config.dim), |_| {
            rng.random::<f64>()
        }));
    }
    let x0 = Array1::from_shape_fn(n * config.dim, |_| rng.random::<f64>());

    build_instance(config.clone(), seed, topology, measurements, x0)
}

fn build_instance(
    config: PcaConfig,
    seed: u64,
    topology: NetworkTopology,
    measurements: Vec<Array2<f64>>,
    x0: Array1<f64>,
) -> Result<PcaInstance> {
    let z_blocks: Vec<Array2<f64>> = measurements
        .iter()
        .map(|m| linalg::gram(&m.view()))
        .collect();
    let a = topology.consensus_matrix(config.dim);
    let constraint = LinearConstraint::new(a, Array1::zeros(topology.edges.len() * config.dim))?;
    let oracle = Arc::new(PcaOracle::new(
        z_blocks.clone(),
        config.dim,
        config.noise_sd,
    ));
    let problem = ProblemInstance::new(
        oracle,
        NonsmoothTerm::L1 {
            weight: config.l1_weight,
        },
        FeasibleSet::BlockBalls {
            blocks: config.n_agents,
            block_dim: config.dim,
            radius: 1.0,
            nonneg: config.nonneg,
        },
        constraint,
        x0,
    )?;
    Ok(PcaInstance {
        config,
        seed,
        topology,
        measurements,
        z_blocks,
        problem,
    })
}

/// Per-block composite prox for the benchmark's nonsmooth structure:
/// minimizer of `(scale/2)‖v−z‖² + l1_weight‖z‖₁ + ι_{‖z‖≤1}(z)`,
/// computed as a soft-threshold at `l1_weight/scale` followed by projection
/// onto the unit ball.
pub fn composite_prox_l1_ball(l1_weight: f64, scale: f64, v: &ArrayView1<f64>) -> Array1<f64> {
    assert!(scale > 0.0);
    let shrunk = soft_threshold(v, l1_weight / scale);
    project_ball(&shrunk.view(), 1.0)
}

/// On-disk form of an instance: everything needed to rebuild it bit-exactly
/// (matrices stored row-major as decimal text via JSON numbers, which
/// round-trip f64 exactly).
#[derive(Debug, Serialize, Deserialize)]
pub struct PcaInstanceFile {
    pub seed: u64,
    pub config: PcaConfig,
    pub edges: Vec<(usize, usize)>,
    pub measurements: Vec<Vec<f64>>,
    pub initial_point: Vec<f64>,
}

impl PcaInstanceFile {
    pub fn from_instance(inst: &PcaInstance) -> Self {
        Self {
            seed: inst.seed,
            config: inst.config.clone(),
            edges: inst.topology.edges.clone(),
            measurements: inst
                .measurements
                .iter()
                .map(|m| m.iter().copied().collect())
                .collect(),
            initial_point: inst.problem.initial_point.to_vec(),
        }
    }

    pub fn into_instance(self) -> Result<PcaInstance> {
        let topology = NetworkTopology {
            n_agents: self.config.n_agents,
            edges: self.edges,
        };
        topology.validate()?;
        let mut measurements = Vec::with_capacity(self.measurements.len());
        for flat in &self.measurements {
            let m = Array2::from_shape_vec((self.config.batch, self.config.dim), flat.clone())
                .map_err(|_| Error::Parameter("measurement matrix shape mismatch".into()))?;
            measurements.push(m);
        }
        if measurements.len() != self.config.n_agents {
            return Err(Error::Parameter(
                "wrong number of measurement matrices".into(),
            ));
        }
        let x0 = Array1::from_vec(self.initial_point);
        build_instance(self.config, self.seed, topology, measurements, x0)
    }
}
