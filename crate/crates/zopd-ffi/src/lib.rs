//! C ABI over the zopd solvers.
//!
//! Conventions: every function returns a [`ZopdStatus`]; results come back
//! through out-pointers. Instances and run outputs are opaque handles freed
//! with their `_free` function. Optional metric columns are encoded as NaN.
//! Panics never cross the boundary (they convert to
//! `ZOPD_STATUS_INTERNAL_ERROR`).

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use zopd::baselines::{run_baseline, BaselineParams};
use zopd::diagnostics::DiagnosticsLevel;
use zopd::pca::{self, PcaConfig, PcaInstance};
use zopd::solver::{self, validate_params, RunOptions, RunOutput, ScalingMode, SolverParams};

/// Status code returned by every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZopdStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidParameter = 2,
    SolverFailure = 3,
    BufferTooSmall = 4,
    InvalidUtf8 = 5,
    IoError = 6,
    IndexOutOfRange = 7,
    InternalError = 8,
}

/// Opaque benchmark instance handle.
pub struct ZopdInstance {
    inner: PcaInstance,
}

/// Opaque run-output handle.
pub struct ZopdRun {
    inner: RunOutput,
}

/// Scaling-matrix mode of the primal proximal term.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZopdScaling {
    ClosedForm = 0,
    IdentityComplement = 1,
}

/// Baseline selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZopdBaseline {
    Rgf = 0,
    ZoSgd = 1,
}

/// Diagnostics level for runs.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZopdDiagnostics {
    Basic = 0,
    Full = 1,
}

/// Solver parameters (plain data; see the library docs for the conditions
/// the validator checks).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ZopdSolverParams {
    pub rho: f64,
    pub gamma: f64,
    pub beta: f64,
    pub mu: f64,
    /// Oracle-call pairs per iteration (J).
    pub samples: u64,
    /// Outer iterations (R).
    pub iterations: u64,
    pub scaling: ZopdScaling,
    /// Run even when the convergence conditions are violated.
    pub force: bool,
}

/// One per-iteration metric record. Optional quantities are NaN when the
/// run did not compute them.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ZopdMetricRow {
    pub iteration: u64,
    pub psi: f64,
    pub psi_mu: f64,
    pub constraint_violation: f64,
    pub q: f64,
    pub q_tilde: f64,
    pub primal_step: f64,
    pub dual_step: f64,
    pub oracle_calls: u64,
    pub wall_ms: f64,
}

fn to_params(p: &ZopdSolverParams) -> Result<SolverParams, ZopdStatus> {
    let scaling = match p.scaling {
        ZopdScaling::ClosedForm => ScalingMode::ClosedForm,
        ZopdScaling::IdentityComplement => ScalingMode::IdentityComplement,
    };
    SolverParams::new(
        p.rho,
        p.gamma,
        p.beta,
        p.mu,
        p.samples as usize,
        p.iterations as usize,
        scaling,
    )
    .map_err(|_| ZopdStatus::InvalidParameter)
}

fn guard<F: FnOnce() -> ZopdStatus>(f: F) -> ZopdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => ZopdStatus::InternalError,
    }
}

unsafe fn cstr_to_path<'a>(ptr: *const c_char) -> Result<&'a Path, ZopdStatus> {
    if ptr.is_null() {
        return Err(ZopdStatus::NullArgument);
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map(Path::new)
        .map_err(|_| ZopdStatus::InvalidUtf8)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn zopd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn zopd_status_message(status: ZopdStatus) -> *const c_char {
    let msg: &'static str = match status {
        ZopdStatus::Ok => "ok\0",
        ZopdStatus::NullArgument => "null argument\0",
        ZopdStatus::InvalidParameter => "invalid parameter\0",
        ZopdStatus::SolverFailure => "solver failure\0",
        ZopdStatus::BufferTooSmall => "buffer too small\0",
        ZopdStatus::InvalidUtf8 => "invalid utf-8\0",
        ZopdStatus::IoError => "i/o error\0",
        ZopdStatus::IndexOutOfRange => "index out of range\0",
        ZopdStatus::InternalError => "internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// Generates a networked sparse-PCA benchmark instance.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn zopd_pca_generate(
    n_agents: u64,
    n_edges: u64,
    dim: u64,
    batch: u64,
    l1_weight: f64,
    noise_sd: f64,
    nonneg: bool,
    seed: u64,
    out: *mut *mut ZopdInstance,
) -> ZopdStatus {
    if out.is_null() {
        return ZopdStatus::NullArgument;
    }
    guard(|| {
        let config = PcaConfig {
            n_agents: n_agents as usize,
            n_edges: n_edges as usize,
            dim: dim as usize,
            batch: batch as usize,
            l1_weight,
            noise_sd,
            nonneg,
        };
        match pca::generate_instance(&config, seed) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ZopdInstance { inner }));
                ZopdStatus::Ok
            }
            Err(_) => ZopdStatus::InvalidParameter,
        }
    })
}

/// Writes the instance to a JSON file that rebuilds it exactly.
///
/// # Safety
/// `instance` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn zopd_pca_save_json(
    instance: *const ZopdInstance,
    path: *const c_char,
) -> ZopdStatus {
    if instance.is_null() {
        return ZopdStatus::NullArgument;
    }
    let path = match cstr_to_path(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    guard(|| match (*instance).inner.save_json(path) {
        Ok(()) => ZopdStatus::Ok,
        Err(_) => ZopdStatus::IoError,
    })
}

/// Loads an instance previously written by `zopd_pca_save_json`.
///
/// # Safety
/// `path` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zopd_pca_load_json(
    path: *const c_char,
    out: *mut *mut ZopdInstance,
) -> ZopdStatus {
    if out.is_null() {
        return ZopdStatus::NullArgument;
    }
    let path = match cstr_to_path(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    guard(|| match PcaInstance::load_json(path) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(ZopdInstance { inner }));
            ZopdStatus::Ok
        }
        Err(_) => ZopdStatus::IoError,
    })
}

/// Total stacked dimension of the instance's decision variable.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zopd_instance_dimension(
    instance: *const ZopdInstance,
    out: *mut u64,
) -> ZopdStatus {
    if instance.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    *out = (*instance).inner.dimension() as u64;
    ZopdStatus::Ok
}

/// Gradient Lipschitz constant of the instance's smooth part.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zopd_instance_smoothness(
    instance: *const ZopdInstance,
    out: *mut f64,
) -> ZopdStatus {
    if instance.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    *out = (*instance).inner.smoothness();
    ZopdStatus::Ok
}

/// Frees an instance handle (accepts NULL).
///
/// # Safety
/// `instance` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn zopd_instance_free(instance: *mut ZopdInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Fills `out` with parameters satisfying every validated convergence
/// condition for this instance (batch schedule J = R, smoothing 1/sqrt(R)).
/// `alpha0` is the target product rho*gamma in (0.4385, 1).
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zopd_params_recommended(
    instance: *const ZopdInstance,
    alpha0: f64,
    iterations: u64,
    out: *mut ZopdSolverParams,
) -> ZopdStatus {
    if instance.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    guard(|| {
        let l = (*instance).inner.smoothness();
        match SolverParams::theory_preset(l, alpha0, iterations as usize) {
            Ok(p) => {
                *out = ZopdSolverParams {
                    rho: p.rho,
                    gamma: p.gamma,
                    beta: p.beta,
                    mu: p.mu,
                    samples: p.samples as u64,
                    iterations: p.iterations as u64,
                    scaling: ZopdScaling::ClosedForm,
                    force: false,
                };
                ZopdStatus::Ok
            }
            Err(_) => ZopdStatus::InvalidParameter,
        }
    })
}

/// Counts violated convergence conditions for the given smoothness constant
/// and, when `buf` is non-NULL, writes a NUL-terminated newline-separated
/// description (truncated to `buf_len`).
///
/// # Safety
/// `params` and `out_count` must be valid; `buf`, when non-NULL, must hold
/// `buf_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn zopd_params_validate(
    params: *const ZopdSolverParams,
    smoothness: f64,
    buf: *mut c_char,
    buf_len: usize,
    out_count: *mut u64,
) -> ZopdStatus {
    if params.is_null() || out_count.is_null() {
        return ZopdStatus::NullArgument;
    }
    guard(|| {
        let parsed = match to_params(&*params) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let violations = validate_params(&parsed, smoothness);
        *out_count = violations.len() as u64;
        if !buf.is_null() && buf_len > 0 {
            let text = violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            let bytes = text.as_bytes();
            let n = bytes.len().min(buf_len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
            if bytes.len() + 1 > buf_len {
                return ZopdStatus::BufferTooSmall;
            }
        }
        ZopdStatus::Ok
    })
}

/// Runs PZO-PDA on the instance.
///
/// # Safety
/// `instance` and `params` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_pzo_pda(
    instance: *const ZopdInstance,
    params: *const ZopdSolverParams,
    master_seed: u64,
    diagnostics: ZopdDiagnostics,
    out: *mut *mut ZopdRun,
) -> ZopdStatus {
    if instance.is_null() || params.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    guard(|| {
        let parsed = match to_params(&*params) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let options = RunOptions {
            force: (*params).force,
            diagnostics: match diagnostics {
                ZopdDiagnostics::Basic => DiagnosticsLevel::Basic,
                ZopdDiagnostics::Full => DiagnosticsLevel::Full,
            },
        };
        match solver::run(
            &(*instance).inner.problem,
            &parsed,
            master_seed,
            &options,
            |_| {},
        ) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ZopdRun { inner }));
                ZopdStatus::Ok
            }
            Err(_) => ZopdStatus::SolverFailure,
        }
    })
}

/// Runs a baseline solver. `mu <= 0` selects the default `1/sqrt(R)`;
/// `samples == 0` selects the variant default (1 for RGF, R for ZO-SGD).
///
/// # Safety
/// `instance` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_baseline(
    instance: *const ZopdInstance,
    variant: ZopdBaseline,
    mu: f64,
    samples: u64,
    iterations: u64,
    master_seed: u64,
    out: *mut *mut ZopdRun,
) -> ZopdStatus {
    if instance.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    guard(|| {
        let r = iterations as usize;
        let mu = if mu > 0.0 {
            mu
        } else {
            1.0 / (r.max(1) as f64).sqrt()
        };
        let mut params = match variant {
            ZopdBaseline::Rgf => BaselineParams::rgf(mu, r),
            ZopdBaseline::ZoSgd => BaselineParams::zo_sgd(mu, r.max(1), r),
        };
        if samples > 0 {
            params.samples = samples as usize;
        }
        match run_baseline(
            &(*instance).inner.problem,
            &params,
            master_seed,
            DiagnosticsLevel::Basic,
            |_| {},
        ) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(ZopdRun { inner }));
                ZopdStatus::Ok
            }
            Err(_) => ZopdStatus::SolverFailure,
        }
    })
}

/// Number of metric rows (completed iterations).
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_row_count(run: *const ZopdRun, out: *mut u64) -> ZopdStatus {
    if run.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    *out = (*run).inner.trajectory.len() as u64;
    ZopdStatus::Ok
}

/// Copies metric row `index` into `out`.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_metric_row(
    run: *const ZopdRun,
    index: u64,
    out: *mut ZopdMetricRow,
) -> ZopdStatus {
    if run.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    let rows = &(*run).inner.trajectory;
    let Some(row) = rows.get(index as usize) else {
        return ZopdStatus::IndexOutOfRange;
    };
    *out = ZopdMetricRow {
        iteration: row.iteration as u64,
        psi: row.optimality_gap,
        psi_mu: row.smoothed_gap.unwrap_or(f64::NAN),
        constraint_violation: row.constraint_violation,
        q: row.potential.unwrap_or(f64::NAN),
        q_tilde: row.shifted_potential.unwrap_or(f64::NAN),
        primal_step: row.primal_step_sq,
        dual_step: row.dual_step_sq,
        oracle_calls: row.oracle_calls,
        wall_ms: row.wall_ms,
    };
    ZopdStatus::Ok
}

/// Index of the uniformly sampled output iterate.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_sampled_index(run: *const ZopdRun, out: *mut u64) -> ZopdStatus {
    if run.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    *out = (*run).inner.sampled_index as u64;
    ZopdStatus::Ok
}

/// Length of the iterate vectors.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_iterate_len(run: *const ZopdRun, out: *mut u64) -> ZopdStatus {
    if run.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    *out = (*run).inner.sampled_iterate.len() as u64;
    ZopdStatus::Ok
}

unsafe fn copy_vector(v: &ndarray::Array1<f64>, buf: *mut f64, len: u64) -> ZopdStatus {
    if buf.is_null() {
        return ZopdStatus::NullArgument;
    }
    if (len as usize) < v.len() {
        return ZopdStatus::BufferTooSmall;
    }
    for (i, &x) in v.iter().enumerate() {
        *buf.add(i) = x;
    }
    ZopdStatus::Ok
}

/// Copies the uniformly sampled iterate into `buf`.
///
/// # Safety
/// `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_sampled_iterate(
    run: *const ZopdRun,
    buf: *mut f64,
    len: u64,
) -> ZopdStatus {
    if run.is_null() {
        return ZopdStatus::NullArgument;
    }
    copy_vector(&(*run).inner.sampled_iterate, buf, len)
}

/// Copies the final iterate into `buf`.
///
/// # Safety
/// `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_final_iterate(
    run: *const ZopdRun,
    buf: *mut f64,
    len: u64,
) -> ZopdStatus {
    if run.is_null() {
        return ZopdStatus::NullArgument;
    }
    copy_vector(&(*run).inner.final_state.x_curr, buf, len)
}

/// Total oracle calls the run consumed (2·J per iteration).
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_total_oracle_calls(
    run: *const ZopdRun,
    out: *mut u64,
) -> ZopdStatus {
    if run.is_null() || out.is_null() {
        return ZopdStatus::NullArgument;
    }
    *out = (*run).inner.total_oracle_calls;
    ZopdStatus::Ok
}

/// Frees a run handle (accepts NULL).
///
/// # Safety
/// `run` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn zopd_run_free(run: *mut ZopdRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
