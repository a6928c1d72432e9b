/* C interface for the zopd zeroth-order primal-dual solvers. */

#ifndef ZOPD_H
#define ZOPD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every API call.
typedef enum ZopdStatus {
  ZOPD_STATUS_OK = 0,
  ZOPD_STATUS_NULL_ARGUMENT = 1,
  ZOPD_STATUS_INVALID_PARAMETER = 2,
  ZOPD_STATUS_SOLVER_FAILURE = 3,
  ZOPD_STATUS_BUFFER_TOO_SMALL = 4,
  ZOPD_STATUS_INVALID_UTF8 = 5,
  ZOPD_STATUS_IO_ERROR = 6,
  ZOPD_STATUS_INDEX_OUT_OF_RANGE = 7,
  ZOPD_STATUS_INTERNAL_ERROR = 8,
} ZopdStatus;

// Scaling-matrix mode of the primal proximal term.
typedef enum ZopdScaling {
  ZOPD_SCALING_CLOSED_FORM = 0,
  ZOPD_SCALING_IDENTITY_COMPLEMENT = 1,
} ZopdScaling;

// Diagnostics level for runs.
typedef enum ZopdDiagnostics {
  ZOPD_DIAGNOSTICS_BASIC = 0,
  ZOPD_DIAGNOSTICS_FULL = 1,
} ZopdDiagnostics;

// Baseline selector.
typedef enum ZopdBaseline {
  ZOPD_BASELINE_RGF = 0,
  ZOPD_BASELINE_ZO_SGD = 1,
} ZopdBaseline;

// Opaque benchmark instance handle.
typedef struct ZopdInstance ZopdInstance;

// Opaque run-output handle.
typedef struct ZopdRun ZopdRun;

// Solver parameters (plain data; see the library docs for the conditions
// the validator checks).
typedef struct ZopdSolverParams {
  double rho;
  double gamma;
  double beta;
  double mu;
  // Oracle-call pairs per iteration (J).
  uint64_t samples;
  // Outer iterations (R).
  uint64_t iterations;
  enum ZopdScaling scaling;
  // Run even when the convergence conditions are violated.
  bool force;
} ZopdSolverParams;

// One per-iteration metric record. Optional quantities are NaN when the
// run did not compute them.
typedef struct ZopdMetricRow {
  uint64_t iteration;
  double psi;
  double psi_mu;
  double constraint_violation;
  double q;
  double q_tilde;
  double primal_step;
  double dual_step;
  uint64_t oracle_calls;
  double wall_ms;
} ZopdMetricRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *zopd_version(void);

// Static description of a status code.
const char *zopd_status_message(enum ZopdStatus status);

// Generates a networked sparse-PCA benchmark instance.
//
// # Safety
// `out` must point to writable storage for one pointer.
enum ZopdStatus zopd_pca_generate(uint64_t n_agents,
                                  uint64_t n_edges,
                                  uint64_t dim,
                                  uint64_t batch,
                                  double l1_weight,
                                  double noise_sd,
                                  bool nonneg,
                                  uint64_t seed,
                                  struct ZopdInstance **out);

// Writes the instance to a JSON file that rebuilds it exactly.
//
// # Safety
// `instance` must be a live handle; `path` a NUL-terminated string.
enum ZopdStatus zopd_pca_save_json(const struct ZopdInstance *instance, const char *path);

// Loads an instance previously written by `zopd_pca_save_json`.
//
// # Safety
// `path` must be NUL-terminated; `out` writable.
enum ZopdStatus zopd_pca_load_json(const char *path, struct ZopdInstance **out);

// Total stacked dimension of the instance's decision variable.
//
// # Safety
// Both pointers must be valid.
enum ZopdStatus zopd_instance_dimension(const struct ZopdInstance *instance, uint64_t *out);

// Gradient Lipschitz constant of the instance's smooth part.
//
// # Safety
// Both pointers must be valid.
enum ZopdStatus zopd_instance_smoothness(const struct ZopdInstance *instance, double *out);

// Frees an instance handle (accepts NULL).
//
// # Safety
// `instance` must come from this library and not be freed twice.
void zopd_instance_free(struct ZopdInstance *instance);

// Fills `out` with parameters satisfying every validated convergence
// condition for this instance (batch schedule J = R, smoothing 1/sqrt(R)).
// `alpha0` is the target product rho*gamma in (0.4385, 1).
//
// # Safety
// Both pointers must be valid.
enum ZopdStatus zopd_params_recommended(const struct ZopdInstance *instance,
                                        double alpha0,
                                        uint64_t iterations,
                                        struct ZopdSolverParams *out);

// Counts violated convergence conditions for the given smoothness constant
// and, when `buf` is non-NULL, writes a NUL-terminated newline-separated
// description (truncated to `buf_len`).
//
// # Safety
// `params` and `out_count` must be valid; `buf`, when non-NULL, must hold
// `buf_len` writable bytes.
enum ZopdStatus zopd_params_validate(const struct ZopdSolverParams *params,
                                     double smoothness,
                                     char *buf,
                                     size_t buf_len,
                                     uint64_t *out_count);

// Runs PZO-PDA on the instance.
//
// # Safety
// `instance` and `params` must be valid; `out` writable.
enum ZopdStatus zopd_run_pzo_pda(const struct ZopdInstance *instance,
                                 const struct ZopdSolverParams *params,
                                 uint64_t master_seed,
                                 enum ZopdDiagnostics diagnostics,
                                 struct ZopdRun **out);

// Runs a baseline solver. `mu <= 0` selects the default `1/sqrt(R)`;
// `samples == 0` selects the variant default (1 for RGF, R for ZO-SGD).
//
// # Safety
// `instance` must be valid; `out` writable.
enum ZopdStatus zopd_run_baseline(const struct ZopdInstance *instance,
                                  enum ZopdBaseline variant,
                                  double mu,
                                  uint64_t samples,
                                  uint64_t iterations,
                                  uint64_t master_seed,
                                  struct ZopdRun **out);

// Number of metric rows (completed iterations).
//
// # Safety
// Both pointers must be valid.
enum ZopdStatus zopd_run_row_count(const struct ZopdRun *run, uint64_t *out);

// Copies metric row `index` into `out`.
//
// # Safety
// Both pointers must be valid.
enum ZopdStatus zopd_run_metric_row(const struct ZopdRun *run,
                                    uint64_t index,
                                    struct ZopdMetricRow *out);

// Index of the uniformly sampled output iterate.
//
// # Safety
// Both pointers must be valid.
enum ZopdStatus zopd_run_sampled_index(const struct ZopdRun *run, uint64_t *out);

// Length of the iterate vectors.
//
// # Safety
// Both pointers must be valid.
enum ZopdStatus zopd_run_iterate_len(const struct ZopdRun *run, uint64_t *out);

// Copies the uniformly sampled iterate into `buf`.
//
// # Safety
// `buf` must hold at least `len` doubles.
enum ZopdStatus zopd_run_sampled_iterate(const struct ZopdRun *run, double *buf, uint64_t len);

// Copies the final iterate into `buf`.
//
// # Safety
// `buf` must hold at least `len` doubles.
enum ZopdStatus zopd_run_final_iterate(const struct ZopdRun *run, double *buf, uint64_t len);

// Total oracle calls the run consumed (2·J per iteration).
//
// # Safety
// Both pointers must be valid.
enum ZopdStatus zopd_run_total_oracle_calls(const struct ZopdRun *run, uint64_t *out);

// Frees a run handle (accepts NULL).
//
// # Safety
// `run` must come from this library and not be freed twice.
void zopd_run_free(struct ZopdRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZOPD_H */
