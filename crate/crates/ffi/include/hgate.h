#ifndef HGATE_H
#define HGATE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Doubles in one interleaved 4×4 complex matrix.
 */
#define HGATE_MATRIX_LEN 32

typedef enum HgateStatus {
  HGATE_STATUS_OK = 0,
  HGATE_STATUS_NULL_POINTER = 1,
  HGATE_STATUS_DOMAIN = 2,
  HGATE_STATUS_NOT_HERMITIAN = 3,
  HGATE_STATUS_DEGENERATE_COUPLING = 4,
  HGATE_STATUS_UNITARITY_VIOLATION = 5,
  HGATE_STATUS_NO_CONVERGENCE = 6,
  HGATE_STATUS_STEP_BUDGET_EXCEEDED = 7,
  HGATE_STATUS_NORM_DRIFT = 8,
  HGATE_STATUS_INVALID_ARGUMENT = 9,
  HGATE_STATUS_PANIC = 10,
} HgateStatus;

/**
 * Diagonalization data for one parameter point.
 */
typedef struct HgateChain HgateChain;

/**
 * Gate evaluated at one parameter point and time.
 */
typedef struct HgateGate HgateGate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Diagonalizes the rotating-frame Hamiltonian. Free with [`hgate_chain_free`].
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum HgateStatus hgate_chain_new(double omega0,
                                 double omega1,
                                 double theta,
                                 struct HgateChain **out);

/**
 * Diagonal of the rotating-frame Hamiltonian in slot order (4 doubles).
 *
 * # Safety
 * `chain` must come from [`hgate_chain_new`]; `out` must hold 4 doubles.
 */
enum HgateStatus hgate_chain_h_d(const struct HgateChain *chain, double *out);

/**
 * The exact constant diagonalizer (32 doubles).
 *
 * # Safety
 * `chain` must come from [`hgate_chain_new`]; `out` must hold 32 doubles.
 */
enum HgateStatus hgate_chain_w(const struct HgateChain *chain, double *out);

/**
 * Relative off-diagonal mass left by the two-step rotation product.
 *
 * # Safety
 * `chain` must come from [`hgate_chain_new`]; `out` must point to one double.
 */
enum HgateStatus hgate_chain_two_step_residual(const struct HgateChain *chain, double *out);

/**
 * # Safety
 * `chain` must come from [`hgate_chain_new`] and not be used afterwards. Null
 * is accepted.
 */
void hgate_chain_free(struct HgateChain *chain);

/**
 * Evaluates the closed-form gate. Free with [`hgate_gate_free`].
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum HgateStatus hgate_gate_new(double omega0,
                                double omega1,
                                double theta,
                                double t,
                                struct HgateGate **out);

/**
 * Lab-frame propagator (32 doubles).
 *
 * # Safety
 * `g` must come from [`hgate_gate_new`]; `out` must hold 32 doubles.
 */
enum HgateStatus hgate_gate_u_gate(const struct HgateGate *g, double *out);

/**
 * Geometric factor `exp(−iω₁t·A)` (32 doubles).
 *
 * # Safety
 * `g` must come from [`hgate_gate_new`]; `out` must hold 32 doubles.
 */
enum HgateStatus hgate_gate_u_geometric(const struct HgateGate *g, double *out);

/**
 * Dynamical factor `exp(−i·h_d·t)`, diagonal (32 doubles).
 *
 * # Safety
 * `g` must come from [`hgate_gate_new`]; `out` must hold 32 doubles.
 */
enum HgateStatus hgate_gate_u_dynamic(const struct HgateGate *g, double *out);

/**
 * Gauge potential `A` (32 doubles).
 *
 * # Safety
 * `g` must come from [`hgate_gate_new`]; `out` must hold 32 doubles.
 */
enum HgateStatus hgate_gate_connection(const struct HgateGate *g, double *out);

/**
 * # Safety
 * `g` must come from [`hgate_gate_new`] and not be used afterwards. Null is
 * accepted.
 */
void hgate_gate_free(struct HgateGate *g);

/**
 * RK4 propagator of the lab Hamiltonian over `[0, t]`. `step_scale <= 0`
 * selects the default. `out_norm_drift` and `out_steps` may be null.
 *
 * # Safety
 * `out_u` must hold 32 doubles; the optional outputs must be valid if non-null.
 */
enum HgateStatus hgate_integrate_lab(double omega0,
                                     double omega1,
                                     double theta,
                                     double t,
                                     double step_scale,
                                     double *out_u,
                                     double *out_norm_drift,
                                     uint64_t *out_steps);

/**
 * `|tr(a†·b)|/4` for two interleaved matrices.
 *
 * # Safety
 * `a` and `b` must each hold 32 doubles; `out` must point to one double.
 */
enum HgateStatus hgate_fidelity(const double *a, const double *b, double *out);

/**
 * Static description of a status code.
 */
const char *hgate_status_message(enum HgateStatus status);

/**
 * Copies the calling thread's last error detail into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length, 0 if none.
 *
 * # Safety
 * `buf` must hold `len` bytes, or be null with `len` 0.
 */
size_t hgate_last_error(char *buf, size_t len);

/**
 * Library version, NUL-terminated.
 */
const char *hgate_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HGATE_H */
