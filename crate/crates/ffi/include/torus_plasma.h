#ifndef TORUS_PLASMA_H
#define TORUS_PLASMA_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TpStatus {
  TP_STATUS_OK = 0,
  TP_STATUS_NULL_POINTER = 1,
  TP_STATUS_NOME_OUT_OF_RANGE = 2,
  TP_STATUS_PRECISION_UNREACHABLE = 3,
  TP_STATUS_DIMENSION_MISMATCH = 4,
  TP_STATUS_SINGULAR_CONFIGURATION = 5,
  TP_STATUS_COINCIDENT_POINTS = 6,
  TP_STATUS_SINGULAR_SEPARATION = 7,
  TP_STATUS_DEGENERATE_GEOMETRY = 8,
  TP_STATUS_INVALID_GEOMETRY = 9,
  TP_STATUS_FLUX_MISMATCH = 10,
  TP_STATUS_QUADRATURE_NON_CONVERGENCE = 11,
  TP_STATUS_SEED_REQUIRED = 12,
  TP_STATUS_INSUFFICIENT_SAMPLES = 13,
  TP_STATUS_JUMP_POINT = 14,
  TP_STATUS_GRID_TOO_COARSE = 15,
  TP_STATUS_TRUNCATION_INSUFFICIENT = 16,
  TP_STATUS_FIT_ILL_CONDITIONED = 17,
  TP_STATUS_INVALID_ARGUMENT = 18,
  TP_STATUS_PANIC = 99,
} TpStatus;

/**
 * Opaque torus handle.
 */
typedef struct TpGeometry TpGeometry;

/**
 * Opaque nome handle.
 */
typedef struct TpNome TpNome;

typedef struct TpComplex {
  double re;
  double im;
} TpComplex;

/**
 * `beta F = bulk + surface + casimir`.
 */
typedef struct TpFreeEnergy {
  double bulk;
  double surface;
  double casimir;
  double total;
} TpFreeEnergy;

/**
 * Monte Carlo estimate of the configuration integral against its closed form.
 */
typedef struct TpPartitionCheck {
  double value;
  double std_error;
  double closed_form;
  double sigmas;
} TpPartitionCheck;

/**
 * `O(1)` terms of the log partition functions and their reconciliation.
 */
typedef struct TpCasimir {
  double ocp_term;
  double ocp_term_lw;
  double tcg_term;
  double gff_term;
  double modular_shift;
  double reconciliation_residual;
} TpCasimir;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated description of a status code.
 */
const char *tp_status_message(enum TpStatus status);

/**
 * Real nome `0 <= q <= 0.95`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TpStatus tp_nome_new_real(double q, struct TpNome **out);

/**
 * Nome from the half-period ratio `tau`, `Im tau > 0`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TpStatus tp_nome_new_tau(struct TpComplex tau, struct TpNome **out);

/**
 * # Safety
 * `nome` must be null or a handle from `tp_nome_new_*` not yet freed.
 */
void tp_nome_free(struct TpNome *nome);

/**
 * `theta1(z; q)`.
 *
 * # Safety
 * `nome` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_theta1(const struct TpNome *nome, struct TpComplex z, struct TpComplex *out);

/**
 * `theta3(z; q)`.
 *
 * # Safety
 * `nome` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_theta3(const struct TpNome *nome, struct TpComplex z, struct TpComplex *out);

/**
 * `theta4(z; q)`.
 *
 * # Safety
 * `nome` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_theta4(const struct TpNome *nome, struct TpComplex z, struct TpComplex *out);

/**
 * `q^{1/12} prod (1 - q^{2k})` for real `0 < q < 1`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TpStatus tp_eta_q(double q, double *out);

/**
 * Relative residual of the theta-Vandermonde identity at points `xs[0..n]`.
 *
 * # Safety
 * `nome` must be a live handle, `xs` valid for `n` reads, `out` valid for writes.
 */
enum TpStatus tp_theta_vandermonde_residual(const struct TpNome *nome,
                                            const struct TpComplex *xs,
                                            size_t n,
                                            struct TpComplex alpha,
                                            double *out);

/**
 * Rectangle `L x W` holding `n` particles.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TpStatus tp_geometry_new(double length, double width, size_t n, struct TpGeometry **out);

/**
 * # Safety
 * `geom` must be null or a handle from `tp_geometry_new` not yet freed.
 */
void tp_geometry_free(struct TpGeometry *geom);

/**
 * Doubly periodic potential at `z` of a unit charge at `zp`.
 *
 * # Safety
 * `geom` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_phi_periodic(const struct TpGeometry *geom,
                              struct TpComplex z,
                              struct TpComplex zp,
                              double *out);

/**
 * Potential periodic in `x` only.
 *
 * # Safety
 * `geom` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_phi_quasi(const struct TpGeometry *geom,
                           struct TpComplex z,
                           struct TpComplex zp,
                           double *out);

/**
 * `log Z_N` of the plasma at coupling 2.
 *
 * # Safety
 * `geom` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_ocp_log_partition(const struct TpGeometry *geom, double *out);

/**
 * # Safety
 * `geom` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_ocp_free_energy(const struct TpGeometry *geom, struct TpFreeEnergy *out);

/**
 * Monte Carlo check of the configuration integral for `N = 2, 3`.
 *
 * # Safety
 * `geom` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_ocp_verify_mc(const struct TpGeometry *geom,
                               size_t samples,
                               uint64_t seed,
                               struct TpPartitionCheck *out);

/**
 * `log Xi_2` of the Coulomb gas at fugacity `zeta`, keeping `n_max` paired modes.
 *
 * # Safety
 * `geom` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_tcg_log_grand_partition(const struct TpGeometry *geom,
                                         double zeta,
                                         size_t n_max,
                                         double *out);

/**
 * `2 log eta_q(q)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TpStatus tp_gff_constant(double q, double *out);

/**
 * # Safety
 * `geom` must be a live handle, `out` valid for writes.
 */
enum TpStatus tp_casimir_report(const struct TpGeometry *geom, double zeta, struct TpCasimir *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORUS_PLASMA_H */
