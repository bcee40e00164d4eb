#ifndef STURMLAB_H
#define STURMLAB_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Values are stable.
 */
typedef enum SturmlabStatus {
  STURMLAB_STATUS_OK = 0,
  STURMLAB_STATUS_NULL_POINTER = 1,
  STURMLAB_STATUS_BUFFER_TOO_SMALL = 2,
  STURMLAB_STATUS_INVALID_ARGUMENT = 3,
  STURMLAB_STATUS_PANIC = 4,
  STURMLAB_STATUS_ZERO_OBJECT = 10,
  STURMLAB_STATUS_BAD_SEQUENCE = 11,
  STURMLAB_STATUS_UNBOUNDED = 12,
  STURMLAB_STATUS_BAD_ROY_TRIPLE = 13,
  STURMLAB_STATUS_EQUAL_LETTERS = 14,
  STURMLAB_STATUS_NO_ADMISSIBLE_N = 15,
  STURMLAB_STATUS_DEGENERATE_SEED = 16,
  STURMLAB_STATUS_SINGULAR_N = 17,
  STURMLAB_STATUS_DEGENERATE_GROWTH = 18,
  STURMLAB_STATUS_CAPACITY = 19,
  STURMLAB_STATUS_BAD_INDEX = 20,
  STURMLAB_STATUS_NO_CONVERGENCE = 21,
  STURMLAB_STATUS_TOO_LARGE = 22,
  STURMLAB_STATUS_NO_CANDIDATES = 23,
  STURMLAB_STATUS_IMPROPER_DELTA = 24,
  STURMLAB_STATUS_OUT_OF_RANGE = 25,
  STURMLAB_STATUS_FIBONACCI_ONLY = 26,
  STURMLAB_STATUS_BAD_WINDOW = 27,
  STURMLAB_STATUS_PARSE = 28,
} SturmlabStatus;

/**
 * A seed, a program and the sequences built from them.
 */
typedef struct SturmlabApprox SturmlabApprox;

/**
 * A predicted 3-system over a window of `k`.
 */
typedef struct SturmlabSystem SturmlabSystem;

/**
 * Closed-form exponents. Interval-valued entries have `lo < hi`; exact ones have `lo == hi`.
 */
typedef struct SturmlabExponents {
  double psi1_inf[2];
  double psi1_sup[2];
  double psi2_inf[2];
  double psi2_sup[2];
  double psi3_inf[2];
  double psi3_sup[2];
  double omega2[2];
  double omega2_hat[2];
  double lambda2[2];
  double lambda2_hat[2];
} SturmlabExponents;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sturmlab_version(void);

/**
 * Static description of a status code.
 */
const char *sturmlab_status_name(enum SturmlabStatus status);

/**
 * Copies the last error message of this thread into `buf`.
 */
enum SturmlabStatus sturmlab_last_error(char *buf, size_t len, size_t *needed);

/**
 * Roy seed `(a, b, c)` on `program` (NULL for the all-ones program). `precision` 0 means 256 bits.
 */
enum SturmlabStatus sturmlab_approx_new_roy(uint64_t a,
                                            uint64_t b,
                                            uint64_t c,
                                            const char *program,
                                            uint32_t precision,
                                            struct SturmlabApprox **out);

/**
 * Bugeaud–Laurent seed with letters `a ≠ b` and first exponent `s1`.
 */
enum SturmlabStatus sturmlab_approx_new_bl(uint64_t a,
                                           uint64_t b,
                                           uint64_t s1,
                                           const char *program,
                                           uint32_t precision,
                                           struct SturmlabApprox **out);

/**
 * Releases a handle; NULL is ignored.
 */
void sturmlab_approx_free(struct SturmlabApprox *h);

/**
 * Checks every exact identity and content divisibility for indices up to `t_k`.
 */
enum SturmlabStatus sturmlab_verify(struct SturmlabApprox *h, uint32_t k, bool *all_pass);

/**
 * `y_i` as `"(x0, x1, x2)"`.
 */
enum SturmlabStatus sturmlab_y(struct SturmlabApprox *h,
                               int64_t i,
                               char *buf,
                               size_t len,
                               size_t *needed);

/**
 * `δ_k = log|det w_k| / log‖w_k‖` at `k = k_max`; `exact_zero` tells whether every `|det w_k| = 1`.
 */
enum SturmlabStatus sturmlab_delta(struct SturmlabApprox *h,
                                   uint32_t k_max,
                                   double *delta,
                                   bool *exact_zero);

/**
 * `digits` decimal digits of ξ.
 */
enum SturmlabStatus sturmlab_xi_digits(struct SturmlabApprox *h,
                                       uint32_t digits,
                                       char *buf,
                                       size_t len,
                                       size_t *needed);

/**
 * Closed-form exponents at `(σ, δ, τ, σ′)`; pass `σ′ = +∞` for an unbounded `σ′`.
 */
enum SturmlabStatus sturmlab_exponents(double sigma,
                                       double delta,
                                       double tau,
                                       double sigma_prime,
                                       struct SturmlabExponents *out);

/**
 * The predicted 3-system for `k_lo ≤ k ≤ k_hi`; a NaN `delta` uses the estimate.
 */
enum SturmlabStatus sturmlab_system_new(struct SturmlabApprox *h,
                                        uint32_t k_lo,
                                        uint32_t k_hi,
                                        double delta,
                                        struct SturmlabSystem **out);

void sturmlab_system_free(struct SturmlabSystem *s);

/**
 * Full validity verdict (3-system conditions, ordering, shape and the δ hypothesis).
 */
enum SturmlabStatus sturmlab_system_validate(struct SturmlabSystem *s, double tol, bool *valid);

/**
 * `[lo, hi]` of the q-range covered by the system.
 */
enum SturmlabStatus sturmlab_system_span(struct SturmlabSystem *s, double *lo, double *hi);

/**
 * `(P₁, P₂, P₃)(q)` into `out[0..3]`.
 */
enum SturmlabStatus sturmlab_system_eval(struct SturmlabSystem *s, double q, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STURMLAB_H */
