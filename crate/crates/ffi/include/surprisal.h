#ifndef SURPRISAL_H
#define SURPRISAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every function.
 */
typedef enum SurprisalStatus {
  SURPRISAL_STATUS_OK = 0,
  SURPRISAL_STATUS_NULL_POINTER = 1,
  SURPRISAL_STATUS_INVALID_INPUT = 2,
  SURPRISAL_STATUS_DIMENSION_MISMATCH = 3,
  SURPRISAL_STATUS_NOT_FULL_RANK = 4,
  SURPRISAL_STATUS_NUMERICAL = 5,
  SURPRISAL_STATUS_PANIC = 6,
} SurprisalStatus;

/**
 * Opaque handle to a validated dichotomy.
 */
typedef struct SurprisalDichotomy SurprisalDichotomy;

/**
 * Scalar measures of a dichotomy, in bits.
 */
typedef struct SurprisalMeasures {
  double relative_entropy;
  double variance;
  double second_moment;
  double smin;
  double smax;
} SurprisalMeasures;

/**
 * Result of a transition test.
 */
typedef struct SurprisalVerdict {
  bool feasible;
  double worst_gap;
  double witness_x;
} SurprisalVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a dichotomy from a state `p` and reference `s`, both of length
 * `len`. A null `s` selects the uniform reference.
 *
 * # Safety
 * `p` (and `s` if non-null) must point to `len` readable doubles, and `out`
 * must be writable. The handle must be released with
 * [`surprisal_dichotomy_free`].
 */
enum SurprisalStatus surprisal_dichotomy_new(const double *p,
                                             const double *s,
                                             size_t len,
                                             struct SurprisalDichotomy **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `d` must come from [`surprisal_dichotomy_new`] and not be used afterwards.
 */
void surprisal_dichotomy_free(struct SurprisalDichotomy *d);

/**
 * Dimension of a dichotomy, or 0 for a null handle.
 *
 * # Safety
 * `d` must be null or a live handle.
 */
size_t surprisal_dichotomy_dim(const struct SurprisalDichotomy *d);

/**
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum SurprisalStatus surprisal_measures(const struct SurprisalDichotomy *d,
                                        struct SurprisalMeasures *out);

/**
 * Decides whether `from` can be mapped exactly onto `to`.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum SurprisalStatus surprisal_exact_transition(const struct SurprisalDichotomy *from,
                                                const struct SurprisalDichotomy *to,
                                                struct SurprisalVerdict *out);

/**
 * Decides whether `from` can reach a state within trace distance `eps`
 * of `to`.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum SurprisalStatus surprisal_approx_transition(const struct SurprisalDichotomy *from,
                                                 const struct SurprisalDichotomy *to,
                                                 double eps,
                                                 struct SurprisalVerdict *out);

/**
 * Rényi entropy of order `alpha` of the distribution `p`.
 *
 * # Safety
 * `p` must point to `len` readable doubles and `out` must be writable.
 */
enum SurprisalStatus surprisal_renyi_entropy(const double *p,
                                             size_t len,
                                             double alpha,
                                             double *out);

/**
 * Recovers a spectrum of dimension `dim` from the Rényi entropies of
 * orders `2..=dim`, written in descending order to `out`.
 *
 * # Safety
 * `renyi` must point to `dim - 1` readable doubles and `out` to `dim`
 * writable doubles.
 */
enum SurprisalStatus surprisal_spectrum_from_renyi(const double *renyi, size_t dim, double *out);

/**
 * Copies the last error message of this thread into `buf` as a
 * NUL-terminated string, truncating to `cap` bytes. Returns the length of
 * the full message excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t surprisal_last_error(char *buf, size_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *surprisal_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURPRISAL_H */
