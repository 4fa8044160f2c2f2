#ifndef TORUS_RECUR_H
#define TORUS_RECUR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes.
typedef enum TrStatus {
  TR_STATUS_OK = 0,
  TR_STATUS_NULL_POINTER = 1,
  TR_STATUS_INVALID_INPUT = 2,
  TR_STATUS_DOMAIN = 3,
  TR_STATUS_CAP_EXCEEDED = 4,
  TR_STATUS_PANIC = 5,
} TrStatus;

// Opaque handle to a normalized hyperbolic map.
typedef struct TrMap TrMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread. Empty after success.
// The pointer stays valid until the next call on this thread.
const char *tr_last_error(void);

// Builds a map from the row-major matrix `[[a, b], [c, d]]`.
//
// # Safety
// `out` must be a valid pointer.
enum TrStatus tr_map_new(int64_t a, int64_t b, int64_t c, int64_t d, struct TrMap **out);

// # Safety
// `map` must come from [`tr_map_new`] and not be freed twice. Null is ignored.
void tr_map_free(struct TrMap *map);

// Power `k` such that the stored map is `A^k` (1 or 2).
//
// # Safety
// Pointers must be valid.
enum TrStatus tr_map_exponent(const struct TrMap *map, uint32_t *out);

// `det(A^n - I)` of the normalized map as a decimal string.
//
// # Safety
// Pointers must be valid.
enum TrStatus tr_map_h(const struct TrMap *map, uint32_t n, char **out);

// `tr(A^n)` of the normalized map as a decimal string.
//
// # Safety
// Pointers must be valid.
enum TrStatus tr_map_trace_power(const struct TrMap *map, uint32_t n, char **out);

// # Safety
// Pointers must be valid.
enum TrStatus tr_map_log_lambda(const struct TrMap *map, double *out);

// Points of period `n` as a JSON array of `["x", "y"]` fractions.
// Fails with `CAP_EXCEEDED` when there are more than `cap` points.
//
// # Safety
// Pointers must be valid.
enum TrStatus tr_map_periodic_points_json(const struct TrMap *map,
                                          uint32_t n,
                                          uint64_t cap,
                                          char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void tr_string_free(char *s);

// Critical exponents `s0` (planar) and `s1` (slice) for rate `alpha`.
//
// # Safety
// Out-pointers must be valid.
enum TrStatus tr_dim_formula(double alpha, double log_lambda, double *s0, double *s1);

// Whether `(x, y)` lies in layer `n` for the rate `exp(-alpha n)`.
// Writes 1 or 0.
//
// # Safety
// Pointers must be valid.
enum TrStatus tr_membership(const struct TrMap *map,
                            double alpha,
                            uint32_t n,
                            double x,
                            double y,
                            int32_t *out);

// Riesz `s`-energy of the odd layer `n`. `stratified` selects the
// stratified sampler when nonzero.
//
// # Safety
// Pointers must be valid.
enum TrStatus tr_energy_2d(const struct TrMap *map,
                           double alpha,
                           uint32_t n,
                           double s,
                           int32_t stratified,
                           uint64_t samples,
                           uint64_t seed,
                           double *estimate,
                           double *stderr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORUS_RECUR_H */
