#ifndef ANYON_SPECTRUM_H
#define ANYON_SPECTRUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AnyonStatus {
  ANYON_STATUS_OK = 0,
  ANYON_STATUS_NULL_POINTER = 1,
  ANYON_STATUS_INVALID_PARAMS = 2,
  ANYON_STATUS_DOMAIN = 3,
  ANYON_STATUS_NO_CLASSICAL_REGION = 4,
  ANYON_STATUS_QUADRATURE_FAILURE = 5,
  ANYON_STATUS_BRACKET_FAILURE = 6,
  ANYON_STATUS_INTEGRATION_OVERFLOW = 7,
  ANYON_STATUS_NOT_FOUND = 8,
  ANYON_STATUS_CONFIG = 9,
  ANYON_STATUS_PANIC = 10,
} AnyonStatus;

typedef enum AnyonMethod {
  ANYON_METHOD_CLOSED = 0,
  ANYON_METHOD_WKB_FULL = 1,
  ANYON_METHOD_WKB_SPLIT = 2,
  ANYON_METHOD_ORACLE = 3,
  ANYON_METHOD_NONREL = 4,
} AnyonMethod;

// Opaque parameter set plus solver tolerances.
typedef struct AnyonSystem AnyonSystem;

// One level. `binding = (m - E) / m` carries full relative precision.
typedef struct AnyonEnergy {
  double e_over_m;
  double binding;
  double kinetic_ev;
  uint32_t iterations;
  double residual;
  double error_estimate;
} AnyonEnergy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a system with unit rest mass displayed as `mass_ev` eV.
//
// # Safety
// `out` must be null or valid for writing one pointer. The handle written
// there must be released with [`anyon_system_free`].
enum AnyonStatus anyon_system_new(double spin,
                                  double xi,
                                  double charge,
                                  double mass_ev,
                                  struct AnyonSystem **out);

// # Safety
// `system` must be null or a handle from [`anyon_system_new`] not yet freed.
void anyon_system_free(struct AnyonSystem *system);

// Replaces the quadrature, WKB root and shooting tolerances. All must be positive.
//
// # Safety
// `system` must be null or a live handle.
enum AnyonStatus anyon_system_set_tolerances(struct AnyonSystem *system,
                                             double quadrature,
                                             double root,
                                             double oracle);

// Energy of level `(n_r, l)` by `method`.
//
// # Safety
// `system` must be null or a live handle; `out` must be null or valid for
// writing one `AnyonEnergy`.
enum AnyonStatus anyon_system_energy(const struct AnyonSystem *system,
                                     enum AnyonMethod method,
                                     uint32_t n_r,
                                     uint32_t l,
                                     struct AnyonEnergy *out);

// Roots `r1 < r2 < r3` of the turning-point cubic at `E = e_over_m * m`.
//
// # Safety
// `roots_out` must be null or valid for writing three doubles.
enum AnyonStatus anyon_system_turning_points(const struct AnyonSystem *system,
                                             uint32_t l,
                                             double e_over_m,
                                             double *roots_out);

// Semiclassical action between the physical turning points at `E = e_over_m * m`.
//
// # Safety
// `out` must be null or valid for writing one double.
enum AnyonStatus anyon_system_phase_integral(const struct AnyonSystem *system,
                                             uint32_t l,
                                             double e_over_m,
                                             double *out);

// Copies the calling thread's last error message, NUL-terminated and
// truncated to `capacity` bytes, into `buffer`. Returns the full message
// length excluding the terminator, or 0 when there is no message. Pass a
// null buffer to query the length.
//
// # Safety
// `buffer` must be null or valid for writing `capacity` bytes.
size_t anyon_last_error_message(char *buffer, size_t capacity);

// Static NUL-terminated version string.
const char *anyon_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANYON_SPECTRUM_H */
