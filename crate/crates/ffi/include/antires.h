#ifndef ANTIRES_H
#define ANTIRES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AntiresStatus {
  ANTIRES_STATUS_OK = 0,
  ANTIRES_STATUS_NULL_POINTER = 1,
  ANTIRES_STATUS_INVALID_UTF8 = 2,
  ANTIRES_STATUS_BUFFER_TOO_SMALL = 3,
  ANTIRES_STATUS_INVALID_NETWORK = 4,
  ANTIRES_STATUS_UNKNOWN_MODE = 5,
  ANTIRES_STATUS_PARSE = 6,
  ANTIRES_STATUS_SINGULAR = 7,
  ANTIRES_STATUS_EIGEN = 8,
  ANTIRES_STATUS_AMBIGUOUS = 9,
  ANTIRES_STATUS_ORACLE = 10,
  ANTIRES_STATUS_OTHER = 11,
  ANTIRES_STATUS_PANIC = 12,
} AntiresStatus;

/**
 * Opaque network handle.
 */
typedef struct AntiresNetwork AntiresNetwork;

/**
 * A pole or zero: center and amplitude half-width in MHz.
 */
typedef struct AntiresFeature {
  double center_mhz;
  double half_width_mhz;
  size_t multiplicity;
} AntiresFeature;

/**
 * Driven atom–cavity parameters, MHz.
 */
typedef struct AntiresJCParams {
  double g;
  double gamma;
  double kappa;
  double delta_pa;
  double delta_pc;
  double eta;
  size_t cutoff;
  size_t max_cutoff;
} AntiresJCParams;

typedef struct AntiresOracleResult {
  double field_re;
  double field_im;
  double photons;
  double g2_zero;
  size_t cutoff;
} AntiresOracleResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library on the same thread.
 */
const char *antires_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *antires_version(void);

/**
 * Build a network from the JSON network format.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AntiresStatus antires_network_from_json(const char *json, struct AntiresNetwork **out);

/**
 * Cavity at the frequency origin, atom at `delta_ac`, cavity driven.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum AntiresStatus antires_network_atom_cavity(double g,
                                               double gamma,
                                               double kappa,
                                               double delta_ac,
                                               struct AntiresNetwork **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `network` must come from this library and not be used afterwards.
 */
void antires_network_free(struct AntiresNetwork *network);

/**
 * Number of modes.
 *
 * # Safety
 * `network` must be a live handle and `out` a valid pointer.
 */
enum AntiresStatus antires_network_len(const struct AntiresNetwork *network, size_t *out);

/**
 * New handle with unit drive on `label` only.
 *
 * # Safety
 * `network` must be a live handle, `label` a NUL-terminated string and `out`
 * a valid pointer.
 */
enum AntiresStatus antires_network_driven_at(const struct AntiresNetwork *network,
                                             const char *label,
                                             struct AntiresNetwork **out);

/**
 * Complex steady-state amplitude of every mode at `probe_mhz`, written to
 * `re[0..len]` and `im[0..len]` with `len` equal to the number of modes.
 *
 * # Safety
 * `re` and `im` must each hold `len` doubles.
 */
enum AntiresStatus antires_steady_state(const struct AntiresNetwork *network,
                                        double probe_mhz,
                                        double *re,
                                        double *im,
                                        size_t len);

/**
 * Poles of the network, sorted by center.
 *
 * # Safety
 * `out` must hold `capacity` entries (may be null when `capacity` is 0);
 * `count` must be a valid pointer.
 */
enum AntiresStatus antires_resonances(const struct AntiresNetwork *network,
                                      struct AntiresFeature *out,
                                      size_t capacity,
                                      size_t *count);

/**
 * Zeros of the response of node `drive_label` when that node is driven.
 *
 * # Safety
 * As for [`antires_resonances`]; `drive_label` must be NUL-terminated.
 */
enum AntiresStatus antires_antiresonances(const struct AntiresNetwork *network,
                                          const char *drive_label,
                                          struct AntiresFeature *out,
                                          size_t capacity,
                                          size_t *count);

/**
 * Label of the node whose drive gives the narrowest antiresonances, copied
 * NUL-terminated into `buffer`.
 *
 * # Safety
 * `buffer` must hold `capacity` bytes.
 */
enum AntiresStatus antires_lossy_component(const struct AntiresNetwork *network,
                                           char *buffer,
                                           size_t capacity);

/**
 * Default atom–cavity parameters: g 16, γ 3, κ 1.5 MHz, resonant probe, `eta = 0.015`.
 */
struct AntiresJCParams antires_jc_params_default(void);

/**
 * Quantum steady state of the driven atom–cavity system.
 *
 * # Safety
 * `params` and `out` must be valid pointers.
 */
enum AntiresStatus antires_oracle_steady_state(const struct AntiresJCParams *params,
                                               struct AntiresOracleResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANTIRES_H */
