#ifndef CECSIM_H
#define CECSIM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CecsimCircuitLabel {
  CECSIM_CIRCUIT_LABEL_FIG1 = 1,
  CECSIM_CIRCUIT_LABEL_FIG2 = 2,
} CecsimCircuitLabel;

typedef enum CecsimClass {
  CECSIM_CLASS_I = 0,
  CECSIM_CLASS_X = 1,
  CECSIM_CLASS_Z = 2,
  CECSIM_CLASS_Y = 3,
} CecsimClass;

typedef enum CecsimGateNoise {
  CECSIM_GATE_NOISE_DATA_LOCAL = 0,
  CECSIM_GATE_NOISE_UNIFORM = 1,
  CECSIM_GATE_NOISE_PER_QUBIT = 2,
} CecsimGateNoise;

typedef enum CecsimModel {
  CECSIM_MODEL_FULL = 0,
  CECSIM_MODEL_BITFLIP_ANCILLA = 1,
} CecsimModel;

typedef enum CecsimStatus {
  CECSIM_STATUS_OK = 0,
  CECSIM_STATUS_NULL_POINTER = 1,
  CECSIM_STATUS_INVALID_ARGUMENT = 2,
  CECSIM_STATUS_UNKNOWN_LOCATION = 3,
  CECSIM_STATUS_PARSE = 4,
  CECSIM_STATUS_PANIC = 5,
} CecsimStatus;

/**
 * Opaque circuit handle.
 */
typedef struct CecsimCircuit CecsimCircuit;

typedef struct CecsimCensus {
  /**
   * Coefficient of p in the logical error rate.
   */
  double linear_coeff;
  size_t n_m;
  size_t n_g;
  size_t n_wide;
  size_t malignant_events;
  size_t single_faults;
} CecsimCensus;

typedef struct CecsimRate {
  double p;
  uint64_t shots;
  uint64_t failures;
  double p_log;
  double ci_low;
  double ci_high;
} CecsimRate;

/**
 * One fault: a location id and a Pauli literal such as `Z8` or `X1.Y8`.
 */
typedef struct CecsimFault {
  size_t location;
  const char *pauli;
} CecsimFault;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Owned by the
 * library; valid until the next call.
 */
const char *cecsim_last_error(void);

/**
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum CecsimStatus cecsim_circuit_build(enum CecsimCircuitLabel label, struct CecsimCircuit **out);

/**
 * Parses the circuit text format.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` valid for one pointer write.
 */
enum CecsimStatus cecsim_circuit_import(const char *text, struct CecsimCircuit **out);

/**
 * # Safety
 * `c` must come from this library and not be used afterwards. Null is a no-op.
 */
void cecsim_circuit_free(struct CecsimCircuit *c);

/**
 * Number of timesteps; 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t cecsim_circuit_depth(const struct CecsimCircuit *c);

/**
 * Number of fault locations; 0 for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t cecsim_circuit_num_locations(const struct CecsimCircuit *c);

/**
 * Circuit text; release with `cecsim_string_free`.
 *
 * # Safety
 * `c` must be a live handle; `out` valid for one pointer write.
 */
enum CecsimStatus cecsim_circuit_export(const struct CecsimCircuit *c, char **out);

/**
 * # Safety
 * `s` must come from this library. Null is a no-op.
 */
void cecsim_string_free(char *s);

/**
 * Exhaustive single-fault census.
 *
 * # Safety
 * `c` must be a live handle; `out` valid for one write.
 */
enum CecsimStatus cecsim_census(const struct CecsimCircuit *c,
                                enum CecsimModel model_kind,
                                enum CecsimGateNoise gate_noise,
                                struct CecsimCensus *out);

/**
 * Monte Carlo logical error rate; deterministic in `seed`.
 *
 * # Safety
 * `c` must be a live handle; `out` valid for one write.
 */
enum CecsimStatus cecsim_estimate_rate(const struct CecsimCircuit *c,
                                       enum CecsimModel model_kind,
                                       enum CecsimGateNoise gate_noise,
                                       double p,
                                       uint64_t shots,
                                       uint64_t seed,
                                       struct CecsimRate *out);

/**
 * Runs one round with explicit faults and an optional pre-round data error
 * (`inject` may be null) and writes the logical class of the outcome.
 *
 * # Safety
 * `faults` must point to `num_faults` entries (or be null when zero);
 * `out_class` valid for one write.
 */
enum CecsimStatus cecsim_run_round(const struct CecsimCircuit *c,
                                   const struct CecsimFault *faults,
                                   size_t num_faults,
                                   const char *inject,
                                   enum CecsimClass *out_class);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CECSIM_H */
