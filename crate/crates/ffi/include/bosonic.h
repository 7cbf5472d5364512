#ifndef BOSONIC_H
#define BOSONIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes shared by all functions.
 */
typedef enum BosonicStatus {
  BOSONIC_STATUS_OK = 0,
  BOSONIC_STATUS_NULL_POINTER = 1,
  BOSONIC_STATUS_INVALID_UTF8 = 2,
  BOSONIC_STATUS_PARSE_ERROR = 3,
  BOSONIC_STATUS_VALIDATION_ERROR = 4,
  BOSONIC_STATUS_SIMULATION_ERROR = 5,
  BOSONIC_STATUS_BUFFER_TOO_SMALL = 6,
  BOSONIC_STATUS_PANIC = 7,
} BosonicStatus;

/**
 * A parsed, validated circuit.
 */
typedef struct BosonicCircuit BosonicCircuit;

/**
 * A simulated statevector.
 */
typedef struct BosonicState BosonicState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *bosonic_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bosonic_version(void);

/**
 * Parses circuit JSON into a new handle written to `*out`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BosonicStatus bosonic_circuit_from_json(const char *json, struct BosonicCircuit **out);

/**
 * # Safety
 * `circuit` must come from [`bosonic_circuit_from_json`] and not be freed twice.
 */
void bosonic_circuit_free(struct BosonicCircuit *circuit);

/**
 * Number of qumodes, qubits and classical bits of a circuit.
 *
 * # Safety
 * `circuit` must be a live handle; output pointers may be null.
 */
enum BosonicStatus bosonic_circuit_shape(const struct BosonicCircuit *circuit,
                                         size_t *qumodes,
                                         size_t *qubits,
                                         size_t *cbits);

/**
 * Simulates one shot. `qubits_per_mode == 0` keeps the circuit's truncation.
 *
 * # Safety
 * `circuit` must be a live handle; `out` must be writable.
 */
enum BosonicStatus bosonic_simulate(const struct BosonicCircuit *circuit,
                                    uint32_t qubits_per_mode,
                                    uint64_t seed,
                                    struct BosonicState **out);

/**
 * Runs `shots` shots and writes a JSON object
 * `{"counts": {...}, "shots": n, "seed": s, "endianness": "little"}` to `*out_json`.
 * Free it with [`bosonic_string_free`]. `threads == 0` uses all cores.
 *
 * # Safety
 * `circuit` must be a live handle; `out_json` must be writable.
 */
enum BosonicStatus bosonic_run_shots(const struct BosonicCircuit *circuit,
                                     uint32_t qubits_per_mode,
                                     uint64_t shots,
                                     uint64_t seed,
                                     size_t threads,
                                     char **out_json);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void bosonic_string_free(char *s);

/**
 * # Safety
 * `state` must come from [`bosonic_simulate`] and not be freed twice.
 */
void bosonic_state_free(struct BosonicState *state);

/**
 * Number of complex amplitudes in the state; 0 for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
size_t bosonic_state_dim(const struct BosonicState *state);

/**
 * Copies amplitudes as interleaved `(re, im)` pairs; `len` counts doubles
 * and must be at least `2 * dim`.
 *
 * # Safety
 * `state` must be a live handle; `out` must point to `len` writable doubles.
 */
enum BosonicStatus bosonic_state_amplitudes(const struct BosonicState *state,
                                            double *out,
                                            size_t len);

/**
 * Wigner function of `qumode` on a square grid `[min, max]²` with `points`
 * per axis, written x-major into `out` (`len ≥ points²`).
 *
 * # Safety
 * `state` must be a live handle; `out` must point to `len` writable doubles.
 */
enum BosonicStatus bosonic_wigner(const struct BosonicState *state,
                                  size_t qumode,
                                  double min,
                                  double max,
                                  size_t points,
                                  double *out,
                                  size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOSONIC_H */
