#ifndef PROGCOEF_H
#define PROGCOEF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum PcStatus {
  PC_STATUS_OK = 0,
  PC_STATUS_INVALID_ARGUMENT = 1,
  PC_STATUS_SIMULATION = 2,
  PC_STATUS_COMPRESSOR = 3,
  PC_STATUS_IO = 4,
  PC_STATUS_NULL_POINTER = 5,
  PC_STATUS_BUFFER_TOO_SMALL = 6,
  PC_STATUS_PANIC = 7,
} PcStatus;

typedef enum PcBoundary {
  PC_BOUNDARY_CYCLIC = 0,
  PC_BOUNDARY_FIXED_ZERO = 1,
} PcBoundary;

typedef enum PcScheme {
  PC_SCHEME_BINARY = 0,
  PC_SCHEME_GRAY = 1,
} PcScheme;

typedef enum PcNormalization {
  PC_NORMALIZATION_HORIZON = 0,
  PC_NORMALIZATION_RUNTIME = 1,
} PcNormalization;

// Ordered: a larger label is "more of a computer".
typedef enum PcLabel {
  PC_LABEL_NON_COMPUTER = 0,
  PC_LABEL_BOUNDARY_COMPUTER = 1,
  PC_LABEL_COMPUTER = 2,
} PcLabel;

// A compressor specification.
typedef struct PcCompressor PcCompressor;

// A space-time evolution.
typedef struct PcEvolution PcEvolution;

// A profile, variability curve and coefficient from one measurement.
typedef struct PcMeasurement PcMeasurement;

// An elementary cellular automaton.
typedef struct PcSystem PcSystem;

typedef struct PcCoefficient {
  double value;
  double normalized_value;
  double intercept;
  double r_squared;
  size_t t;
  size_t n;
} PcCoefficient;

typedef struct PcLinearFit {
  double slope;
  double intercept;
  double r_squared;
} PcLinearFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *pc_last_error(void);

// Library version as a static NUL-terminated string.
const char *pc_version(void);

// Creates an elementary cellular automaton (`rule` in 0..=255, `width` ≥ 3).
//
// # Safety
// `out` must be valid for writes.
enum PcStatus pc_system_new_eca(uint32_t rule,
                                size_t width,
                                enum PcBoundary boundary_kind,
                                struct PcSystem **out);

// # Safety
// `system` must come from `pc_system_new_eca` and not be used afterwards. Null is ignored.
void pc_system_free(struct PcSystem *system);

// Parses a compressor description: `builtin`, `builtin:dict=12,width=fixed,full=freeze`
// or `cmd:"<shell command>"`. Null selects the built-in default.
//
// # Safety
// `spec` must be null or a NUL-terminated string; `out` must be valid for writes.
enum PcStatus pc_compressor_new(const char *spec, struct PcCompressor **out);

// # Safety
// `compressor` must come from `pc_compressor_new` and not be used afterwards. Null is ignored.
void pc_compressor_free(struct PcCompressor *compressor);

// Copies the compressor's version tag into `buf`.
//
// # Safety
// `compressor` must be a live handle; `buf` must hold `cap` bytes; `out_len` must be writable.
enum PcStatus pc_compressor_tag(const struct PcCompressor *compressor,
                                char *buf,
                                size_t cap,
                                size_t *out_len);

// Compressed length of `len` bytes at `data` (`len` ≥ 1).
//
// # Safety
// `data` must be readable for `len` bytes; `out` must be writable.
enum PcStatus pc_compress_len(const struct PcCompressor *compressor,
                              const uint8_t *data,
                              size_t len,
                              size_t *out);

// Evolves the `input_index`-th enumerated configuration for `steps` rows.
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum PcStatus pc_evolve(const struct PcSystem *system,
                        uint64_t input_index,
                        enum PcScheme enumeration,
                        size_t steps,
                        struct PcEvolution **out);

// Evolves a single live cell at `width / 2` for `steps` rows.
//
// # Safety
// `system` must be a live handle; `out` must be writable.
enum PcStatus pc_evolve_single_seed(const struct PcSystem *system,
                                    size_t steps,
                                    struct PcEvolution **out);

// # Safety
// `evolution` must come from a `pc_evolve*` call and not be used afterwards. Null is ignored.
void pc_evolution_free(struct PcEvolution *evolution);

// Rows in the evolution; 0 for a null handle.
//
// # Safety
// `evolution` must be null or a live handle.
size_t pc_evolution_steps(const struct PcEvolution *evolution);

// Writes the evolution as `0`/`1` rows, each ending in `\n`.
//
// # Safety
// `evolution` must be a live handle; `buf` must hold `cap` bytes; `out_len` must be writable.
enum PcStatus pc_evolution_text(const struct PcEvolution *evolution,
                                char *buf,
                                size_t cap,
                                size_t *out_len);

// Compressed length of the evolution's text serialisation.
//
// # Safety
// Both handles must be live; `out` must be writable.
enum PcStatus pc_evolution_compressed_len(const struct PcEvolution *evolution,
                                          const struct PcCompressor *compressor,
                                          size_t *out);

// Measures the coefficient over `n` enumerated inputs and strictly increasing `runtimes`.
//
// # Safety
// Handles must be live; `runtimes` must be readable for `runtimes_len` values; `out` must be writable.
enum PcStatus pc_measure(const struct PcSystem *system,
                         const struct PcCompressor *compressor,
                         size_t n,
                         const size_t *runtimes,
                         size_t runtimes_len,
                         enum PcScheme enumeration,
                         enum PcNormalization norm,
                         struct PcMeasurement **out);

// # Safety
// `measurement` must come from `pc_measure` and not be used afterwards. Null is ignored.
void pc_measurement_free(struct PcMeasurement *measurement);

// # Safety
// `measurement` must be a live handle; `out` must be writable.
enum PcStatus pc_measurement_coefficient(const struct PcMeasurement *measurement,
                                         struct PcCoefficient *out);

// Copies the variability curve into `runtimes_out`/`f_out` (each with room for `cap`
// entries). The number of points is always written to `out_len`.
//
// # Safety
// `measurement` must be a live handle; both arrays must hold `cap` entries; `out_len` must be writable.
enum PcStatus pc_measurement_curve(const struct PcMeasurement *measurement,
                                   size_t *runtimes_out,
                                   double *f_out,
                                   size_t cap,
                                   size_t *out_len);

// `Σ |l[j+1] − l[j]| / (t · (n − 1))` over `n` ≥ 2 compressed lengths.
//
// # Safety
// `lengths` must be readable for `n` values; `out` must be writable.
enum PcStatus pc_variability(const size_t *lengths, size_t n, size_t t, double *out);

// Ordinary least squares over `len` ≥ 2 points with at least two distinct `xs`.
//
// # Safety
// `xs` and `ys` must be readable for `len` values; `out` must be writable.
enum PcStatus pc_fit_slope(const double *xs, const double *ys, size_t len, struct PcLinearFit *out);

// Labels `value` against threshold `delta` (≥ 0) with a boundary band (≥ 0).
//
// # Safety
// `out` must be writable.
enum PcStatus pc_classify(double value, double delta, double band, enum PcLabel *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROGCOEF_H */
