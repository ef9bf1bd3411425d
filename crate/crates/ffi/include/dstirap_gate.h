#ifndef DSTIRAP_GATE_H
#define DSTIRAP_GATE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsgStatus {
  DSG_STATUS_OK = 0,
  DSG_STATUS_NULL_POINTER = 1,
  DSG_STATUS_INVALID_ARGUMENT = 2,
  DSG_STATUS_CONFIG = 3,
  DSG_STATUS_NUMERICAL = 4,
  DSG_STATUS_IO = 5,
  DSG_STATUS_PANIC = 6,
} DsgStatus;

/**
 * Extracted gate channel on the computational subspace.
 */
typedef struct DsgChannel DsgChannel;

/**
 * Simulation settings; starts from the built-in Cs defaults.
 */
typedef struct DsgConfig DsgConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null.
 */
size_t dsg_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dsg_version(void);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum DsgStatus dsg_config_default(struct DsgConfig **out);

/**
 * Parse a TOML config (or run manifest).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum DsgStatus dsg_config_from_toml(const char *text, struct DsgConfig **out);

/**
 * # Safety
 * `cfg` must come from this library or be null.
 */
void dsg_config_free(struct DsgConfig *cfg);

/**
 * # Safety
 * `cfg` must be a valid handle.
 */
enum DsgStatus dsg_config_set_qubits(struct DsgConfig *cfg, size_t n_qubits);

/**
 * Gate duration in μs.
 *
 * # Safety
 * `cfg` must be a valid handle.
 */
enum DsgStatus dsg_config_set_total_time(struct DsgConfig *cfg, double total_time_us);

/**
 * # Safety
 * `cfg` must be a valid handle.
 */
enum DsgStatus dsg_config_set_decay(struct DsgConfig *cfg, bool enabled);

/**
 * # Safety
 * `cfg` must be a valid handle.
 */
enum DsgStatus dsg_config_set_omega_c_mhz(struct DsgConfig *cfg, double omega_c_mhz);

/**
 * Uniform control–target blockade shift in MHz.
 *
 * # Safety
 * `cfg` must be a valid handle.
 */
enum DsgStatus dsg_config_set_blockade_mhz(struct DsgConfig *cfg, double v_mhz);

/**
 * Fractional Rabi errors on the controls (`xi`) and the target (`zeta`).
 *
 * # Safety
 * `cfg` must be a valid handle.
 */
enum DsgStatus dsg_config_set_rabi_errors(struct DsgConfig *cfg, double xi, double zeta);

/**
 * # Safety
 * `cfg` must be a valid handle.
 */
enum DsgStatus dsg_config_set_pulse_shape(struct DsgConfig *cfg,
                                          double sigma_frac,
                                          double delta_frac);

/**
 * # Safety
 * `cfg` must be a valid handle.
 */
enum DsgStatus dsg_config_set_tolerances(struct DsgConfig *cfg, double rel_tol, double abs_tol);

/**
 * # Safety
 * `cfg` must be a valid handle and `out` a valid pointer.
 */
enum DsgStatus dsg_config_qubits(const struct DsgConfig *cfg, size_t *out);

/**
 * Simulate the channel and return its average fidelity.
 *
 * # Safety
 * `cfg` must be a valid handle and `out` a valid pointer.
 */
enum DsgStatus dsg_gate_fidelity(const struct DsgConfig *cfg, double *out);

/**
 * # Safety
 * `cfg` must be a valid handle and `out` a valid pointer.
 */
enum DsgStatus dsg_extract_channel(const struct DsgConfig *cfg, struct DsgChannel **out);

/**
 * Computational dimension `d`; the superoperator is `d² × d²`.
 *
 * # Safety
 * `ch` must be a valid handle or null (returns 0).
 */
size_t dsg_channel_dim(const struct DsgChannel *ch);

/**
 * Copy the superoperator, row-major, into `re` and `im` (each `len ≥ d⁴`).
 * It acts on column-stacked matrices, `vec(A)[i + j·d] = A_ij`.
 *
 * # Safety
 * `ch` must be a valid handle, `re` and `im` valid for `len` doubles.
 */
enum DsgStatus dsg_channel_superop(const struct DsgChannel *ch, double *re, double *im, size_t len);

/**
 * Average fidelity against `diag(1, e^{iΓ}, …, e^{iΓ})`.
 *
 * # Safety
 * `ch` must be a valid handle and `out` a valid pointer.
 */
enum DsgStatus dsg_channel_fidelity(const struct DsgChannel *ch, double gamma_phase, double *out);

/**
 * # Safety
 * `ch` must come from this library or be null.
 */
void dsg_channel_free(struct DsgChannel *ch);

/**
 * Grover success probability for `|1…1⟩`. A null `ch` uses the exact gate.
 *
 * # Safety
 * `ch` must be a valid handle or null, `out` a valid pointer.
 */
enum DsgStatus dsg_grover(size_t n_qubits,
                          size_t iterations,
                          const struct DsgChannel *ch,
                          double *out);

/**
 * Signed C6 coefficient in atomic units.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DsgStatus dsg_c6(uint32_t principal_n, double *out);

/**
 * Blockade shift in rad/μs at separation `l_um`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum DsgStatus dsg_interaction_strength(double l_um, uint32_t principal_n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSTIRAP_GATE_H */
