#ifndef HSPSIM_H
#define HSPSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HspStatus {
  HSP_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  HSP_STATUS_NULL_POINTER = 1,
  /*
   An argument was malformed (bad UTF-8, wrong buffer length, ...).
   */
  HSP_STATUS_INVALID_ARGUMENT = 2,
  /*
   Scenario file failed to parse or validate.
   */
  HSP_STATUS_SCENARIO = 3,
  /*
   A physical or numerical precondition was violated.
   */
  HSP_STATUS_DOMAIN = 4,
  HSP_STATUS_IO = 5,
  /*
   Internal panic caught at the boundary.
   */
  HSP_STATUS_INTERNAL = 6,
} HspStatus;

typedef enum HspArm {
  HSP_ARM_SIGNAL = 0,
  HSP_ARM_IDLER = 1,
} HspArm;

typedef enum HspShape {
  HSP_SHAPE_GAUSSIAN = 0,
  HSP_SHAPE_RECT = 1,
} HspShape;

typedef enum HspWidthUnit {
  HSP_WIDTH_UNIT_HZ = 0,
  HSP_WIDTH_UNIT_METERS = 1,
} HspWidthUnit;

/*
 Opaque joint spectral amplitude grid.
 */
typedef struct HspJsa HspJsa;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null after a success.
 The pointer stays valid until the next call into this library on the same
 thread.
 */
const char *hsp_last_error_message(void);

/*
 Library version as a static nul-terminated string.
 */
const char *hsp_version(void);

/*
 Builds a normalized JSA for a Gaussian pump and a named crystal preset,
 phase-matched for the idler wavelength, on auto-sized axes of
 `points` x `points` spanning `+- span_fwhm` marginal FWHMs.

 # Safety
 `preset_name` must be a nul-terminated string; `out` must be writable.
 */
enum HspStatus hsp_jsa_build_preset(const char *preset_name,
                                    double pump_wavelength_m,
                                    double pump_fwhm_hz,
                                    double idler_wavelength_m,
                                    size_t points,
                                    double span_fwhm,
                                    struct HspJsa **out);

/*
 Applies a spectral filter to one arm and returns a new handle. A
 non-positive `center_wavelength_m` centres the filter on that arm's axis.

 # Safety
 `jsa` must be a live handle; `out` must be writable.
 */
enum HspStatus hsp_jsa_apply_filter(const struct HspJsa *jsa,
                                    enum HspArm filter_arm,
                                    enum HspShape filter_shape,
                                    double center_wavelength_m,
                                    double width,
                                    enum HspWidthUnit width_unit,
                                    struct HspJsa **out);

/*
 Releases a handle. Null is ignored.

 # Safety
 `jsa` must be null or a handle not yet freed.
 */
void hsp_jsa_free(struct HspJsa *jsa);

/*
 Grid dimensions (signal rows, idler columns).

 # Safety
 `jsa` must be a live handle; out-pointers may be null.
 */
enum HspStatus hsp_jsa_shape(const struct HspJsa *jsa, size_t *n_signal, size_t *n_idler);

/*
 Schmidt number K and purity 1/K.

 # Safety
 `jsa` must be a live handle; out-pointers may be null.
 */
enum HspStatus hsp_jsa_schmidt(const struct HspJsa *jsa, double *schmidt_k, double *purity);

/*
 Fraction of pair events surviving all filters applied so far.

 # Safety
 `jsa` must be a live handle; `out` must be writable.
 */
enum HspStatus hsp_jsa_heralding_efficiency(const struct HspJsa *jsa, double *out);

/*
 Intensity FWHM of one arm's marginal spectrum, in Hz.

 # Safety
 `jsa` must be a live handle; `out` must be writable.
 */
enum HspStatus hsp_jsa_marginal_fwhm_hz(const struct HspJsa *jsa, enum HspArm which, double *out);

/*
 Poissonian P(0..=n_max) into `out`, which must hold `n_max + 1` values.

 # Safety
 `out` must point to `out_len` writable doubles.
 */
enum HspStatus hsp_coherent_stats(double mean_photons, size_t n_max, double *out, size_t out_len);

/*
 Heralded-photon P0, P1, P2 into `out[3]`.

 # Safety
 `out` must point to three writable doubles.
 */
enum HspStatus hsp_hsp_stats(double pair_probability, double transmission, double *out);

/*
 Multiphoton visibility bound and the suppressed coincidence fraction for
 two photon-number distributions (each of length >= 3).

 # Safety
 `arm_a`/`arm_b` must point to `len_a`/`len_b` doubles; out-pointers may be null.
 */
enum HspStatus hsp_visibility(const double *arm_a,
                              size_t len_a,
                              const double *arm_b,
                              size_t len_b,
                              double indistinguishability,
                              double *v_max,
                              double *suppressed_fraction);

/*
 Fock-space coincidence visibility for arms with support up to two photons,
 keeping input events with at most two photons in total.

 # Safety
 `arm_a`/`arm_b` must point to `len_a`/`len_b` doubles; `visibility` must be writable.
 */
enum HspStatus hsp_fock_oracle(const double *arm_a,
                               size_t len_a,
                               const double *arm_b,
                               size_t len_b,
                               double indistinguishability,
                               double *visibility);

/*
 `g2(0) = 1 + 1/(n_seed + K)` of the seeded difference-frequency beam.

 # Safety
 `out` must be writable.
 */
enum HspStatus hsp_dfg_g2(double n_seed, double schmidt_k, double *out);

/*
 Difference-frequency wavelength for a pump and a seed, in metres.

 # Safety
 `out` must be writable.
 */
enum HspStatus hsp_dfg_partner_wavelength(double pump_wavelength_m,
                                          double seed_wavelength_m,
                                          double *out);

/*
 Runs a scenario file, writing outputs and `manifest.json` to `out_dir`.
 `threads == 0` uses the default worker count.

 # Safety
 `scenario_path` and `out_dir` must be nul-terminated strings.
 */
enum HspStatus hsp_scenario_run(const char *scenario_path, const char *out_dir, size_t threads);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HSPSIM_H */
