/* SPDX-License-Identifier: Apache-2.0 */
/* skychan: satellite-to-ground channel simulator, C interface */

#ifndef SKYCHAN_H
#define SKYCHAN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SKYCHAN_API __declspec(dllexport)
#else
#define SKYCHAN_API __attribute__((visibility("default")))
#endif

/* Status codes returned by every handle-based call. */
enum skychan_status {
    SKYCHAN_OK = 0,
    SKYCHAN_ERROR = 1,       /* anything without a more specific code */
    SKYCHAN_ERR_CONFIG = 2,  /* config file rejected; see skychan_last_error */
    SKYCHAN_ERR_PARTIAL = 3, /* analysis finished but some dumps failed */
    SKYCHAN_ERR_IO = 4,
    SKYCHAN_ERR_ARG = 5      /* null pointer or out-of-domain argument */
};

/* Opaque simulation handle. Not thread-safe; use one per thread. */
typedef struct skychan_sim skychan_sim;

SKYCHAN_API skychan_sim* skychan_create(void);
SKYCHAN_API void skychan_destroy(skychan_sim* sim);

/* Message of the last failed call on this handle; owned by the handle,
 * valid until the next call. Never NULL. */
SKYCHAN_API const char* skychan_last_error(const skychan_sim* sim);

SKYCHAN_API int skychan_load_config(skychan_sim* sim, const char* path);
SKYCHAN_API int skychan_load_config_text(skychan_sim* sim, const char* text);

/* Override the loaded scenario's master seed / channel update rate.
 * A rate of 0 means "derive the minimum from geometry". */
SKYCHAN_API int skychan_set_seed(skychan_sim* sim, uint64_t seed);
SKYCHAN_API int skychan_set_rate(skychan_sim* sim, double rate_hz);

/* Run the loaded scenario; writes one .skch dump per visible satellite plus
 * manifest.json into out_dir. */
SKYCHAN_API int skychan_simulate(skychan_sim* sim, const char* out_dir);

/* Analyze every dump under dump_dir into out_dir. Non-positive bandwidth,
 * nfft or window keep the values recorded in the run manifest (or the
 * built-in defaults when no manifest is present). csv_dump != 0 also writes
 * the raw tensor as CSV. Returns SKYCHAN_ERR_PARTIAL when some dumps could
 * not be analyzed; the rest are still written. */
SKYCHAN_API int skychan_analyze(skychan_sim* sim, const char* dump_dir, const char* out_dir,
                                double bandwidth_hz, int nfft, double window_s, int csv_dump);

/* Human-readable run summary. On success *text_out is a NUL-terminated
 * string to release with skychan_string_free. */
SKYCHAN_API int skychan_report_alloc(skychan_sim* sim, const char* manifest_path,
                                     char** text_out);
SKYCHAN_API void skychan_string_free(char* text);

/* Stateless helpers. The double-valued ones return NaN on invalid input. */

/* Log-distance pathloss [dB]. line_of_sight != 0 selects the LOS parameter
 * set, else NLOS (both the built-in urban tables). */
SKYCHAN_API double skychan_pathloss_db(int line_of_sight, double distance_m, double fc_ghz,
                                       double elevation_rad);

SKYCHAN_API double skychan_doppler_shift_hz(double fc_hz, double radial_velocity_mps);

/* Minimum channel update rate [Hz] so that `sample_density` snapshots cover
 * each carrier half-wavelength of path length travelled. */
SKYCHAN_API double skychan_min_update_rate_hz(double path_length_m, double sample_density,
                                              double fc_hz, double duration_s);

/* Feasible Doppler-angle interval [rad] for a satellite speed; returns
 * SKYCHAN_OK or SKYCHAN_ERR_ARG. */
SKYCHAN_API int skychan_doppler_angle_bounds(double sat_speed_mps, double* lo_rad,
                                             double* hi_rad);

/* RMS delay spread [s] of a power/delay profile of n entries. */
SKYCHAN_API double skychan_rms_delay_spread(const double* delays_s, const double* powers,
                                            size_t n);

SKYCHAN_API const char* skychan_version(void);

#ifdef __cplusplus
}
#endif

#endif /* SKYCHAN_H */
