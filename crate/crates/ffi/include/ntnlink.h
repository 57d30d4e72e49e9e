#ifndef NTNLINK_H
#define NTNLINK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NtnStatus {
  NTN_STATUS_OK = 0,
  NTN_STATUS_NULL_POINTER = 1,
  NTN_STATUS_INVALID_ARGUMENT = 2,
  NTN_STATUS_INVALID_CONFIG = 3,
  NTN_STATUS_NUMERIC = 4,
  NTN_STATUS_PANIC = 5,
} NtnStatus;

/**
 * Opaque link handle.
 */
typedef struct NtnLink NtnLink;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Link with the baseline parameters (HS shadowing, heterodyne detection).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum NtnStatus ntn_link_new_default(struct NtnLink **out);

/**
 * Link from a JSON run configuration; omitted fields take their defaults.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum NtnStatus ntn_link_from_json(const char *json, struct NtnLink **out);

/**
 * Release a handle; null is ignored.
 *
 * # Safety
 * `link` must come from `ntn_link_new*` and not be used afterwards.
 */
void ntn_link_free(struct NtnLink *link);

/**
 * Outage probability at the configured threshold.
 *
 * # Safety
 * `link` must be a live handle and `out` writable.
 */
enum NtnStatus ntn_outage_probability(const struct NtnLink *link, double gamma_h_db, double *out);

/**
 * High-SNR outage expansion.
 *
 * # Safety
 * `link` must be a live handle and `out` writable.
 */
enum NtnStatus ntn_outage_asymptotic(const struct NtnLink *link, double gamma_h_db, double *out);

/**
 * End-to-end SNR CDF at linear `gamma`.
 *
 * # Safety
 * `link` must be a live handle and `out` writable.
 */
enum NtnStatus ntn_e2e_cdf(const struct NtnLink *link,
                           double gamma,
                           double gamma_h_db,
                           double *out);

/**
 * Average BER for `modulation` (`ook`, `bpsk`, `mpsk:M`, `mqam:M`).
 *
 * # Safety
 * `link` must be a live handle, `modulation` NUL-terminated, `out` writable.
 */
enum NtnStatus ntn_avg_ber(const struct NtnLink *link,
                           const char *modulation,
                           double gamma_h_db,
                           double *out);

/**
 * Ergodic capacity in nats.
 *
 * # Safety
 * `link` must be a live handle and `out` writable.
 */
enum NtnStatus ntn_ergodic_capacity(const struct NtnLink *link, double gamma_h_db, double *out);

/**
 * Diversity order of the outage curve; needs circular jitter.
 *
 * # Safety
 * `link` must be a live handle and `out` writable.
 */
enum NtnStatus ntn_diversity_order(const struct NtnLink *link, double *out);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *ntn_last_error(void);

/**
 * Library version, static storage.
 */
const char *ntn_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NTNLINK_H */
