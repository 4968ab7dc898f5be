#ifndef GUE_CROWDING_H
#define GUE_CROWDING_H

#include <stddef.h>
#include <stdint.h>

/*
 Status code returned by every fallible function.
 */
typedef enum GueStatus {
  GUE_STATUS_OK = 0,
  GUE_STATUS_NULL_POINTER = 1,
  GUE_STATUS_INVALID_ARGUMENT = 2,
  GUE_STATUS_NUMERICAL = 3,
  GUE_STATUS_EIGENSOLVER = 4,
  GUE_STATUS_BUFFER_TOO_SMALL = 5,
  GUE_STATUS_PANIC = 6,
} GueStatus;

/*
 Solved Painlevé table.
 */
typedef struct GuePainleveTable GuePainleveTable;

/*
 Tridiagonal GUE spectrum sampler.
 */
typedef struct GueSampler GueSampler;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread; empty after a success. Valid until the next call.
 */
const char *gue_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *gue_version(void);

/*
 Solve the Painlevé table on the default grid. Free with [`gue_table_free`].

 # Safety
 `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum GueStatus gue_table_new(struct GuePainleveTable **out);

/*
 Release a table; null is ignored.

 # Safety
 `table` must come from [`gue_table_new`] and not be used afterwards.
 */
void gue_table_free(struct GuePainleveTable *table);

/*
 Hastings–McLeod solution q(x) inside the table range.

 # Safety
 `table` must be a live handle and `out` a valid pointer.
 */
enum GueStatus gue_table_q(const struct GuePainleveTable *table, double x, double *out);

/*
 Tracy–Widom F₂(x).

 # Safety
 `table` must be a live handle and `out` a valid pointer.
 */
enum GueStatus gue_tracy_widom_f2(const struct GuePainleveTable *table, double x, double *out);

/*
 Edge scaling function of the density below the maximum.

 # Safety
 `table` must be a live handle and `out` a valid pointer.
 */
enum GueStatus gue_rho_edge(const struct GuePainleveTable *table, double r_tilde, double *out);

/*
 Edge scaling function of the first gap.

 # Safety
 `table` must be a live handle and `out` a valid pointer.
 */
enum GueStatus gue_p_typ(const struct GuePainleveTable *table, double r_tilde, double *out);

/*
 Quartic coefficient of the small-distance expansion.

 # Safety
 `table` must be a live handle and `out` a valid pointer.
 */
enum GueStatus gue_a4(const struct GuePainleveTable *table, double *out);

/*
 Large-distance form of the gap scaling function.
 */
double gue_gap_tail_asymptotic(double r_tilde);

/*
 Exact finite-N density below the maximum.

 # Safety
 `out` must be a valid pointer.
 */
enum GueStatus gue_dos_exact(double r, uint32_t n, double *out);

/*
 Exact finite-N first-gap density.

 # Safety
 `out` must be a valid pointer.
 */
enum GueStatus gue_gap_pdf_exact(double r, uint32_t n, double *out);

/*
 Exact distribution function of the largest eigenvalue.

 # Safety
 `out` must be a valid pointer.
 */
enum GueStatus gue_cdf_lambda_max(double y, uint32_t n, double *out);

/*
 Create a sampler of N×N spectra. Free with [`gue_sampler_free`].

 # Safety
 `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum GueStatus gue_sampler_new(uint32_t n, uint64_t seed, struct GueSampler **out);

/*
 Release a sampler; null is ignored.

 # Safety
 `sampler` must come from [`gue_sampler_new`] and not be used afterwards.
 */
void gue_sampler_free(struct GueSampler *sampler);

/*
 Write the spectrum of draw `index`, descending, into `buffer` of length `len` (at least N).

 # Safety
 `sampler` must be a live handle and `buffer` valid for `len` writes.
 */
enum GueStatus gue_sampler_spectrum(const struct GueSampler *sampler,
                                    uint64_t index,
                                    double *buffer,
                                    size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GUE_CROWDING_H */
