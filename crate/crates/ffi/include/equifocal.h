#ifndef EQUIFOCAL_H
#define EQUIFOCAL_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum EqfStatus {
  EQF_STATUS_OK = 0,
  EQF_STATUS_NULL_POINTER = 1,
  EQF_STATUS_INVALID_ARGUMENT = 2,
  EQF_STATUS_NOT_FOUND = 3,
  EQF_STATUS_UNSUPPORTED = 4,
  EQF_STATUS_BUFFER_TOO_SMALL = 5,
  EQF_STATUS_NOT_PROPER = 6,
  EQF_STATUS_PANIC = 99,
} EqfStatus;

/**
 * Opaque symmetric-space catalog.
 */
typedef struct EqfCatalog EqfCatalog;

/**
 * Opaque root system.
 */
typedef struct EqfRootSystem EqfRootSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *eqf_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void eqf_string_free(char *s);

/**
 * Root system of type `kind` ("A", "B", "C", "D", "BC", "E6", "E7", "E8",
 * "F4", "G2"); `rank` is ignored for exceptional types.
 *
 * # Safety
 * `kind` must be a NUL-terminated string, `out` a valid pointer.
 */
enum EqfStatus eqf_root_system_build(const char *kind, size_t rank, struct EqfRootSystem **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string, `out` a valid pointer.
 */
enum EqfStatus eqf_root_system_from_json(const char *json, struct EqfRootSystem **out);

/**
 * # Safety
 * `rs` must come from this library or be null.
 */
void eqf_root_system_free(struct EqfRootSystem *rs);

/**
 * # Safety
 * All pointers must be valid.
 */
enum EqfStatus eqf_root_system_counts(const struct EqfRootSystem *rs,
                                      size_t *n_roots,
                                      size_t *n_positive,
                                      size_t *rank);

/**
 * Root-system conditions (i) closure under reflections, (ii) integrality,
 * (iii) reducedness.
 *
 * # Safety
 * All pointers must be valid.
 */
enum EqfStatus eqf_root_system_conditions(const struct EqfRootSystem *rs,
                                          bool *cond_i,
                                          bool *cond_ii,
                                          bool *cond_iii);

/**
 * # Safety
 * `rs` and `out` must be valid; free the result with [`eqf_string_free`].
 */
enum EqfStatus eqf_root_system_to_json(const struct EqfRootSystem *rs, char **out);

/**
 * Order of the Weyl group by reflection closure, up to `max_order` elements.
 *
 * # Safety
 * `rs` and `order` must be valid.
 */
enum EqfStatus eqf_root_system_weyl_order(const struct EqfRootSystem *rs,
                                          size_t max_order,
                                          uint64_t *order);

/**
 * Weyl group order from the product formula.
 *
 * # Safety
 * `kind` must be a NUL-terminated string, `order` valid.
 */
enum EqfStatus eqf_weyl_order(const char *kind, size_t rank, uint64_t *order);

/**
 * Complex focal radii for `A_v = lambda` on a root space with
 * `beta(v) = beta`, for `j` in `j_min..=j_max`. Writes at most `capacity`
 * values and the total count to `written`.
 *
 * # Safety
 * `re` and `im` must hold `capacity` doubles; `written` must be valid.
 */
enum EqfStatus eqf_focal_radii(double lambda,
                               double beta,
                               int64_t j_min,
                               int64_t j_max,
                               double *re,
                               double *im,
                               size_t capacity,
                               size_t *written);

/**
 * Reciprocal focal radii for one `(lambda, mu)` pair, same layout as
 * [`eqf_focal_radii`]. Fails with `NotProper` when `|lambda| = sqrt(-mu) != 0`.
 *
 * # Safety
 * As for [`eqf_focal_radii`].
 */
enum EqfStatus eqf_lifted_values(double lambda,
                                 double mu,
                                 int64_t j_min,
                                 int64_t j_max,
                                 double *re,
                                 double *im,
                                 size_t capacity,
                                 size_t *written);

/**
 * The bundled symmetric-space catalog.
 *
 * # Safety
 * `out` must be valid.
 */
enum EqfStatus eqf_catalog_builtin(struct EqfCatalog **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string, `out` valid.
 */
enum EqfStatus eqf_catalog_load(const char *path, struct EqfCatalog **out);

/**
 * # Safety
 * `cat` must come from this library or be null.
 */
void eqf_catalog_free(struct EqfCatalog *cat);

/**
 * # Safety
 * `cat` and `len` must be valid.
 */
enum EqfStatus eqf_catalog_len(const struct EqfCatalog *cat, size_t *len);

/**
 * `(#Delta+, #Delta+ of multiplicity 1, m)` computed from the restricted
 * roots of the space `id`, e.g. "AIII[p=2,q=5]".
 *
 * # Safety
 * `cat`, `id` and the outputs must be valid.
 */
enum EqfStatus eqf_catalog_m_invariant(const struct EqfCatalog *cat,
                                       const char *id,
                                       int64_t *n_pos,
                                       int64_t *n_mult1,
                                       int64_t *m);

/**
 * Maximal number of distinct principal curvatures of the bundled Hermann
 * action `id` (e.g. "T2-01[n=3]"), and the catalog's expected value.
 *
 * # Safety
 * `id` and the outputs must be valid.
 */
enum EqfStatus eqf_hermann_max_spec(const char *id, int64_t *computed, int64_t *expected);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EQUIFOCAL_H */
