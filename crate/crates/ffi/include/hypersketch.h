#ifndef HYPERSKETCH_H
#define HYPERSKETCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_INVALID_ARGUMENT = 1,
  HS_STATUS_PARSE = 2,
  HS_STATUS_RESOURCE_LIMIT = 3,
  HS_STATUS_IO = 4,
  HS_STATUS_NULL_POINTER = 5,
  HS_STATUS_PANIC = 6,
} HsStatus;

/**
 * Opaque hypergraph handle.
 */
typedef struct HsHypergraph HsHypergraph;

/**
 * Opaque SAT sketch handle.
 */
typedef struct HsSatSketch HsSatSketch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *hs_last_error_message(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void hs_string_free(char *s);

/**
 * Creates an edgeless hypergraph on `n` vertices.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum HsStatus hs_hypergraph_new(size_t n, struct HsHypergraph **out_handle);

/**
 * Parses the `n m` / `w k v1 .. vk` text format.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out_handle` must be writable.
 */
enum HsStatus hs_hypergraph_parse(const char *text_ptr, struct HsHypergraph **out_handle);

/**
 * # Safety
 * `h` must be NULL or a handle from this library that has not been freed.
 */
void hs_hypergraph_free(struct HsHypergraph *h);

/**
 * Appends an edge. Endpoints are deduplicated; the weight must be positive.
 *
 * # Safety
 * `h` must be a live handle and `endpoints` must point to `len` values.
 */
enum HsStatus hs_hypergraph_add_edge(struct HsHypergraph *h,
                                     const size_t *endpoints,
                                     size_t len,
                                     double weight);

/**
 * Vertex count, or 0 for NULL.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t hs_hypergraph_vertex_count(const struct HsHypergraph *h);

/**
 * Edge count, or 0 for NULL.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t hs_hypergraph_edge_count(const struct HsHypergraph *h);

/**
 * Serializes to the text format. Free the result with [`hs_string_free`].
 *
 * # Safety
 * `h` must be a live handle and `out_text` writable.
 */
enum HsStatus hs_hypergraph_serialize(const struct HsHypergraph *h, char **out_text);

/**
 * Weight of the cut whose true side holds the vertices with nonzero
 * `side[v]`; `len` must equal the vertex count.
 *
 * # Safety
 * `h` must be a live handle, `side` must point to `len` bytes and
 * `out_weight` must be writable.
 */
enum HsStatus hs_cut_weight(const struct HsHypergraph *h,
                            const uint8_t *side,
                            size_t len,
                            double *out_weight);

/**
 * Minimum cut. Writes the canonical side vector (vertex 0 on side 0) to
 * `side_out`, which must hold exactly the vertex count.
 *
 * # Safety
 * `h` must be a live handle, `side_out` must point to `len` writable bytes
 * and `out_weight` must be writable.
 */
enum HsStatus hs_min_cut(const struct HsHypergraph *h,
                         uint8_t *side_out,
                         size_t len,
                         double *out_weight);

/**
 * Strong connectivity of every edge, in edge order. Self-loops get
 * `INFINITY`. `len` must equal the edge count.
 *
 * # Safety
 * `h` must be a live handle and `k_out` must point to `len` writable values.
 */
enum HsStatus hs_strong_connectivities(const struct HsHypergraph *h, double *k_out, size_t len);

/**
 * Samples a cut sparsifier into a new handle.
 *
 * # Safety
 * `h` must be a live handle and `out_handle` writable.
 */
enum HsStatus hs_sparsify(const struct HsHypergraph *h,
                          double epsilon,
                          double d,
                          uint64_t seed,
                          struct HsHypergraph **out_handle);

/**
 * Largest relative cut error of `sparse` against `h` over all cuts
 * (at most 20 vertices). Infinite if a cut's weight vanished or appeared.
 *
 * # Safety
 * Both handles must be live and `out_error` writable.
 */
enum HsStatus hs_verify_sparsifier(const struct HsHypergraph *h,
                                   const struct HsHypergraph *sparse,
                                   double *out_error);

/**
 * Lower bound on the probability that one contraction run outputs a fixed
 * cut of weight at most `alpha` times the minimum.
 *
 * # Safety
 * `out_p` must be writable.
 */
enum HsStatus hs_q_bound(size_t n, size_t r, double alpha, double *out_p);

/**
 * Parses a DIMACS CNF formula and sketches it.
 *
 * # Safety
 * `dimacs` must be a nul-terminated string and `out_handle` writable.
 */
enum HsStatus hs_sat_sketch_from_dimacs(const char *dimacs,
                                        double epsilon,
                                        double d,
                                        uint64_t seed,
                                        struct HsSatSketch **out_handle);

/**
 * Number of variables of the sketched formula, or 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t hs_sat_sketch_num_vars(const struct HsSatSketch *s);

/**
 * Estimated number of satisfied clauses; `assignment[i] != 0` means
 * variable `i + 1` is true.
 *
 * # Safety
 * `s` must be a live handle, `assignment` must point to `len` bytes and
 * `out_value` must be writable.
 */
enum HsStatus hs_sat_sketch_estimate(const struct HsSatSketch *s,
                                     const uint8_t *assignment,
                                     size_t len,
                                     double *out_value);

/**
 * # Safety
 * `s` must be NULL or a handle from this library that has not been freed.
 */
void hs_sat_sketch_free(struct HsSatSketch *s);

/**
 * Builds the Max-Cut gadget of a random hidden-hypermatching instance and
 * reports its exact maximum cut alongside the predicted value.
 *
 * # Safety
 * `out_maxcut` and `out_expected` must be writable.
 */
enum HsStatus hs_gadget_max_cut(size_t k,
                                size_t t,
                                uint8_t b,
                                uint64_t seed,
                                double *out_maxcut,
                                double *out_expected);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERSKETCH_H */
