#ifndef DIDPR_H
#define DIDPR_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Eta solver selection for [`didpr_solve_eta`].
 */
#define DIDPR_METHOD_MAX_ENTROPY 0

#define DIDPR_METHOD_ANALYTIC_CENTER 1

#define DIDPR_METHOD_VERTEX 2

/**
 * Result codes.
 */
typedef enum DidprStatus {
  DIDPR_STATUS_OK = 0,
  DIDPR_STATUS_NULL_POINTER = 1,
  DIDPR_STATUS_INVALID_ARGUMENT = 2,
  DIDPR_STATUS_IO = 3,
  DIDPR_STATUS_PARSE = 4,
  /**
   * Targets or conditioning intervals lie outside the attainable region.
   */
  DIDPR_STATUS_UNATTAINABLE = 5,
  /**
   * A solver failed to converge or returned an unexpected status.
   */
  DIDPR_STATUS_NUMERICAL = 6,
  DIDPR_STATUS_PANIC = 7,
} DidprStatus;

/**
 * Opaque edge mix matrix.
 */
typedef struct DidprEta DidprEta;

/**
 * Opaque directed multigraph.
 */
typedef struct DidprGraph DidprGraph;

/**
 * `lower <= r(pair) <= upper`, `pair` one of 11, 12, 21, 22.
 */
typedef struct DidprInterval {
  int32_t pair;
  double lower;
  double upper;
} DidprInterval;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *didpr_version(void);

/**
 * Message of the last failed call on this thread, or an empty string after
 * a successful one. Valid until the next `didpr_*` call on the same thread.
 */
const char *didpr_last_error_message(void);

/**
 * Builds a graph on `num_nodes` nodes from parallel arrays of edge
 * endpoints.
 *
 * # Safety
 * `sources` and `targets` must point to `num_edges` readable values each
 * (they may be null when `num_edges` is 0); `out` must be writable.
 */
enum DidprStatus didpr_graph_new(size_t num_nodes,
                                 const uint32_t *sources,
                                 const uint32_t *targets,
                                 size_t num_edges,
                                 struct DidprGraph **out);

/**
 * Reads a whitespace-separated edge list.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum DidprStatus didpr_graph_read(const char *path, struct DidprGraph **out);

/**
 * Writes the graph as an edge list.
 *
 * # Safety
 * `graph` must be a live handle and `path` a NUL-terminated string.
 */
enum DidprStatus didpr_graph_write(const struct DidprGraph *graph, const char *path);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t didpr_graph_num_nodes(const struct DidprGraph *graph);

/**
 * Number of edges, or 0 for a null handle.
 *
 * # Safety
 * `graph` must be null or a live handle.
 */
size_t didpr_graph_num_edges(const struct DidprGraph *graph);

/**
 * Endpoints of edge `index`.
 *
 * # Safety
 * `graph` must be a live handle; `source` and `target` must be writable.
 */
enum DidprStatus didpr_graph_edge(const struct DidprGraph *graph,
                                  size_t index,
                                  uint32_t *source,
                                  uint32_t *target);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `graph` must be null or a handle not yet freed.
 */
void didpr_graph_free(struct DidprGraph *graph);

/**
 * Erdős–Rényi graph with self-loops: each ordered pair independently with
 * probability `p`.
 *
 * # Safety
 * `out` must be writable.
 */
enum DidprStatus didpr_generate_er(size_t n, double p, uint64_t seed, struct DidprGraph **out);

/**
 * Directed preferential attachment grown to `edges` edges after the seed
 * self-loop. Scenario labels are not returned.
 *
 * # Safety
 * `out` must be writable.
 */
enum DidprStatus didpr_generate_dpa(double alpha,
                                    double beta,
                                    double gamma,
                                    double delta_in,
                                    double delta_out,
                                    size_t edges,
                                    uint64_t seed,
                                    struct DidprGraph **out);

/**
 * Writes the graph's four assortativity coefficients into `out[0..4]`.
 *
 * # Safety
 * `graph` must be a live handle and `out` must have room for 4 doubles.
 */
enum DidprStatus didpr_assortativity(const struct DidprGraph *graph, double *out);

/**
 * Attainable range of every coefficient for the graph's degree-pair
 * distribution, subject to `intervals`. An interval on a coefficient is not
 * applied to that coefficient's own range. Returns `DIDPR_STATUS_UNATTAINABLE`
 * when the intervals cannot hold together.
 *
 * # Safety
 * `graph` must be a live handle; `intervals` must point to
 * `num_intervals` values (or be null when it is 0); `lower` and `upper`
 * must each have room for 4 doubles.
 */
enum DidprStatus didpr_bounds(const struct DidprGraph *graph,
                              const struct DidprInterval *intervals,
                              size_t num_intervals,
                              double *lower,
                              double *upper);

/**
 * Solves for an edge mix matrix with the graph's degree-pair distribution
 * and the given four coefficients. `method` is one of the
 * `DIDPR_METHOD_*` constants. Returns `DIDPR_STATUS_UNATTAINABLE` when no
 * such matrix exists.
 *
 * # Safety
 * `graph` must be a live handle, `targets` must point to 4 doubles and
 * `out` must be writable.
 */
enum DidprStatus didpr_solve_eta(const struct DidprGraph *graph,
                                 const double *targets,
                                 int32_t method,
                                 struct DidprEta **out);

/**
 * Writes the four coefficients of the edge mix matrix into `out[0..4]`.
 *
 * # Safety
 * `eta` must be a live handle and `out` must have room for 4 doubles.
 */
enum DidprStatus didpr_eta_assortativity(const struct DidprEta *eta, double *out);

/**
 * Releases an edge mix matrix. Null is ignored.
 *
 * # Safety
 * `eta` must be null or a handle not yet freed.
 */
void didpr_eta_free(struct DidprEta *eta);

/**
 * Runs `steps` proposed double-edge swaps on a copy of `graph`, accepting
 * each with the ratio given by `eta`, which must share the graph's
 * degree-pair support. The rewired graph goes to `out`; `final_r`, if not
 * null, receives its four coefficients.
 *
 * # Safety
 * `graph` and `eta` must be live handles, `out` must be writable and
 * `final_r` must be null or have room for 4 doubles.
 */
enum DidprStatus didpr_rewire(const struct DidprGraph *graph,
                              const struct DidprEta *eta,
                              uint64_t steps,
                              uint64_t seed,
                              struct DidprGraph **out,
                              double *final_r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIDPR_H */
