#ifndef NETCLUST_H
#define NETCLUST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `NC_STATUS_OK` is zero; everything else is an error.
 */
typedef enum {
  NC_STATUS_OK = 0,
  NC_STATUS_NULL_POINTER = 1,
  NC_STATUS_INVALID_UTF8 = 2,
  NC_STATUS_IO = 3,
  NC_STATUS_PARSE = 4,
  NC_STATUS_EMPTY_GRAPH = 5,
  NC_STATUS_VERTEX_OUT_OF_RANGE = 6,
  NC_STATUS_UNKNOWN_LABEL = 7,
  NC_STATUS_ISOLATED_VERTEX = 8,
  NC_STATUS_INVALID_PARAMETER = 9,
  NC_STATUS_ZERO_SEED_MASS = 10,
  NC_STATUS_UNDEFINED_CONDUCTANCE = 11,
  NC_STATUS_TOO_LARGE = 12,
  NC_STATUS_SERIALIZATION = 13,
  NC_STATUS_BUFFER_TOO_SMALL = 14,
  NC_STATUS_PANIC = 15,
} NcStatus;

/**
 * Transition rule of the adaptive walk.
 */
typedef enum {
  NC_WALK_RULE_METROPOLIS = 0,
  NC_WALK_RULE_NEIGHBOR_NORMALIZED = 1,
} NcWalkRule;

/**
 * Cluster extracted around one seed.
 */
typedef struct NcCluster NcCluster;

/**
 * Immutable graph.
 */
typedef struct NcGraph NcGraph;

typedef struct {
  double alpha;
  size_t max_iterations;
  double convergence_epsilon;
} NcDiffusionConfig;

typedef struct {
  double f;
  size_t steps;
} NcPhase;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The string
 * stays valid until the next failing call on the same thread.
 */
const char *nc_last_error_message(void);

/**
 * Human-readable name of a status code. Never null; static storage.
 */
const char *nc_status_name(NcStatus status);

/**
 * Load a whitespace-separated edge list from a file.
 */
NcStatus nc_graph_load_file(const char *path, NcGraph **out);

/**
 * Parse an edge list held in a NUL-terminated string.
 */
NcStatus nc_graph_from_text(const char *text, NcGraph **out);

/**
 * Build a graph on vertices `0..vertex_count` from `edge_count` pairs laid
 * out as `[u0, v0, u1, v1, ...]`. Labels are the decimal indices.
 */
NcStatus nc_graph_from_edges(size_t vertex_count,
                             const size_t *edges,
                             size_t edge_count,
                             NcGraph **out);

/**
 * Release a graph. Clusters created from it remain valid. Null is ignored.
 */
void nc_graph_free(NcGraph *g);

/**
 * Vertex count, or 0 for a null handle.
 */
size_t nc_graph_vertex_count(const NcGraph *g);

/**
 * Undirected edge count, or 0 for a null handle.
 */
size_t nc_graph_edge_count(const NcGraph *g);

NcStatus nc_graph_degree(const NcGraph *g, size_t v, size_t *out);

/**
 * Internal index of the vertex with external label `label`.
 */
NcStatus nc_graph_vertex_by_label(const NcGraph *g, const char *label, size_t *out);

/**
 * External label of vertex `v` as a new string; free with [`nc_string_free`].
 */
NcStatus nc_graph_label(const NcGraph *g, size_t v, char **out);

NcDiffusionConfig nc_diffusion_config_default(void);

/**
 * Truncated diffusion from `seed` followed by a sweep cut. A null `cfg`
 * means the defaults.
 */
NcStatus nc_diffusion_cluster(const NcGraph *g,
                              size_t seed,
                              const NcDiffusionConfig *cfg,
                              NcCluster **out);

/**
 * Adaptive energy walk from `seed`. With `phase_count == 0` the schedule is
 * `f = 1.3` then `f = 2.0`, each `10 * cluster_size` steps.
 */
NcStatus nc_walk_cluster(const NcGraph *g,
                         size_t seed,
                         double alpha,
                         double beta,
                         const NcPhase *phases,
                         size_t phase_count,
                         size_t cluster_size,
                         uint64_t rng_seed,
                         NcWalkRule rule,
                         NcCluster **out);

void nc_cluster_free(NcCluster *c);

/**
 * Member count, or 0 for a null handle.
 */
size_t nc_cluster_size(const NcCluster *c);

/**
 * Seed vertex, or `SIZE_MAX` for a null handle.
 */
size_t nc_cluster_seed(const NcCluster *c);

/**
 * Conductance, or NaN for a null handle.
 */
double nc_cluster_conductance(const NcCluster *c);

/**
 * Copy members (seed first) into `buf`, which must hold
 * [`nc_cluster_size`] entries.
 */
NcStatus nc_cluster_members(const NcCluster *c, size_t *buf, size_t capacity);

/**
 * Copy belongingness values, parallel to [`nc_cluster_members`].
 */
NcStatus nc_cluster_belongingness(const NcCluster *c, double *buf, size_t capacity);

/**
 * Cluster as `netclust.cluster.v1` JSON; free with [`nc_string_free`].
 */
NcStatus nc_cluster_to_json(const NcCluster *c, char **out);

/**
 * Release a string returned by this library. Null is ignored.
 */
void nc_string_free(char *s);

/**
 * Conductance of the vertex set `set[0..len]`.
 */
NcStatus nc_conductance(const NcGraph *g, const size_t *set, size_t len, double *out);

/**
 * Cover the graph with diffusion clusters. `assignment` receives one block
 * id per vertex and must hold [`nc_graph_vertex_count`] entries.
 */
NcStatus nc_partition(const NcGraph *g,
                      const NcDiffusionConfig *cfg,
                      size_t *assignment,
                      size_t capacity,
                      size_t *block_count);

/**
 * Modularity of the partition given by `assignment[0..len]`, one block id
 * per vertex.
 */
NcStatus nc_modularity(const NcGraph *g, const size_t *assignment, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETCLUST_H */
