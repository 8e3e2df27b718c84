/* C interface to the sparse label propagation library.
 *
 * Every fallible call returns an slp_status; on failure the message is
 * available from slp_last_error_message() on the same thread until the next
 * call. Objects are opaque and released with their *_free function (NULL is
 * accepted). Strings returned through char** are released with
 * slp_string_free(). */
#ifndef SLP_SLP_H
#define SLP_SLP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SLP_BUILDING_LIBRARY)
#    define SLP_API __declspec(dllexport)
#  else
#    define SLP_API __declspec(dllimport)
#  endif
#else
#  define SLP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum slp_status {
  SLP_OK = 0,
  SLP_ERR_INVALID_ARGUMENT = 1,
  SLP_ERR_SELF_LOOP = 2,
  SLP_ERR_NON_POSITIVE_WEIGHT = 3,
  SLP_ERR_DUPLICATE_EDGE = 4,
  SLP_ERR_NODE_OUT_OF_RANGE = 5,
  SLP_ERR_DIMENSION_MISMATCH = 6,
  SLP_ERR_PARTITION_MISMATCH = 7,
  SLP_ERR_COEFFICIENT_COUNT_MISMATCH = 8,
  SLP_ERR_ZERO_REFERENCE = 9,
  SLP_ERR_ISOLATED_NODE = 10,
  SLP_ERR_DISCONNECTED_GRAPH = 11,
  SLP_ERR_EMPTY_SAMPLING_SET = 12,
  SLP_ERR_NON_FINITE_ITERATE = 13,
  SLP_ERR_DEGENERATE_EDGE_SET = 14,
  SLP_ERR_NOT_RESOLVED = 15,
  SLP_ERR_INVALID_SPEC = 16,
  SLP_ERR_CONNECTIVITY_RETRY_EXHAUSTED = 17,
  SLP_ERR_EMPTY_REGION = 18,
  SLP_ERR_DEGENERATE_IMAGE = 19,
  SLP_ERR_IO = 20,
  SLP_ERR_PARSE = 21,
  SLP_ERR_OUT_OF_MEMORY = 98,
  SLP_ERR_INTERNAL = 99
} slp_status;

typedef struct slp_graph slp_graph;
typedef struct slp_signal slp_signal;
typedef struct slp_partition slp_partition;
typedef struct slp_samples slp_samples;
typedef struct slp_report slp_report;
typedef struct slp_image slp_image;
typedef struct slp_trimap slp_trimap;

/* Library ------------------------------------------------------------- */

SLP_API const char* slp_version(void);
SLP_API const char* slp_status_name(slp_status status);
SLP_API const char* slp_last_error_message(void);
SLP_API void slp_string_free(char* s);

/* Graphs -------------------------------------------------------------- */

/* Edge arrays of length edge_count; endpoints in [0, node_count). */
SLP_API slp_status slp_graph_create(size_t node_count, const size_t* heads, const size_t* tails,
                                    const double* weights, size_t edge_count, slp_graph** out);
SLP_API slp_status slp_graph_load(const char* path, slp_graph** out);
SLP_API slp_status slp_graph_save(const slp_graph* g, const char* path);
SLP_API size_t slp_graph_node_count(const slp_graph* g);
SLP_API size_t slp_graph_edge_count(const slp_graph* g);
/* Edge e in canonical order: i < j. */
SLP_API slp_status slp_graph_edge(const slp_graph* g, size_t e, size_t* i, size_t* j, double* w);
SLP_API size_t slp_graph_component_count(const slp_graph* g);
/* Estimate of ||Gamma^1/2 D^T Lambda^1/2||_2 by power iteration. */
SLP_API slp_status slp_graph_convergence_norm(const slp_graph* g, double* norm_out);
SLP_API void slp_graph_free(slp_graph* g);

/* Graph signals ------------------------------------------------------- */

SLP_API slp_status slp_signal_create(const double* values, size_t length, slp_signal** out);
SLP_API slp_status slp_signal_load(const char* path, size_t node_count, slp_signal** out);
/* value_column NULL means "value". */
SLP_API slp_status slp_signal_save(const slp_signal* x, const char* path, const char* value_column);
SLP_API size_t slp_signal_length(const slp_signal* x);
SLP_API const double* slp_signal_data(const slp_signal* x);
SLP_API slp_status slp_signal_nmse(const slp_signal* estimate, const slp_signal* truth, double* out);
SLP_API void slp_signal_free(slp_signal* x);

/* Partitions ---------------------------------------------------------- */

SLP_API slp_status slp_partition_create(const size_t* cluster_of, size_t node_count,
                                        slp_partition** out);
SLP_API slp_status slp_partition_load(const char* path, size_t node_count, slp_partition** out);
SLP_API slp_status slp_partition_save(const slp_partition* f, const char* path);
SLP_API size_t slp_partition_cluster_count(const slp_partition* f);
SLP_API void slp_partition_free(slp_partition* f);

/* Sampling sets ------------------------------------------------------- */

SLP_API slp_status slp_samples_create(const size_t* nodes, const double* labels, size_t count,
                                      slp_samples** out);
SLP_API slp_status slp_samples_load(const char* path, slp_samples** out);
SLP_API slp_status slp_samples_save(const slp_samples* m, const char* path);
SLP_API size_t slp_samples_count(const slp_samples* m);
SLP_API void slp_samples_free(slp_samples* m);

/* Generators ---------------------------------------------------------- */

typedef enum slp_placement {
  SLP_PLACEMENT_BOUNDARY_ADJACENT = 0,
  SLP_PLACEMENT_CLUSTER_CENTER = 1,
  SLP_PLACEMENT_RANDOM = 2
} slp_placement;

typedef struct slp_chain_spec {
  size_t n;
  size_t cluster_size;
  double w_intra;
  double w_inter;
  double coeff_low;
  double coeff_high;
  slp_placement placement;
  uint64_t seed; /* used by SLP_PLACEMENT_RANDOM */
} slp_chain_spec;

SLP_API void slp_chain_spec_default(slp_chain_spec* spec);
/* Any output pointer may be NULL. */
SLP_API slp_status slp_generate_chain(const slp_chain_spec* spec, slp_graph** graph,
                                      slp_partition** partition, slp_signal** truth,
                                      slp_samples** samples);

typedef struct slp_planted_spec {
  size_t n;
  size_t clusters;
  double p_in;
  double p_out;
  double w_lo;
  double w_hi;
  uint64_t seed;
  size_t max_retries;
  size_t sample_count;
  uint64_t sample_seed;
} slp_planted_spec;

SLP_API void slp_planted_spec_default(slp_planted_spec* spec);
SLP_API slp_status slp_generate_planted(const slp_planted_spec* spec, slp_graph** graph,
                                        slp_partition** partition, slp_signal** truth,
                                        slp_samples** samples);

/* Images -------------------------------------------------------------- */

SLP_API slp_status slp_image_load_ppm(const char* path, slp_image** out);
SLP_API slp_status slp_image_save_ppm(const slp_image* img, const char* path);
SLP_API size_t slp_image_width(const slp_image* img);
SLP_API size_t slp_image_height(const slp_image* img);
SLP_API void slp_image_free(slp_image* img);

/* Trimap PGM: 0 background seed, 128 unknown, 255 foreground seed. */
SLP_API slp_status slp_trimap_load_pgm(const char* path, slp_trimap** out);
SLP_API slp_status slp_trimap_save_pgm(const slp_trimap* t, const char* path);
SLP_API size_t slp_trimap_width(const slp_trimap* t);
SLP_API size_t slp_trimap_height(const slp_trimap* t);
SLP_API void slp_trimap_free(slp_trimap* t);

/* Two-tone disc image. truth_mask, when not NULL, receives width*height
 * bytes (255 foreground, 0 background). */
SLP_API slp_status slp_generate_synthetic_image(size_t width, size_t height, size_t band,
                                                uint64_t seed, slp_image** image,
                                                slp_trimap** trimap, uint8_t* truth_mask);

/* Grid graph with seeds +1 (foreground) and -1 (background). */
SLP_API slp_status slp_grid_graph(const slp_image* img, const slp_trimap* trimap,
                                  slp_graph** graph, slp_samples** samples, double* sigma);

/* mask receives width*height bytes: 255 foreground, 0 background. */
SLP_API slp_status slp_segment(const slp_signal* labels, const slp_trimap* trimap,
                               uint8_t* mask);
SLP_API slp_status slp_mask_save_pgm(const uint8_t* mask, size_t width, size_t height,
                                     const char* path);

/* Solvers ------------------------------------------------------------- */

typedef enum slp_stopping {
  SLP_STOP_FIXED_ITERATIONS = 0,
  SLP_STOP_OBJECTIVE_DECREASE = 1
} slp_stopping;

typedef struct slp_solve_config {
  size_t max_iterations;
  size_t history_stride;
  slp_stopping stopping;
  double tol;    /* SLP_STOP_OBJECTIVE_DECREASE */
  size_t window; /* SLP_STOP_OBJECTIVE_DECREASE */
  unsigned threads;
  int deterministic;
  int split_components;
  int message_passing;
} slp_solve_config;

SLP_API void slp_solve_config_default(slp_solve_config* cfg);
/* truth may be NULL; when given, the history records NMSE. */
SLP_API slp_status slp_solve(const slp_graph* g, const slp_samples* m,
                             const slp_solve_config* cfg, const slp_signal* truth,
                             slp_report** out);

typedef struct slp_lp_config {
  size_t max_iterations;
  double tol;
  size_t history_stride;
  int split_components;
} slp_lp_config;

SLP_API void slp_lp_config_default(slp_lp_config* cfg);
SLP_API slp_status slp_lp_solve(const slp_graph* g, const slp_samples* m,
                                const slp_lp_config* cfg, const slp_signal* truth,
                                slp_report** out);

SLP_API size_t slp_report_iterations(const slp_report* r);
/* Borrowed view of the final labels; valid while r lives. */
SLP_API const slp_signal* slp_report_labels(const slp_report* r);
SLP_API size_t slp_report_history_size(const slp_report* r);
/* has_nmse is set to 0 when the run had no truth. */
SLP_API slp_status slp_report_history_entry(const slp_report* r, size_t index, size_t* k,
                                            double* tv, double* nmse, int* has_nmse,
                                            double* max_abs_dual);
SLP_API slp_status slp_report_save_history(const slp_report* r, const char* path);
SLP_API void slp_report_free(slp_report* r);

/* Theory checks ------------------------------------------------------- */

/* JSON report; resolved receives 1 or 0. */
SLP_API slp_status slp_check_resolve(const slp_graph* g, const slp_partition* f,
                                     const slp_samples* m, char** json, int* resolved);

/* Nullspace-property search over kernel signals of m, with the boundary of
 * f as target edge set. violation receives 1 when a ratio below 2 was
 * found (a certificate), 0 otherwise. */
SLP_API slp_status slp_check_nnsp(const slp_graph* g, const slp_partition* f,
                                  const slp_samples* m, size_t restarts, size_t steps,
                                  uint64_t seed, char** json, int* violation);

#ifdef __cplusplus
}
#endif

#endif
