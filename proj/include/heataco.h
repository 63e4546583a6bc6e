/*
 * heataco — heatmap-guided ant-colony decoding for Euclidean TSP.
 *
 * C API over the core library: opaque handles, status codes, and a
 * thread-local error message. Every function that can fail returns a
 * heataco_status; on failure heataco_last_error() carries the detail.
 * Handles are freed with the matching *_free function (NULL-safe).
 */
#ifndef HEATACO_H
#define HEATACO_H

#include <stdint.h>

#if defined(_WIN32)
#define HEATACO_API __declspec(dllexport)
#else
#define HEATACO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum heataco_status {
  HEATACO_OK = 0,
  HEATACO_ERR_IO = 1,               /* file missing/unreadable */
  HEATACO_ERR_PARSE = 2,            /* malformed input file */
  HEATACO_ERR_INVALID_ARGUMENT = 3, /* bad parameter or handle misuse */
  HEATACO_ERR_DOMAIN = 4,           /* value outside mathematical domain */
  HEATACO_ERR_INFEASIBLE = 5,       /* a tour failed validation */
  HEATACO_ERR_UNDEFINED = 6,        /* quantity undefined for this input */
  HEATACO_ERR_INTERNAL = 7
} heataco_status;

HEATACO_API const char* heataco_version(void);

/* Message for the most recent failure on this thread. */
HEATACO_API const char* heataco_last_error(void);

typedef struct heataco_instance heataco_instance;
typedef struct heataco_heatmap heataco_heatmap;
typedef struct heataco_tour heataco_tour;
typedef struct heataco_experiment heataco_experiment;

/* ---- instances ---------------------------------------------------- */

/* Sniffs TSPLIB vs plain "x y" coordinate text. */
HEATACO_API heataco_status heataco_instance_load(const char* path, heataco_instance** out);
HEATACO_API heataco_status heataco_instance_load_tsplib(const char* path, heataco_instance** out);
HEATACO_API heataco_status heataco_instance_load_coords(const char* path, heataco_instance** out);
HEATACO_API void heataco_instance_free(heataco_instance* instance);
HEATACO_API int heataco_instance_size(const heataco_instance* instance);

/* ---- heatmaps ------------------------------------------------------ */

/* Dense binary ("HMAP" v1, uint32 n, n*n float32) or sparse text
 * ("n=<count>" then "i j h" triplets). Pass expected_n <= 0 to skip the
 * dimension check. */
HEATACO_API heataco_status heataco_heatmap_load(const char* path, int expected_n,
                                                heataco_heatmap** out);
HEATACO_API heataco_status heataco_heatmap_uniform(int n, double value, heataco_heatmap** out);
HEATACO_API void heataco_heatmap_free(heataco_heatmap* heatmap);
HEATACO_API int heataco_heatmap_size(const heataco_heatmap* heatmap);

/* ---- tours ---------------------------------------------------------- */

HEATACO_API void heataco_tour_free(heataco_tour* tour);
HEATACO_API int heataco_tour_size(const heataco_tour* tour);
HEATACO_API double heataco_tour_length(const heataco_tour* tour);
/* Copies the node order; capacity must be >= heataco_tour_size(). */
HEATACO_API heataco_status heataco_tour_nodes(const heataco_tour* tour, int32_t* buffer,
                                              int capacity);
HEATACO_API heataco_status heataco_tour_save(const heataco_tour* tour, const char* path);
/* Loads a whitespace-separated 0-indexed tour file and validates it against
 * the instance; the tour length is evaluated on the instance distances. */
HEATACO_API heataco_status heataco_tour_load(const char* path, const heataco_instance* instance,
                                             heataco_tour** out);
/* L* from a tour file's "# L_star=<value>" first line. HEATACO_ERR_UNDEFINED
 * when the file has no such line. */
HEATACO_API heataco_status heataco_reference_length(const char* path, double* out);

HEATACO_API heataco_status heataco_gap_percent(double length, double reference_length,
                                               double* out);

/* ---- decoding -------------------------------------------------------- */

#define HEATACO_LS_NONE 0
#define HEATACO_LS_2OPT 2
#define HEATACO_LS_3OPT 3

#define HEATACO_EVAP_AUTO (-1)
#define HEATACO_EVAP_FULL 0
#define HEATACO_EVAP_CANDIDATE 1

#define HEATACO_DEPOSIT_GLOBAL_BEST 0
#define HEATACO_DEPOSIT_ITERATION_BEST 1

typedef struct heataco_params {
  double alpha;
  double beta;
  double gamma;
  double rho;
  int32_t ants;
  int32_t iterations;
  uint64_t seed;
  int32_t local_search;      /* HEATACO_LS_* */
  int32_t evaporation_scope; /* HEATACO_EVAP_* */
  int32_t deposit_rule;      /* HEATACO_DEPOSIT_* */
  int32_t candidate_k;
  int32_t threads;
  int32_t max_passes_2opt;
  int32_t max_passes_3opt;
  double eps_h;
  double eps_floor;
} heataco_params;

/* Fills in the defaults (alpha 1, beta 2, gamma 1, rho 0.02, 32 ants,
 * 5000 iterations, k = 20, eps_h 1e-4, floor 1e-9). */
HEATACO_API void heataco_params_init(heataco_params* params);

/* MMAS decode. heatmap == NULL runs vanilla MMAS on nearest-neighbor
 * candidate lists; otherwise the heatmap biases transitions with exponent
 * gamma and seeds the candidate lists. */
HEATACO_API heataco_status heataco_decode(const heataco_instance* instance,
                                          const heataco_heatmap* heatmap,
                                          const heataco_params* params, heataco_tour** out);

/* As heataco_decode; also writes a JSONL iteration trace when trace_path is
 * non-NULL and reports the decode wall-clock seconds (search only). */
HEATACO_API heataco_status heataco_decode_traced(const heataco_instance* instance,
                                                 const heataco_heatmap* heatmap,
                                                 const heataco_params* params,
                                                 const char* trace_path, heataco_tour** out,
                                                 double* decode_seconds);

/* Greedy edge-merge baseline (score = confidence / distance). */
HEATACO_API heataco_status heataco_decode_greedy(const heataco_instance* instance,
                                                 const heataco_heatmap* heatmap,
                                                 heataco_tour** out);

/* ---- gamma selection -------------------------------------------------- */

/* Entropy-targeted, label-free choice of the heatmap exponent. target <= 0
 * selects the default (8 with local search, 4 without). grid may be NULL to
 * use {0.1, 0.5, 1, 2}. Fails with HEATACO_ERR_UNDEFINED when no node has
 * two heatmap-backed candidates. */
HEATACO_API heataco_status heataco_select_gamma(const heataco_instance* instance,
                                                const heataco_heatmap* heatmap,
                                                const heataco_params* params, double target,
                                                const double* grid, int grid_len,
                                                double* gamma_out, double* support_out);

/* ---- diagnostics ------------------------------------------------------- */

/* Writes one JSON record per filter to report_path. filters is a
 * comma-separated list of "threshold[:eps]", "topk:k", "knn:k"; NULL means
 * "threshold". reference_path must name a tour file for the instance. */
HEATACO_API heataco_status heataco_diagnose(const char* instance_path, const char* heatmap_path,
                                            const char* reference_path, const char* filters,
                                            const char* report_path);

/* ---- experiments -------------------------------------------------------- */

HEATACO_API heataco_status heataco_experiment_new(heataco_experiment** out);
HEATACO_API void heataco_experiment_free(heataco_experiment* experiment);
HEATACO_API heataco_status heataco_experiment_add_job(heataco_experiment* experiment,
                                                      const char* instance_path,
                                                      const char* heatmap_path,
                                                      const char* reference_path);
/* decoder: "greedy", "mmas", or "heataco". */
HEATACO_API heataco_status heataco_experiment_set_decoder(heataco_experiment* experiment,
                                                          const char* decoder);
HEATACO_API heataco_status heataco_experiment_set_params(heataco_experiment* experiment,
                                                         const heataco_params* params);
HEATACO_API heataco_status heataco_experiment_set_seeds(heataco_experiment* experiment,
                                                        const uint64_t* seeds, int count);
HEATACO_API heataco_status heataco_experiment_set_output_dir(heataco_experiment* experiment,
                                                             const char* dir);
/* mode: "fixed", "grid", or "entropy". */
HEATACO_API heataco_status heataco_experiment_set_gamma_mode(heataco_experiment* experiment,
                                                             const char* mode);
HEATACO_API heataco_status heataco_experiment_set_gamma_grid(heataco_experiment* experiment,
                                                             const double* grid, int count);
HEATACO_API heataco_status heataco_experiment_set_support_target(heataco_experiment* experiment,
                                                                 double target);

/* Runs all (job, seed) pairs; writes report.csv and traces under the output
 * dir when one is set. Rows are queryable afterwards either way. */
HEATACO_API heataco_status heataco_experiment_run(heataco_experiment* experiment);

HEATACO_API int heataco_experiment_row_count(const heataco_experiment* experiment);
HEATACO_API heataco_status heataco_experiment_csv_header(char* buffer, int capacity);
HEATACO_API heataco_status heataco_experiment_row_csv(const heataco_experiment* experiment,
                                                      int index, char* buffer, int capacity);
HEATACO_API int heataco_experiment_warning_count(const heataco_experiment* experiment);
HEATACO_API heataco_status heataco_experiment_warning(const heataco_experiment* experiment,
                                                      int index, char* buffer, int capacity);

/* ---- convergence plot data ---------------------------------------------- */

/* Reads JSONL traces (one per method), applies the log-offset comparison
 * transform, and writes plot CSV to out_path. */
HEATACO_API heataco_status heataco_convergence_emit(const char* const* trace_paths,
                                                    const char* const* method_names,
                                                    int method_count, double plot_alpha,
                                                    double t_mid_fraction, const char* out_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HEATACO_H */
