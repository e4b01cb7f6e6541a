#ifndef GLOSSFS_GLOSSFS_H
#define GLOSSFS_GLOSSFS_H

/*
 * C interface of the glossfs feature-selection library.
 *
 * Objects are opaque handles created by the *_load / *_from_* / *_build
 * functions and released with the matching *_free function. Every call that
 * can fail returns a glossfs_status; on failure glossfs_last_error() holds a
 * message for the calling thread until its next failing call. Output
 * parameters are left untouched on failure.
 *
 * Handles are immutable after construction and may be shared read-only
 * between threads.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(GLOSSFS_BUILDING)
#    define GLOSSFS_API __declspec(dllexport)
#  else
#    define GLOSSFS_API __declspec(dllimport)
#  endif
#else
#  define GLOSSFS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum glossfs_status {
  GLOSSFS_OK = 0,
  GLOSSFS_ERR_INVALID_ARGUMENT = 1,
  GLOSSFS_ERR_IO = 2,
  GLOSSFS_ERR_PARSE = 3,
  GLOSSFS_ERR_NUMERICAL = 4,
  GLOSSFS_ERR_INTERNAL = 5
} glossfs_status;

typedef struct glossfs_matrix glossfs_matrix;
typedef struct glossfs_labels glossfs_labels;
typedef struct glossfs_graph glossfs_graph;
typedef struct glossfs_selection glossfs_selection;

typedef struct glossfs_eval_summary {
  int runs;
  double acc_mean;
  double acc_std;
  double nmi_mean;
  double nmi_std;
} glossfs_eval_summary;

typedef struct glossfs_synth_options {
  size_t n;
  size_t d;
  size_t kappa;
  double noise_sigma;
  uint64_t seed;
  size_t mix;       /* planted columns per mixed column, 0 = all */
  int classes;      /* > 0 adds class structure and labels */
  double separation;
} glossfs_synth_options;

GLOSSFS_API const char* glossfs_version(void);
GLOSSFS_API const char* glossfs_last_error(void);
GLOSSFS_API const char* glossfs_status_string(glossfs_status status);

/* Strings returned through char** are owned by the caller. */
GLOSSFS_API void glossfs_string_free(char* s);

/* Data matrices (row-major buffers, one row per sample). */
GLOSSFS_API glossfs_status glossfs_matrix_load_csv(const char* path, int has_header,
                                                   glossfs_matrix** out);
GLOSSFS_API glossfs_status glossfs_matrix_from_rows(const double* values, size_t n, size_t d,
                                                    glossfs_matrix** out);
GLOSSFS_API glossfs_status glossfs_matrix_save_csv(const glossfs_matrix* m, const char* path);
GLOSSFS_API glossfs_status glossfs_matrix_shape(const glossfs_matrix* m, size_t* n, size_t* d);
GLOSSFS_API glossfs_status glossfs_matrix_copy_rows(const glossfs_matrix* m, double* out,
                                                    size_t capacity);
GLOSSFS_API int glossfs_matrix_is_normalized(const glossfs_matrix* m);
/* Unit l2 columns; *zero_columns (nullable) receives the untouched zero-column count. */
GLOSSFS_API glossfs_status glossfs_matrix_normalize(const glossfs_matrix* m,
                                                    glossfs_matrix** out,
                                                    size_t* zero_columns);
GLOSSFS_API void glossfs_matrix_free(glossfs_matrix* m);

/* Planted instance. true_features must hold opts->kappa entries; labels is
 * nullable and only filled when opts->classes > 0. */
GLOSSFS_API glossfs_status glossfs_synthesize(const glossfs_synth_options* opts,
                                              glossfs_matrix** matrix, glossfs_labels** labels,
                                              size_t* true_features);

/* Label vectors; ids are re-indexed to [0, classes). */
GLOSSFS_API glossfs_status glossfs_labels_load(const char* path, glossfs_labels** out);
GLOSSFS_API glossfs_status glossfs_labels_from_array(const long long* ids, size_t n,
                                                     glossfs_labels** out);
GLOSSFS_API glossfs_status glossfs_labels_save(const glossfs_labels* l, const char* path);
GLOSSFS_API glossfs_status glossfs_labels_info(const glossfs_labels* l, size_t* n,
                                               size_t* classes);
GLOSSFS_API void glossfs_labels_free(glossfs_labels* l);

/* Selection settings travel as JSON objects; see glossfs_default_config for
 * every key. NULL or "" means defaults. */
GLOSSFS_API glossfs_status glossfs_default_config(char** out_json);
/* Applies config_json on top of base_json (both nullable) and validates it. */
GLOSSFS_API glossfs_status glossfs_merge_config(const char* base_json, const char* config_json,
                                                char** out_json);

/* Similarity graph on the normalized matrix (normalizing a copy if needed). */
GLOSSFS_API glossfs_status glossfs_graph_build(const glossfs_matrix* m, const char* config_json,
                                               glossfs_graph** out);
GLOSSFS_API glossfs_status glossfs_graph_sigma(const glossfs_graph* g, double* sigma);
GLOSSFS_API void glossfs_graph_free(glossfs_graph* g);

/* Runs the configured method. graph is nullable; when given it must come
 * from the same matrix and its kind and m override the config. */
GLOSSFS_API glossfs_status glossfs_select(const glossfs_matrix* m, const glossfs_graph* graph,
                                          const char* config_json, glossfs_selection** out);
GLOSSFS_API glossfs_status glossfs_selection_from_json(const char* json,
                                                       glossfs_selection** out);
GLOSSFS_API glossfs_status glossfs_selection_count(const glossfs_selection* s, size_t* count);
GLOSSFS_API glossfs_status glossfs_selection_indices(const glossfs_selection* s, size_t* out,
                                                     size_t capacity);
GLOSSFS_API glossfs_status glossfs_selection_json(const glossfs_selection* s, char** out_json);
GLOSSFS_API void glossfs_selection_free(glossfs_selection* s);

/* K-means evaluation of a column subset against ground-truth labels. */
GLOSSFS_API glossfs_status glossfs_evaluate(const glossfs_matrix* m, const glossfs_labels* truth,
                                            const size_t* selected, size_t count, int runs,
                                            uint64_t seed, int threads, int uniform_seeding,
                                            glossfs_eval_summary* out);

/* Oracle cross-checks. suite: "all", "prox", "assignment" or "greedy";
 * cases = 0 uses each suite's default size. */
GLOSSFS_API glossfs_status glossfs_verify(const char* suite, size_t cases, uint64_t seed,
                                          char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* GLOSSFS_GLOSSFS_H */
