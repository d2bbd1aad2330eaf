/* C interface to the gwh detector library. */
#ifndef GWH_H
#define GWH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GWH_API __declspec(dllexport)
#else
#define GWH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gwh_status {
  GWH_OK = 0,
  GWH_E_CONTRACT = 1,
  GWH_E_DIMENSION = 2,
  GWH_E_DEGENERATE = 3,
  GWH_E_CONSTRUCTION = 4,
  GWH_E_REWIRING = 5,
  GWH_E_CONFIG = 6,
  GWH_E_IO = 7,
  GWH_E_FORMAT = 8,
  GWH_E_RUNTIME = 9,
  GWH_E_NULL = 10
} gwh_status;

typedef struct gwh_config gwh_config;
typedef struct gwh_graph gwh_graph;
typedef struct gwh_spectrum gwh_spectrum;
typedef struct gwh_model gwh_model;

/* Message of the last failure on the calling thread ("" if none). */
GWH_API const char* gwh_last_error(void);
/* Stable snake_case name of a status. */
GWH_API const char* gwh_status_name(gwh_status status);
GWH_API const char* gwh_version(void);

/* Configuration. Values travel as strings in the same syntax as the config
 * file; gwh_config_get copies a NUL-terminated value into buf and stores the
 * full length (without NUL) in *needed when it is non-null. A short buffer
 * receives a truncated copy and GWH_E_CONTRACT. */
GWH_API gwh_status gwh_config_create(gwh_config** out);
GWH_API void gwh_config_destroy(gwh_config* cfg);
GWH_API gwh_status gwh_config_set(gwh_config* cfg, const char* key, const char* value);
GWH_API gwh_status gwh_config_get(const gwh_config* cfg, const char* key, char* buf, size_t size, size_t* needed);
GWH_API size_t gwh_config_key_count(void);
GWH_API const char* gwh_config_key_name(size_t index);
GWH_API const char* gwh_config_key_help(size_t index);
GWH_API gwh_status gwh_config_validate(const gwh_config* cfg);
GWH_API gwh_status gwh_config_dump(const gwh_config* cfg, char* buf, size_t size, size_t* needed);

/* Graphs and spectra. */
GWH_API gwh_status gwh_graph_random(int nodes, double mean_degree, uint64_t seed, gwh_graph** out);
GWH_API gwh_status gwh_graph_load(const char* path, gwh_graph** out);
GWH_API gwh_status gwh_graph_save(const gwh_graph* graph, const char* path);
GWH_API gwh_status gwh_graph_rewire(const gwh_graph* graph, double fraction, uint64_t seed, gwh_graph** out);
GWH_API void gwh_graph_destroy(gwh_graph* graph);
GWH_API int gwh_graph_node_count(const gwh_graph* graph);
GWH_API int gwh_graph_edge_count(const gwh_graph* graph);

GWH_API gwh_status gwh_spectrum_compute(const gwh_graph* graph, gwh_spectrum** out);
GWH_API void gwh_spectrum_destroy(gwh_spectrum* spectrum);
GWH_API int gwh_spectrum_size(const gwh_spectrum* spectrum);
/* Ascending eigenvalues; `out` holds gwh_spectrum_size() doubles. */
GWH_API gwh_status gwh_spectrum_eigenvalues(const gwh_spectrum* spectrum, double* out);
/* Graph Fourier transform of a row-major nodes x length window. */
GWH_API gwh_status gwh_spectrum_gft(const gwh_spectrum* spectrum, const double* window, int length, double* out);
GWH_API gwh_status gwh_spectrum_igft(const gwh_spectrum* spectrum, const double* coefficients, int length,
                                     double* out);

/* Detector models. */
GWH_API gwh_status gwh_model_load(const char* path, gwh_model** out);
GWH_API gwh_status gwh_model_save(const gwh_model* model, const char* path);
GWH_API void gwh_model_destroy(gwh_model* model);
GWH_API int gwh_model_dimension(const gwh_model* model);
GWH_API int gwh_model_nodes(const gwh_model* model);
GWH_API int gwh_model_window_length(const gwh_model* model);
GWH_API double gwh_model_drift(const gwh_model* model);
GWH_API double gwh_model_threshold(const gwh_model* model);
GWH_API double gwh_model_shrinkage(const gwh_model* model);
/* Anomaly score of one row-major nodes x length window. */
GWH_API gwh_status gwh_model_score(const gwh_model* model, const double* window, int nodes, int length,
                                   double* score);

/* Commands. Paths are files unless named *_dir. */
GWH_API gwh_status gwh_simulate(const gwh_config* cfg, const char* out_dir, const char* graph_path);
GWH_API gwh_status gwh_calibrate(const gwh_config* cfg, const char* windows_path, const char* graph_path,
                                 int sensor, const char* model_path);
GWH_API gwh_status gwh_detect(const char* model_path, const char* windows_path, const char* csv_path);
GWH_API gwh_status gwh_bench(const gwh_config* cfg, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
