#ifndef DSLR_DSLR_H
#define DSLR_DSLR_H

/* C interface to the online-arithmetic CNN accelerator model.
 *
 * Every call returns a dslr_status. On failure a message describing the
 * problem is available from dslr_last_error() on the same thread until the
 * next call. Strings returned through char** belong to the caller and are
 * released with dslr_string_free(); const char* results point into the
 * owning handle and stay valid until it is freed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(DSLR_BUILDING_LIBRARY)
#define DSLR_API __declspec(dllexport)
#else
#define DSLR_API __declspec(dllimport)
#endif
#else
#define DSLR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dslr_status {
  DSLR_OK = 0,
  DSLR_ERR_INVALID_ARGUMENT = 1,
  DSLR_ERR_OVERFLOW = 2,
  DSLR_ERR_SHAPE = 3,
  DSLR_ERR_RANGE = 4,
  DSLR_ERR_PARSE = 5,
  DSLR_ERR_VALIDATION = 6,
  DSLR_ERR_UNKNOWN_NETWORK = 7,
  DSLR_ERR_IO = 8,
  DSLR_ERR_RESOURCE = 9,
  DSLR_ERR_STATE = 10,
  DSLR_ERR_INTERNAL = 11
} dslr_status;

typedef enum dslr_format { DSLR_FORMAT_CSV = 0, DSLR_FORMAT_JSON = 1 } dslr_format;
typedef enum dslr_tiles_form { DSLR_TILES_PRODUCT = 0, DSLR_TILES_PERCOORD = 1 } dslr_tiles_form;
typedef enum dslr_traffic { DSLR_TRAFFIC_UNIQUE = 0, DSLR_TRAFFIC_REWRITES = 1 } dslr_traffic;
typedef enum dslr_design { DSLR_DESIGN_ONLINE = 0, DSLR_DESIGN_BASELINE = 1 } dslr_design;

/* Report build flags. */
#define DSLR_REPORT_BASELINE 1u
#define DSLR_REPORT_SELF_COMPARE 2u /* baseline slot holds the online design */

typedef struct dslr_config dslr_config;
typedef struct dslr_report dslr_report;

DSLR_API const char* dslr_version(void);
DSLR_API const char* dslr_last_error(void);
DSLR_API const char* dslr_status_string(dslr_status status);
DSLR_API void dslr_string_free(char* s);

/* ---- configuration ---- */

DSLR_API dslr_status dslr_config_builtin(const char* network, dslr_config** out);
DSLR_API dslr_status dslr_config_load(const char* path, dslr_config** out);
DSLR_API dslr_status dslr_config_parse(const char* json_text, dslr_config** out);
DSLR_API void dslr_config_free(dslr_config* cfg);

DSLR_API dslr_status dslr_config_network_name(const dslr_config* cfg, const char** name);
DSLR_API dslr_status dslr_config_warning_count(const dslr_config* cfg, size_t* count);
DSLR_API dslr_status dslr_config_warning(const dslr_config* cfg, size_t index, const char** message);
DSLR_API dslr_status dslr_config_emit(const dslr_config* cfg, char** json_text);

/* Clock for both designs, in MHz. */
DSLR_API dslr_status dslr_config_set_freq(dslr_config* cfg, double mhz);
/* Power (mW) and area (um^2) of the online design. */
DSLR_API dslr_status dslr_config_set_power(dslr_config* cfg, double mw);
DSLR_API dslr_status dslr_config_set_area(dslr_config* cfg, double um2);
/* Baseline cycle-model variants. */
DSLR_API dslr_status dslr_config_set_tiles_form(dslr_config* cfg, dslr_tiles_form form);
DSLR_API dslr_status dslr_config_set_literal_phases(dslr_config* cfg, int literal);
DSLR_API dslr_status dslr_config_set_traffic(dslr_config* cfg, dslr_traffic model);

typedef struct dslr_layer_spec {
  const char* name; /* may be NULL */
  int64_t N, M, R, C, K;
  int64_t stride;  /* 0 means 1 */
  int64_t padding;
} dslr_layer_spec;

DSLR_API dslr_status dslr_config_layer_count(const dslr_config* cfg, size_t* count);
DSLR_API dslr_status dslr_config_layer(const dslr_config* cfg, size_t index, dslr_layer_spec* out);
/* Index of the layer with this name (case-sensitive). */
DSLR_API dslr_status dslr_config_find_layer(const dslr_config* cfg, const char* name, size_t* index);

/* ---- analytic reports ---- */

typedef struct dslr_layer_metrics {
  const char* layer;
  int64_t cycles;
  double duration_ms;
  int64_t ops;
  double gops;
  double tops_per_w;
  double gops_per_mm2;
  double oi;
} dslr_layer_metrics;

typedef struct dslr_summary {
  int64_t total_cycles;
  double total_ms;
  double mean_ms;
  double peak_gops;
  double peak_tops_per_w;
  double peak_gops_per_mm2;
} dslr_summary;

DSLR_API dslr_status dslr_report_build(const dslr_config* cfg, unsigned flags, dslr_report** out);
DSLR_API void dslr_report_free(dslr_report* rep);

DSLR_API dslr_status dslr_report_layer_count(const dslr_report* rep, size_t* count);
DSLR_API dslr_status dslr_report_layer(const dslr_report* rep, dslr_design design, size_t index,
                                       dslr_layer_metrics* out);
DSLR_API dslr_status dslr_report_summary(const dslr_report* rep, dslr_design design, dslr_summary* out);
/* Baseline duration over online duration, whole network. */
DSLR_API dslr_status dslr_report_speedup(const dslr_report* rep, double* speedup);

DSLR_API dslr_status dslr_report_render(const dslr_report* rep, dslr_format format, char** out);
DSLR_API dslr_status dslr_report_roofline(const dslr_report* rep, dslr_format format, char** out);
DSLR_API dslr_status dslr_compare_render(const dslr_report* const* reps, size_t count, dslr_format format,
                                         char** out);

/* ---- digit-accurate simulation ---- */

typedef struct dslr_sim_options {
  uint64_t seed;
  int zero_weights;
  int inject_adder_fault; /* test hook */
  unsigned threads;       /* 0: DSLR_SIM_THREADS or hardware concurrency */
  int64_t max_multiplier_steps; /* 0: 2^28 */
} dslr_sim_options;

typedef struct dslr_sim_result {
  int outputs_match;     /* bit-identical to the direct convolution */
  int outputs_all_zero;
  int cycles_match;      /* measured == analytic */
  int weight_loads_match;
  int latency_match;     /* first SoP digit on the predicted step */
  int64_t measured_cycles;
  int64_t predicted_cycles;
  int64_t per_pass_cycles;
  int64_t passes;
  int first_digit_step;
  int expected_first_digit_step;
  int64_t weight_loads;
  int64_t expected_weight_loads;
  int64_t multiplier_steps;
  int64_t mismatches;
} dslr_sim_result;

DSLR_API void dslr_sim_options_init(dslr_sim_options* opts);

/* Multiplier steps a simulation of this layer would take. cfg may be NULL
 * for the default tile geometry. */
DSLR_API dslr_status dslr_estimate_steps(const dslr_layer_spec* layer, const dslr_config* cfg, int64_t* steps);

/* Random activations and weights from opts->seed. Returns DSLR_ERR_RESOURCE
 * without running when the step estimate exceeds the guard. A run that
 * completes returns DSLR_OK; inspect the result flags for the verdict. */
DSLR_API dslr_status dslr_simulate_layer(const dslr_layer_spec* layer, const dslr_config* cfg,
                                         const dslr_sim_options* opts, dslr_sim_result* result);

/* Same, reading tensors from files; output_path may be NULL. */
DSLR_API dslr_status dslr_simulate_files(const dslr_layer_spec* layer, const dslr_config* cfg,
                                         const char* input_path, const char* weight_path,
                                         const char* output_path, const dslr_sim_options* opts,
                                         dslr_sim_result* result);

#ifdef __cplusplus
}
#endif

#endif
