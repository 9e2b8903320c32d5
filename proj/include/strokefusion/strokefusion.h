/*
 * C interface to the strokefusion library.
 *
 * Every function returns an sf_status. On failure the thread-local message
 * returned by sf_last_error() describes the problem; multi-line messages carry
 * one diagnostic per line. Strings handed out through `char**` parameters are
 * owned by the caller and released with sf_string_free().
 */
#ifndef STROKEFUSION_H
#define STROKEFUSION_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(STROKEFUSION_BUILDING)
#    define SF_API __declspec(dllexport)
#  else
#    define SF_API __declspec(dllimport)
#  endif
#else
#  define SF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
    SF_OK = 0,
    SF_ERROR_ARGUMENT = 1,   /* null handle or bad enum value */
    SF_ERROR_VALIDATION = 2, /* input data violates an invariant */
    SF_ERROR_IO = 3,
    SF_ERROR_CONFIG = 4,
    SF_ERROR_INTERNAL = 5
} sf_status;

typedef enum sf_format { SF_FORMAT_CSV = 0, SF_FORMAT_JSON = 1 } sf_format;

typedef enum sf_outcome { SF_OUTCOME_GOOD = 0, SF_OUTCOME_POOR = 1 } sf_outcome;

typedef struct sf_cohort sf_cohort;
typedef struct sf_config sf_config;

typedef struct sf_test_result {
    double statistic;
    double p_value;
    size_t n_effective;
    int exact; /* 1: exact null distribution, 0: normal approximation */
} sf_test_result;

SF_API const char* sf_version(void);
SF_API const char* sf_last_error(void);
SF_API void sf_string_free(char* text);

/* Cohorts -------------------------------------------------------------- */

SF_API sf_status sf_cohort_load_csv(const char* path, sf_cohort** out);
SF_API sf_status sf_cohort_parse_csv(const char* text, sf_cohort** out);
SF_API void sf_cohort_free(sf_cohort* cohort);
SF_API size_t sf_cohort_patient_count(const sf_cohort* cohort);
SF_API size_t sf_cohort_module_count(const sf_cohort* cohort);
/* NULL when index is out of range. Valid while the cohort lives. */
SF_API const char* sf_cohort_module_name(const sf_cohort* cohort, size_t index);

/* Writes one `patient_id,field,reason` CSV row per violation (with header) to
 * *report and the count to *n_violations. Succeeds even when violations exist. */
SF_API sf_status sf_cohort_validate(const sf_cohort* cohort, char** report, size_t* n_violations);

/* Run configuration ---------------------------------------------------- */

/* Defaults: variable nihss, strategy youden, k 5, runs 10, seed 0, stratified. */
SF_API sf_status sf_config_new(sf_config** out);
SF_API void sf_config_free(sf_config* config);
/* Overlays the keys of a JSON run configuration; unknown keys are rejected. */
SF_API sf_status sf_config_merge_json(sf_config* config, const char* json_text);
SF_API sf_status sf_config_set_variable(sf_config* config, const char* variable);
SF_API sf_status sf_config_set_norm_bounds(sf_config* config, double min, double max);
SF_API sf_status sf_config_set_tau(sf_config* config, double tau);
SF_API sf_status sf_config_set_tau_star(sf_config* config, double tau_star);
SF_API sf_status sf_config_set_strategy(sf_config* config, const char* strategy);
SF_API sf_status sf_config_set_k(sf_config* config, size_t k);
SF_API sf_status sf_config_set_runs(sf_config* config, size_t runs);
SF_API sf_status sf_config_set_seed(sf_config* config, uint64_t seed);
SF_API sf_status sf_config_set_stratified(sf_config* config, int stratified);
SF_API sf_status sf_config_set_cohort_path(sf_config* config, const char* path);
SF_API sf_status sf_config_set_output(sf_config* config, const char* path);
SF_API sf_status sf_config_set_format(sf_config* config, sf_format format);
/* NULL when unset. Valid until the next change to the config. */
SF_API const char* sf_config_cohort_path(const sf_config* config);
SF_API const char* sf_config_output(const sf_config* config);
/* Returns `fallback` when no format was configured. */
SF_API sf_format sf_config_format(const sf_config* config, sf_format fallback);
SF_API sf_status sf_config_to_json(const sf_config* config, char** json_text);

/* Operations ----------------------------------------------------------- */

/* Per-patient fusion table: patient_id, p_<module>, w_<module>, p_mrs,
 * label_unweighted, label_weighted. Thresholds missing from the config are
 * searched on the (labeled) cohort itself. */
SF_API sf_status sf_fuse_cohort(const sf_cohort* cohort, const sf_config* config,
                                sf_format format, char** output);

/* Cross-validated summary of every module and both ensembles as JSON, plus
 * the mean +/- std table as CSV and as aligned text. Any output pointer may
 * be NULL. */
SF_API sf_status sf_cv_run(const sf_cohort* cohort, const sf_config* config,
                           char** summary_json, char** table_csv, char** table_text);

/* Wilcoxon comparison of two summaries on one measure. Model names select a
 * model inside cv reports; NULL or "" picks the weighted ensemble. */
SF_API sf_status sf_compare_summaries(const char* summary_a_json, const char* summary_b_json,
                                      const char* measure, const char* model_a,
                                      const char* model_b, char** result_json);

/* Synthetic cohort CSV from a JSON spec. `seed_override` applies when non-NULL. */
SF_API sf_status sf_synth_csv(const char* spec_json, const uint64_t* seed_override,
                              char** cohort_csv);

/* Building blocks ------------------------------------------------------ */

/* One patient through the weighted fusion rule with normalized covariate c.
 * out_weights has room for n values. */
SF_API sf_status sf_fuse_probabilities(const double* probs, size_t n, double c, double tau,
                                       double tau_star, double* out_weights,
                                       double* out_fused, sf_outcome* out_label);

SF_API sf_status sf_auc(const double* scores, const sf_outcome* truth, size_t n, double* out);

SF_API sf_status sf_wilcoxon(const double* a, const double* b, size_t n, sf_test_result* out);

#ifdef __cplusplus
}
#endif

#endif /* STROKEFUSION_H */
