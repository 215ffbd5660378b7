/*
 * ssboost C interface.
 *
 * Opaque handles own their objects; release them with the matching *_free.
 * Every function returns an ssb_status; on failure ssb_last_error() holds a
 * message for the calling thread. Strings returned through char** are
 * allocated by the library and released with ssb_string_free.
 */
#ifndef SSBOOST_H
#define SSBOOST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SSB_API __declspec(dllexport)
#else
#define SSB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ssb_dataset_s* ssb_dataset;
typedef struct ssb_model_s* ssb_model;

typedef enum ssb_status {
  SSB_OK = 0,
  SSB_ERROR_ARGUMENT = 1, /* null handle/pointer or invalid option */
  SSB_ERROR_IO = 2,       /* missing or unwritable file */
  SSB_ERROR_FORMAT = 3,   /* malformed EEGB / JSON input */
  SSB_ERROR_COMPUTE = 4,  /* numerical or validation failure */
  SSB_ERROR_INTERNAL = 5
} ssb_status;

SSB_API const char* ssb_version(void);
SSB_API const char* ssb_last_error(void);
SSB_API void ssb_string_free(char* s);

/* datasets */
SSB_API ssb_status ssb_dataset_read(const char* path, int session_index, ssb_dataset* out);
SSB_API ssb_status ssb_dataset_write(ssb_dataset ds, const char* path);
/* plant_spec_json: a synthetic PlantSpec object. */
SSB_API ssb_status ssb_dataset_generate(const char* plant_spec_json, ssb_dataset* out);
SSB_API ssb_status ssb_dataset_info(ssb_dataset ds, size_t* n_trials, size_t* n_samples, size_t* n_channels,
                                    double* sample_rate_hz);
SSB_API ssb_status ssb_dataset_labels(ssb_dataset ds, int* labels, size_t capacity);
/* JSON array of violated invariants (empty when valid). */
SSB_API ssb_status ssb_dataset_validate(ssb_dataset ds, char** report_json);
SSB_API void ssb_dataset_free(ssb_dataset ds);

/* Generates EEGB file(s) from a PlantSpec, DriftSchedule or drift request.
 * A single session is written to out_path; a series to <stem>_s<t><ext>.
 * written_json (nullable) receives the list of files written. */
SSB_API ssb_status ssb_generate_files(const char* spec_json, const char* out_path, char** written_json);

/* Band universe and its constraint report; spec_json may be NULL. */
SSB_API ssb_status ssb_bands(const char* spec_json, char** out_json);

/* Training. mode: "plain" | "sb" | "fb" | "sfb". JSON arguments may be NULL for
 * defaults. seed (nullable) overrides both the boost and universe seeds.
 * trace_json (nullable) receives the boosting trace. */
SSB_API ssb_status ssb_train(ssb_dataset ds, const char* mode, const char* boost_json, const char* universe_json,
                             const uint64_t* seed, unsigned threads, ssb_model* model, char** trace_json);

SSB_API ssb_status ssb_model_load(const char* path, ssb_model* out);
SSB_API ssb_status ssb_model_save(ssb_model model, const char* path);
SSB_API ssb_status ssb_model_to_json(ssb_model model, char** out_json);
SSB_API ssb_status ssb_model_selected_k(ssb_model model, int* selected_k);
SSB_API void ssb_model_free(ssb_model model);

/* scores/labels must hold n_trials entries (labels may be NULL). */
SSB_API ssb_status ssb_predict(ssb_model model, ssb_dataset ds, unsigned threads, double* scores, int* labels,
                               size_t capacity);
/* {"n", "accuracy", "confusion": {...}} */
SSB_API ssb_status ssb_evaluate(ssb_model model, ssb_dataset ds, unsigned threads, char** out_json);

/* Importance table (CSV) and drift summary (JSON) for session-ordered models. */
SSB_API ssb_status ssb_importance(const ssb_model* models, size_t n_models, int absolute, char** csv,
                                  char** drift_json);

/* Runs an experiment described by a JSON config file; summary_json nullable. */
SSB_API ssb_status ssb_run_experiment(const char* config_path, const uint64_t* seed, unsigned threads, int verbose,
                                      char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* SSBOOST_H */
