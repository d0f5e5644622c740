/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the semcomm library. Objects are opaque handles; every
 * fallible call returns an sc_status and leaves a message in sc_last_error()
 * on failure. Strings returned through out-parameters are owned by the
 * library handle they came from unless documented otherwise.
 */
#ifndef SEMCOMM_H
#define SEMCOMM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SC_API __declspec(dllexport)
#else
#define SC_API __attribute__((visibility("default")))
#endif

typedef enum sc_status {
  SC_OK = 0,
  SC_ERR_INVALID_ARGUMENT = 1,
  SC_ERR_PARSE = 2,
  SC_ERR_BUDGET = 3,
  SC_ERR_PRECONDITION = 4,
  SC_ERR_INTERNAL = 5
} sc_status;

typedef struct sc_config sc_config;
typedef struct sc_dataset sc_dataset;
typedef struct sc_output sc_output;

/* Message of the last failed call on this thread; empty after success. */
SC_API const char* sc_last_error(void);
/* 1-based position of the last parse error on this thread; 0 if unknown. */
SC_API size_t sc_last_error_line(void);
SC_API size_t sc_last_error_column(void);

SC_API const char* sc_version(void);

SC_API sc_status sc_config_new(sc_config** out);
SC_API void sc_config_free(sc_config* config);
/* Sets one option by name, e.g. ("seed", "7") or ("check", "semantic-consistency").
 * Repeating "check" appends. */
SC_API sc_status sc_config_set(sc_config* config, const char* key, const char* value);

/* Loads an input space and optional protocol and labels files (NULL or ""
 * to omit). The message metric and vocabulary come from `config`. */
SC_API sc_status sc_dataset_load(const char* inputs_path, const char* protocol_path, const char* labels_path,
                                 const sc_config* config, sc_dataset** out);
SC_API void sc_dataset_free(sc_dataset* dataset);
SC_API sc_status sc_dataset_inputs(const sc_dataset* dataset, size_t* count);
/* Message index of every input; `out` holds at least sc_dataset_inputs() entries. */
SC_API sc_status sc_dataset_assignment(const sc_dataset* dataset, size_t* out, size_t capacity);

/* Runs "analyze", "metrics", "verify", "optimize" or "counterexample".
 * `dataset` may be NULL for verify and counterexample. */
SC_API sc_status sc_run(const char* command, const sc_dataset* dataset, const sc_config* config, sc_output** out);
SC_API void sc_output_free(sc_output* output);
/* Report as deterministic JSON text. */
SC_API sc_status sc_output_report(const sc_output* output, const char** json);
/* 1 when every verdict matched the configured expectation (or none was set). */
SC_API sc_status sc_output_expectations_met(const sc_output* output, int* met);
SC_API sc_status sc_output_file_count(const sc_output* output, size_t* count);
SC_API sc_status sc_output_file(const sc_output* output, size_t index, const char** name, const char** content);

#ifdef __cplusplus
}
#endif

#endif /* SEMCOMM_H */
