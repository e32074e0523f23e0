/* Copyright 2026 The MT-RAM Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the MT-RAM library: run configuration, the pipeline
 * commands and checkpoint inference. Objects are opaque handles; every call
 * returns a status code and, on failure, leaves a message retrievable with
 * mtram_last_error() on the calling thread. Strings returned through char**
 * are owned by the caller and released with mtram_string_free(). */

#ifndef MTRAM_MTRAM_H_
#define MTRAM_MTRAM_H_

#include <stddef.h>

#if defined(_WIN32)
#define MTRAM_API __declspec(dllexport)
#else
#define MTRAM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mtram_status {
  MTRAM_OK = 0,
  /* Invalid configuration, arguments or input files. */
  MTRAM_ERR_VALIDATION = 1,
  /* Failure while running (I/O, corrupt data, divergence). */
  MTRAM_ERR_RUNTIME = 2
} mtram_status;

typedef struct mtram_config mtram_config;
typedef struct mtram_model mtram_model;

/* Receives one progress line (no trailing newline). */
typedef void (*mtram_log_fn)(const char* line, void* user_data);

MTRAM_API const char* mtram_version(void);

/* Message for the last failed call on this thread; "" when none. After a
 * validation failure it lists every problem, one per line. */
MTRAM_API const char* mtram_last_error(void);

MTRAM_API void mtram_string_free(char* s);

/* Configuration with built-in defaults. */
MTRAM_API mtram_status mtram_config_create(mtram_config** out);
MTRAM_API void mtram_config_destroy(mtram_config* cfg);
/* Merges a JSON file over the current values; unknown keys are rejected. */
MTRAM_API mtram_status mtram_config_load(mtram_config* cfg, const char* path);
/* Sets one field by dotted path, e.g. ("train.epochs", "3"). */
MTRAM_API mtram_status mtram_config_set(mtram_config* cfg, const char* dotted_key,
                                        const char* value);
MTRAM_API mtram_status mtram_config_set_seed(mtram_config* cfg, unsigned long long seed);
/* Canonical JSON of the full configuration. */
MTRAM_API mtram_status mtram_config_to_json(const mtram_config* cfg, char** out_json);
/* 16 hex digits; the seed and output root do not contribute. */
MTRAM_API mtram_status mtram_config_hash(const mtram_config* cfg, char** out_hash);
/* Checks every field; on failure the error message lists all problems. */
MTRAM_API mtram_status mtram_config_validate(const mtram_config* cfg);

/* Pipeline commands. On success *out_result (when non-null) receives a JSON
 * object with "summary" (artifact paths, config hash, seed), "text" (the
 * human-readable report) and "warnings". `log` may be null. */
MTRAM_API mtram_status mtram_cmd_gen(const mtram_config* cfg, mtram_log_fn log, void* user_data,
                                     char** out_result);
MTRAM_API mtram_status mtram_cmd_pretrain(const mtram_config* cfg, mtram_log_fn log,
                                          void* user_data, char** out_result);
MTRAM_API mtram_status mtram_cmd_train(const mtram_config* cfg, mtram_log_fn log,
                                       void* user_data, char** out_result);
MTRAM_API mtram_status mtram_cmd_eval(const mtram_config* cfg, mtram_log_fn log,
                                      void* user_data, char** out_result);
MTRAM_API mtram_status mtram_cmd_ablate(const mtram_config* cfg, mtram_log_fn log,
                                        void* user_data, char** out_result);

/* Trained model loaded from a checkpoint written by mtram_cmd_train. */
MTRAM_API mtram_status mtram_model_load(const char* checkpoint_path, mtram_model** out);
MTRAM_API void mtram_model_destroy(mtram_model* model);
MTRAM_API mtram_status mtram_model_label_counts(const mtram_model* model, size_t* m_fine,
                                                size_t* m_coarse);
/* Fine (m_fine) and coarse (m_coarse) label probabilities for raw text,
 * tokenized and encoded the way the model was trained. Either output may be
 * null. Fails when tokenization leaves nothing to encode. */
MTRAM_API mtram_status mtram_model_predict(mtram_model* model, const char* text,
                                           double* fine_probs, double* coarse_probs);
/* Code string of a fine or coarse label index (tasks: 0 fine, 1 coarse). */
MTRAM_API mtram_status mtram_model_label_name(const mtram_model* model, int task, size_t index,
                                              char** out_name);

#ifdef __cplusplus
}
#endif

#endif /* MTRAM_MTRAM_H_ */
