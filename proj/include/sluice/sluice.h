// Copyright 2026 The Sluice Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the sluice library. Every entry point returns a status
 * code; on failure the message is available from sluice_last_error() on
 * the calling thread until that thread's next call. Strings returned
 * through `char**` are owned by the caller and released with
 * sluice_string_free(). */
#ifndef SLUICE_SLUICE_H_
#define SLUICE_SLUICE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SLUICE_API __declspec(dllexport)
#else
#define SLUICE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sluice_status {
  SLUICE_OK = 0,
  SLUICE_ERR_USAGE = 1,    /* bad arguments, config keys or values */
  SLUICE_ERR_INPUT = 2,    /* missing, empty or inconsistent data */
  SLUICE_ERR_PARSE = 3,    /* malformed corpus, manifest or snapshot */
  SLUICE_ERR_IO = 4,
  SLUICE_ERR_NUMERIC = 5,  /* non-finite loss during training */
  SLUICE_ERR_MODEL = 6,    /* snapshot does not fit its model */
  SLUICE_ERR_INTERNAL = 7
} sluice_status;

typedef struct sluice_config sluice_config;
typedef struct sluice_model sluice_model;

/* Receives one plain log line, without a trailing newline. */
typedef void (*sluice_log_fn)(const char* line, void* user);

SLUICE_API const char* sluice_version(void);
SLUICE_API const char* sluice_status_name(sluice_status status);
/* Never NULL; empty after a successful call. */
SLUICE_API const char* sluice_last_error(void);
SLUICE_API void sluice_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

SLUICE_API sluice_status sluice_config_new(sluice_config** out);
/* Relative corpus paths resolve against the file's directory. */
SLUICE_API sluice_status sluice_config_load(const char* path, sluice_config** out);
SLUICE_API void sluice_config_free(sluice_config* config);
/* Same keys and value syntax as the config file; later calls win. */
SLUICE_API sluice_status sluice_config_set(sluice_config* config, const char* key,
                                           const char* value);
SLUICE_API sluice_status sluice_config_serialize(const sluice_config* config, char** out);
/* Newline-separated list of accepted keys. */
SLUICE_API sluice_status sluice_config_keys(char** out);

/* ---- training and evaluation ------------------------------------------ */

/* Writes manifest.json first, then metrics.json, timing.json, alpha.csv,
 * beta.csv and model.snapshot into `out_dir`. */
SLUICE_API sluice_status sluice_train(const sluice_config* config, const char* out_dir,
                                      sluice_log_fn log, void* user);
/* Reruns any manifest written by this library after checking corpus
 * checksums. NULL or empty `out_dir` reuses the recorded directory. */
SLUICE_API sluice_status sluice_run_manifest(const char* manifest_path, const char* out_dir,
                                             sluice_log_fn log, void* user);

SLUICE_API sluice_status sluice_model_load(const char* snapshot_path, sluice_model** out);
SLUICE_API void sluice_model_free(sluice_model* model);
SLUICE_API size_t sluice_model_task_count(const sluice_model* model);
/* NULL when `index` is out of range. */
SLUICE_API const char* sluice_model_task_name(const sluice_model* model, size_t index);
/* Token accuracy of one task on a CoNLL file read with that task's column.
 * NULL `task` selects the main task. */
SLUICE_API sluice_status sluice_model_eval(sluice_model* model, const char* task,
                                           const char* corpus_path, double* accuracy);
/* {"corpus": path, "accuracy": {task: value, ...}} over every task, or only
 * `task` when it is not NULL. */
SLUICE_API sluice_status sluice_model_eval_json(sluice_model* model, const char* task,
                                                const char* corpus_path, char** out);

/* ---- experiments -------------------------------------------------------- */

/* `mode` is "random" or "copy". Writes synthetic.csv. */
SLUICE_API sluice_status sluice_synthetic(const sluice_config* config, const char* mode,
                                          const size_t* sweep, size_t sweep_len,
                                          size_t seeds, size_t epochs, const char* out_dir,
                                          sluice_log_fn log, void* user);
/* Writes noise_curves.csv and noise_summary.json. */
SLUICE_API sluice_status sluice_noise(const sluice_config* config, size_t seeds,
                                      size_t max_epochs, const char* out_dir,
                                      sluice_log_fn log, void* user);
/* Runs the seven ablation cells, `jobs` at a time. Writes ablation.csv. */
SLUICE_API sluice_status sluice_ablate(const sluice_config* config, size_t jobs,
                                       const char* out_dir, sluice_log_fn log, void* user);

/* Writes generated CoNLL files train/dev/test/ood.conll into `dir`. */
SLUICE_API sluice_status sluice_write_toy(const char* dir, uint64_t seed);

#ifdef __cplusplus
}
#endif

#endif /* SLUICE_SLUICE_H_ */
