/*
 * Copyright 2026 The Actionfield Authors
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

#ifndef ACTIONFIELD_ACTIONFIELD_H_
#define ACTIONFIELD_ACTIONFIELD_H_

/* C interface to libactionfield. All functions are safe to call from C.
 * Functions returning af_status record a one-line reason retrievable with
 * af_last_error() on the calling thread. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(AF_BUILDING_LIBRARY)
#    define AF_API __declspec(dllexport)
#  else
#    define AF_API __declspec(dllimport)
#  endif
#else
#  define AF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values double as process exit codes for the command-line tool. */
typedef enum af_status {
  AF_OK = 0,
  AF_ERR_CONFIG = 1,
  AF_ERR_DATA = 2,
  AF_ERR_DIVERGENCE = 3,
  AF_ERR_INTERNAL = 4
} af_status;

typedef struct af_config af_config;
typedef struct af_model af_model;

AF_API const char* af_version(void);

/* Reason for the most recent failure on this thread, or "" after success. */
AF_API const char* af_last_error(void);

AF_API af_status af_config_create(af_config** out);
AF_API af_status af_config_load(const char* path, af_config** out);
/* value is JSON text; a bare word is taken as a string. */
AF_API af_status af_config_set(af_config* cfg, const char* key, const char* value);
/* Copies the resolved config as JSON into buf. *needed receives the size
 * including the terminator; buf may be NULL to query it. */
AF_API af_status af_config_dump(const af_config* cfg, char* buf, size_t buf_size, size_t* needed);
AF_API void af_config_free(af_config* cfg);

/* Each command writes into out_dir (created if missing). */
AF_API af_status af_cmd_generate(const af_config* cfg, const char* out_dir);
AF_API af_status af_cmd_train(const af_config* cfg, const char* out_dir);
AF_API af_status af_cmd_sample(const af_config* cfg, const char* out_dir);
AF_API af_status af_cmd_simulate(const af_config* cfg, const char* out_dir);
AF_API af_status af_cmd_compare(const af_config* cfg, const char* out_dir);

AF_API af_status af_model_load(const char* checkpoint_path, af_model** out);
AF_API void af_model_free(af_model* model);
AF_API int af_model_action_dim(const af_model* model);
AF_API int af_model_chunk_count(const af_model* model);
/* Borrowed pointer, valid until af_model_free. NULL if out of range. */
AF_API const char* af_model_chunk_id(const af_model* model, int index);

/* Samples chunk `index` on K uniform points of tau in [-1, 1]. Each output
 * buffer is K * D doubles, row-major (one row per sample), and may be NULL
 * to skip that order. Derivatives are in physical time for duration T;
 * T <= 0 uses the chunk's stored duration. */
AF_API af_status af_model_sample(const af_model* model, int index, int K, double T,
                                 double* position, double* velocity,
                                 double* acceleration, double* jerk);

/* Raw field output and its tau-derivatives at arbitrary tau, no time scaling.
 * out has (order + 1) * n * D doubles laid out [order][n][D]. */
AF_API af_status af_model_eval(const af_model* model, int index, const double* tau, int n,
                               int order, double* out);

#ifdef __cplusplus
}
#endif

#endif /* ACTIONFIELD_ACTIONFIELD_H_ */
