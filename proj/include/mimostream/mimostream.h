/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The mimostream authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef MIMOSTREAM_MIMOSTREAM_H
#define MIMOSTREAM_MIMOSTREAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(MIMOSTREAM_BUILDING_LIBRARY)
#define MS_API __attribute__((visibility("default")))
#else
#define MS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ms_status {
  MS_OK = 0,
  MS_ERR_USAGE = 1,     /* bad argument, unknown controller or axis */
  MS_ERR_CONFIG = 2,    /* scenario violates a model invariant */
  MS_ERR_NUMERICAL = 3, /* root finding or factorization failed */
  MS_ERR_IO = 4,
  MS_ERR_INTERNAL = 5
} ms_status;

typedef struct ms_scenario ms_scenario;
typedef struct ms_value_model ms_value_model;

/* Per-flow constants of a value model. d_k is NaN when the small-queue
   asymptote has no root. */
typedef struct ms_flow_constants {
  double lambda;
  double c_inf;
  double q_star_bits;
  double slope_inf;
  double d_k;
  double c1, c2, c2_log, c3;
} ms_flow_constants;

typedef struct ms_command_options {
  uint64_t seed;
  int has_seed; /* 0: use the seed from the config */
  int seeds;    /* number of consecutive seeds */
  int threads;
  long slots;   /* 0: keep the config value */
  const char* out;
  const char* trace;
  const char* value_model;
  int grid_points;
  int channel_samples;
} ms_command_options;

MS_API const char* ms_version(void);
/* Message of the last failed call on this thread; "" when none. */
MS_API const char* ms_last_error(void);
MS_API const char* ms_status_name(ms_status s);

/* Strings returned through char** belong to the caller. */
MS_API void ms_string_free(char* s);

MS_API ms_status ms_scenario_load(const char* path, ms_scenario** out);
MS_API ms_status ms_scenario_parse(const char* json_text, ms_scenario** out);
MS_API void ms_scenario_free(ms_scenario* sc);
MS_API ms_status ms_scenario_pairs(const ms_scenario* sc, int* out);
/* 16 hex digits plus terminator; buf must hold 17 bytes. */
MS_API ms_status ms_scenario_hash(const ms_scenario* sc, char* buf, size_t len);
MS_API ms_status ms_scenario_to_json(const ms_scenario* sc, char** out);

MS_API ms_status ms_value_model_build(const ms_scenario* sc, ms_value_model** out);
MS_API ms_status ms_value_model_load(const ms_scenario* sc, const char* path, ms_value_model** out);
MS_API ms_status ms_value_model_to_json(const ms_value_model* vm, char** out);
MS_API void ms_value_model_free(ms_value_model* vm);
MS_API ms_status ms_value_model_flow(const ms_value_model* vm, int k, ms_flow_constants* out);
MS_API ms_status ms_value_model_coupling(const ms_value_model* vm, int k, int j, double* out);
/* q and grad hold one entry per pair. */
MS_API ms_status ms_value_model_gradient(const ms_value_model* vm, const double* q, size_t n, double* grad);

/* One episode; metrics as a JSON object. vm may be NULL except for the
   proposed controller. */
MS_API ms_status ms_run_episode(const ms_scenario* sc, const ms_value_model* vm, const char* controller, uint64_t seed,
                                char** metrics_json);

MS_API void ms_command_options_init(ms_command_options* opts);
MS_API ms_status ms_cmd_precompute(const char* config_path, const ms_command_options* opts, char** doc);
MS_API ms_status ms_cmd_run(const char* config_path, const char* controller, const ms_command_options* opts,
                            char** doc);
/* controllers may be NULL (n_controllers 0) for the default set. */
MS_API ms_status ms_cmd_sweep(const char* config_path, const char* axis, const double* values, size_t n_values,
                              const char* const* controllers, size_t n_controllers, const ms_command_options* opts,
                              char** doc);
MS_API ms_status ms_cmd_oracle_gap(const char* config_path, const ms_command_options* opts, char** doc);
MS_API ms_status ms_cmd_validate_config(const char* config_path, const ms_command_options* opts, char** doc);

MS_API ms_status ms_write_file(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif
