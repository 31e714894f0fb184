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


#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config_io.hpp"

namespace mimostream {

// Options shared by the command entry points. Every document produced by a
// command carries a manifest whose hash covers the configuration, command,
// seeds, thread count and output paths.
struct CommandOptions {
  std::optional<std::uint64_t> seed;  // first seed; defaults to the config seed
  int seeds = 1;                      // seeds used: seed, seed + 1, ...
  int threads = 1;
  long slots = 0;                     // 0 keeps simulation.slots from the config
  std::string out;                    // recorded in the manifest
  std::string trace;                  // trace CSV path (run only)
  std::string value_model;            // cached value-model JSON to load instead of rebuilding
  int grid_points = 0;                // oracle overrides; 0 keeps the config value
  int channel_samples = 0;
};

std::vector<std::uint64_t> seed_list(const Scenario& sc, const CommandOptions& opts);

json make_manifest(const std::string& command, const Scenario& sc, const CommandOptions& opts,
                   const std::vector<std::uint64_t>& seeds);

std::string trace_csv(const std::vector<TraceRow>& rows, const std::string& manifest_hash);

// Each returns the JSON document text; cmd_run also writes opts.trace when set.
std::string cmd_precompute(const std::string& config_path, const CommandOptions& opts);
std::string cmd_run(const std::string& config_path, const std::string& controller, const CommandOptions& opts);
std::string cmd_sweep(const std::string& config_path, const std::string& axis, const std::vector<double>& values,
                      const std::vector<std::string>& controllers, const CommandOptions& opts);
std::string cmd_oracle_gap(const std::string& config_path, const CommandOptions& opts);
// Normalised configuration with its hash; throws ConfigError on violations.
std::string cmd_validate_config(const std::string& config_path, const CommandOptions& opts = {});

}  // namespace mimostream
