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

#include <string>
#include <string_view>

#include <json.hpp>

#include "sim.hpp"

namespace mimostream {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kValueModelSchemaVersion = 1;
inline constexpr std::string_view kValueModelKind = "mimostream.value_model";

// Parses a scenario document. Unknown keys, wrong types and invariant
// violations throw ConfigError with the offending key in the message.
// Keys ending in _db are converted to linear scale here and nowhere else.
Scenario scenario_from_json(const json& doc);
Scenario load_scenario(const std::string& path);

// Normalised form: every field explicit, linear scale, vectors expanded.
json scenario_to_json(const Scenario& sc);

// Hash of the normalised scenario.
std::string config_hash(const Scenario& sc);
// Hash of the fields the value model depends on (system + value_model).
std::string model_hash(const Scenario& sc);

json value_model_to_json(const ValueModel& vm, const Scenario& sc);
// Rebuilds a model for `sc`; throws ConfigError when the stored model hash
// does not match.
ValueModel value_model_from_json(const json& doc, const Scenario& sc);

json metrics_to_json(const Metrics& m);
Metrics metrics_from_json(const json& doc);
json calibration_to_json(const Calibration& c);

// Structural check of a sweep document; throws ConfigError.
void validate_sweep_json(const json& doc);

json read_json_file(const std::string& path);
// Pretty-printed with a trailing newline.
std::string dump_json(const json& doc);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace mimostream
