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


#include "mimostream/mimostream.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "commands.hpp"
#include "config_io.hpp"
#include "errors.hpp"

struct ms_scenario {
  mimostream::Scenario sc;
};

struct ms_value_model {
  mimostream::ValueModel vm;
  mimostream::Scenario sc;
};

namespace {

thread_local std::string g_last_error;

ms_status fail(ms_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs fn and maps the error hierarchy onto status codes.
template <class Fn>
ms_status guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return MS_OK;
  } catch (const mimostream::UsageError& e) {
    return fail(MS_ERR_USAGE, e.what());
  } catch (const mimostream::DomainError& e) {
    return fail(MS_ERR_USAGE, e.what());
  } catch (const mimostream::ConfigError& e) {
    return fail(MS_ERR_CONFIG, e.what());
  } catch (const mimostream::NumericalError& e) {
    return fail(MS_ERR_NUMERICAL, e.what());
  } catch (const mimostream::IoError& e) {
    return fail(MS_ERR_IO, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(MS_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MS_ERR_INTERNAL, "unknown exception");
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw mimostream::UsageError(std::string(what) + " must not be NULL");
}

mimostream::CommandOptions convert(const ms_command_options* o) {
  mimostream::CommandOptions c;
  if (o == nullptr) return c;
  if (o->has_seed) c.seed = o->seed;
  c.seeds = o->seeds;
  c.threads = o->threads;
  c.slots = o->slots;
  if (o->out) c.out = o->out;
  if (o->trace) c.trace = o->trace;
  if (o->value_model) c.value_model = o->value_model;
  c.grid_points = o->grid_points;
  c.channel_samples = o->channel_samples;
  return c;
}

}  // namespace

extern "C" {

const char* ms_version(void) { return MIMOSTREAM_VERSION; }

const char* ms_last_error(void) { return g_last_error.c_str(); }

const char* ms_status_name(ms_status s) {
  switch (s) {
    case MS_OK: return "ok";
    case MS_ERR_USAGE: return "usage error";
    case MS_ERR_CONFIG: return "config error";
    case MS_ERR_NUMERICAL: return "numerical error";
    case MS_ERR_IO: return "io error";
    case MS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ms_string_free(char* s) { std::free(s); }

ms_status ms_scenario_load(const char* path, ms_scenario** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new ms_scenario{mimostream::load_scenario(path)};
  });
}

ms_status ms_scenario_parse(const char* json_text, ms_scenario** out) {
  return guard([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = nullptr;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw mimostream::ConfigError(std::string("invalid JSON (") + e.what() + ")");
    }
    *out = new ms_scenario{mimostream::scenario_from_json(doc)};
  });
}

void ms_scenario_free(ms_scenario* sc) { delete sc; }

ms_status ms_scenario_pairs(const ms_scenario* sc, int* out) {
  return guard([&] {
    need(sc, "scenario");
    need(out, "out");
    *out = sc->sc.cfg.pairs;
  });
}

ms_status ms_scenario_hash(const ms_scenario* sc, char* buf, size_t len) {
  return guard([&] {
    need(sc, "scenario");
    need(buf, "buf");
    const std::string h = mimostream::config_hash(sc->sc);
    if (len < h.size() + 1) throw mimostream::UsageError("hash buffer needs 17 bytes");
    std::memcpy(buf, h.c_str(), h.size() + 1);
  });
}

ms_status ms_scenario_to_json(const ms_scenario* sc, char** out) {
  return guard([&] {
    need(sc, "scenario");
    need(out, "out");
    *out = dup_string(mimostream::dump_json(mimostream::scenario_to_json(sc->sc)));
  });
}

ms_status ms_value_model_build(const ms_scenario* sc, ms_value_model** out) {
  return guard([&] {
    need(sc, "scenario");
    need(out, "out");
    *out = nullptr;
    *out = new ms_value_model{mimostream::build_value_model(sc->sc.cfg, sc->sc.value_model), sc->sc};
  });
}

ms_status ms_value_model_load(const ms_scenario* sc, const char* path, ms_value_model** out) {
  return guard([&] {
    need(sc, "scenario");
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new ms_value_model{mimostream::value_model_from_json(mimostream::read_json_file(path), sc->sc), sc->sc};
  });
}

ms_status ms_value_model_to_json(const ms_value_model* vm, char** out) {
  return guard([&] {
    need(vm, "value model");
    need(out, "out");
    *out = dup_string(mimostream::dump_json(mimostream::value_model_to_json(vm->vm, vm->sc)));
  });
}

void ms_value_model_free(ms_value_model* vm) { delete vm; }

ms_status ms_value_model_flow(const ms_value_model* vm, int k, ms_flow_constants* out) {
  return guard([&] {
    need(vm, "value model");
    need(out, "out");
    if (k < 0 || k >= static_cast<int>(vm->vm.flows.size())) throw mimostream::UsageError("pair index out of range");
    const auto& f = vm->vm.flows[k];
    *out = ms_flow_constants{f.lambda, f.c_inf, f.q_star, f.slope_inf, f.d_k, f.pc.c1, f.pc.c2, f.pc.c2_log, f.pc.c3};
  });
}

ms_status ms_value_model_coupling(const ms_value_model* vm, int k, int j, double* out) {
  return guard([&] {
    need(vm, "value model");
    need(out, "out");
    const int n = static_cast<int>(vm->vm.flows.size());
    if (k < 0 || k >= n || j < 0 || j >= n) throw mimostream::UsageError("pair index out of range");
    *out = vm->vm.coupling(k, j);
  });
}

ms_status ms_value_model_gradient(const ms_value_model* vm, const double* q, size_t n, double* grad) {
  return guard([&] {
    need(vm, "value model");
    need(q, "q");
    need(grad, "grad");
    if (n != vm->vm.flows.size()) throw mimostream::UsageError("q must have one entry per pair");
    for (size_t i = 0; i < n; ++i)
      if (!(q[i] >= 0.0) || !std::isfinite(q[i])) throw mimostream::UsageError("queue lengths must be finite and >= 0");
    const auto g = vm->vm.gradient(std::span<const double>(q, n));
    std::copy(g.begin(), g.end(), grad);
  });
}

ms_status ms_run_episode(const ms_scenario* sc, const ms_value_model* vm, const char* controller, uint64_t seed,
                         char** metrics_json) {
  return guard([&] {
    need(sc, "scenario");
    need(controller, "controller");
    need(metrics_json, "metrics_json");
    mimostream::ControllerSetup setup;
    setup.kind = mimostream::parse_controller(controller);
    setup.wmmse = sc->sc.wmmse;
    if (setup.kind == mimostream::ControllerKind::kProposed) {
      need(vm, "value model");
      if (vm->vm.flows.size() != static_cast<size_t>(sc->sc.cfg.pairs))
        throw mimostream::UsageError("value model does not match the scenario");
      setup.model = &vm->vm;
    } else if (setup.kind != mimostream::ControllerKind::kZero) {
      setup.calibration = mimostream::calibrate_baselines(sc->sc.cfg, sc->sc.calibration, sc->sc.wmmse,
                                                          sc->sc.episode.warmup_fraction);
    }
    mimostream::EpisodeOptions eo = sc->sc.episode;
    eo.trace = false;
    const auto r = mimostream::run_episode(setup, sc->sc.cfg, seed, eo);
    *metrics_json = dup_string(mimostream::dump_json(mimostream::metrics_to_json(r.metrics)));
  });
}

void ms_command_options_init(ms_command_options* opts) {
  if (opts == nullptr) return;
  *opts = ms_command_options{};
  opts->seeds = 1;
  opts->threads = 1;
}

ms_status ms_cmd_precompute(const char* config_path, const ms_command_options* opts, char** doc) {
  return guard([&] {
    need(config_path, "config_path");
    need(doc, "doc");
    *doc = dup_string(mimostream::cmd_precompute(config_path, convert(opts)));
  });
}

ms_status ms_cmd_run(const char* config_path, const char* controller, const ms_command_options* opts, char** doc) {
  return guard([&] {
    need(config_path, "config_path");
    need(controller, "controller");
    need(doc, "doc");
    *doc = dup_string(mimostream::cmd_run(config_path, controller, convert(opts)));
  });
}

ms_status ms_cmd_sweep(const char* config_path, const char* axis, const double* values, size_t n_values,
                       const char* const* controllers, size_t n_controllers, const ms_command_options* opts,
                       char** doc) {
  return guard([&] {
    need(config_path, "config_path");
    need(axis, "axis");
    need(doc, "doc");
    if (n_values > 0) need(values, "values");
    if (n_controllers > 0) need(controllers, "controllers");
    std::vector<double> v(values, values + n_values);
    std::vector<std::string> c;
    for (size_t i = 0; i < n_controllers; ++i) {
      need(controllers[i], "controller name");
      c.emplace_back(controllers[i]);
    }
    *doc = dup_string(mimostream::cmd_sweep(config_path, axis, v, c, convert(opts)));
  });
}

ms_status ms_cmd_oracle_gap(const char* config_path, const ms_command_options* opts, char** doc) {
  return guard([&] {
    need(config_path, "config_path");
    need(doc, "doc");
    *doc = dup_string(mimostream::cmd_oracle_gap(config_path, convert(opts)));
  });
}

ms_status ms_cmd_validate_config(const char* config_path, const ms_command_options* opts, char** doc) {
  return guard([&] {
    need(config_path, "config_path");
    need(doc, "doc");
    *doc = dup_string(mimostream::cmd_validate_config(config_path, convert(opts)));
  });
}

ms_status ms_write_file(const char* path, const char* text) {
  return guard([&] {
    need(path, "path");
    need(text, "text");
    mimostream::write_text_file(path, text);
  });
}

}  // extern "C"
