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


#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "errors.hpp"
#include "hash.hpp"

#ifndef MIMOSTREAM_VERSION
#define MIMOSTREAM_VERSION "0.0.0"
#endif

namespace mimostream {

namespace {

Scenario load_for_command(const std::string& config_path, const CommandOptions& opts) {
  Scenario sc = load_scenario(config_path);
  if (opts.slots < 0) throw UsageError("slots must be positive");
  if (opts.slots > 0) sc.episode.slots = opts.slots;
  if (opts.threads < 1) throw UsageError("threads >= 1 required");
  return sc;
}

ValueModel obtain_model(const Scenario& sc, const CommandOptions& opts) {
  if (opts.value_model.empty()) return build_value_model(sc.cfg, sc.value_model);
  return value_model_from_json(read_json_file(opts.value_model), sc);
}

struct Stat {
  double mean = 0.0;
  double stderr_ = 0.0;
};

Stat stat(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

double pair_mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pair_sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Mean and standard error across seeds of the headline scalars.
json summarize(const std::vector<const Metrics*>& ms) {
  std::map<std::string, std::vector<double>> cols;
  for (const Metrics* m : ms) {
    cols["objective"].push_back(m->objective);
    cols["total_power_w"].push_back(pair_sum(m->avg_power));
    cols["interruption_prob"].push_back(pair_mean(m->interruption_prob));
    cols["interruption_smooth"].push_back(pair_mean(m->interruption_smooth));
    cols["overflow_prob"].push_back(pair_mean(m->overflow_prob));
    cols["overflow_smooth"].push_back(pair_mean(m->overflow_smooth));
  }
  json out;
  for (const auto& [k, v] : cols) {
    const Stat s = stat(v);
    out[k] = {{"mean", s.mean}, {"stderr", s.stderr_}};
  }
  return out;
}

std::string attach(json doc, const json& manifest) {
  doc["manifest"] = manifest;
  return dump_json(doc);
}

}  // namespace

std::vector<std::uint64_t> seed_list(const Scenario& sc, const CommandOptions& opts) {
  if (opts.seeds < 1) throw UsageError("seeds >= 1 required");
  const std::uint64_t first = opts.seed.value_or(sc.cfg.seed);
  std::vector<std::uint64_t> out;
  for (int i = 0; i < opts.seeds; ++i) out.push_back(first + static_cast<std::uint64_t>(i));
  return out;
}

json make_manifest(const std::string& command, const Scenario& sc, const CommandOptions& opts,
                   const std::vector<std::uint64_t>& seeds) {
  json m = {{"tool", "mimostream"},
            {"version", MIMOSTREAM_VERSION},
            {"command", command},
            {"config_hash", config_hash(sc)},
            {"model_hash", model_hash(sc)},
            {"value_model", opts.value_model.empty() ? json(nullptr) : json(opts.value_model)},
            {"seeds", seeds},
            {"threads", opts.threads},
            {"outputs", {{"out", opts.out}, {"trace", opts.trace}}}};
  m["hash"] = fnv1a_hex(m.dump());
  return m;
}

std::string trace_csv(const std::vector<TraceRow>& rows, const std::string& manifest_hash) {
  std::string out = "slot,pair,Q_bits,rate_bps,power_w,active\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%ld,%d,%.17g,%.17g,%.17g,%d\n", r.slot, r.pair, r.q_bits, r.rate_bps, r.power_w,
                  r.active ? 1 : 0);
    out += buf;
  }
  out += "# manifest " + manifest_hash + "\n";
  return out;
}

std::string cmd_precompute(const std::string& config_path, const CommandOptions& opts) {
  const Scenario sc = load_for_command(config_path, opts);
  const ValueModel vm = build_value_model(sc.cfg, sc.value_model);
  return attach(value_model_to_json(vm, sc), make_manifest("precompute", sc, opts, {}));
}

std::string cmd_run(const std::string& config_path, const std::string& controller, const CommandOptions& opts) {
  const ControllerKind kind = parse_controller(controller);
  Scenario sc = load_for_command(config_path, opts);
  const auto seeds = seed_list(sc, opts);
  const json manifest = make_manifest("run", sc, opts, seeds);

  std::optional<ValueModel> model;
  if (kind == ControllerKind::kProposed) model = obtain_model(sc, opts);
  sc.episode.trace = !opts.trace.empty();
  const RunSummary rs = run_controller(sc, kind, seeds, opts.threads, model ? &*model : nullptr);

  json episodes = json::array();
  std::vector<const Metrics*> ms;
  for (std::size_t i = 0; i < rs.episodes.size(); ++i) {
    episodes.push_back({{"seed", seeds[i]},
                        {"metrics", metrics_to_json(rs.episodes[i].metrics)},
                        {"conservation_error", rs.episodes[i].conservation_error}});
    ms.push_back(&rs.episodes[i].metrics);
  }
  json doc = {{"controller", controller_name(kind)},
              {"slots", sc.episode.slots},
              {"warmup_fraction", sc.episode.warmup_fraction},
              {"episodes", episodes},
              {"summary", summarize(ms)}};
  if (kind == ControllerKind::kZfp || kind == ControllerKind::kCop || kind == ControllerKind::kQwp)
    doc["calibration"] = calibration_to_json(rs.calibration);
  if (!opts.trace.empty()) {
    doc["trace_seed"] = seeds.front();
    write_text_file(opts.trace, trace_csv(rs.episodes.front().trace, manifest["hash"].get<std::string>()));
  }
  return attach(std::move(doc), manifest);
}

std::string cmd_sweep(const std::string& config_path, const std::string& axis, const std::vector<double>& values,
                      const std::vector<std::string>& controllers, const CommandOptions& opts) {
  const SweepAxis ax = parse_axis(axis);
  if (values.empty()) throw UsageError("sweep needs at least one axis value");
  SweepSpec spec;
  spec.axis = ax;
  spec.values = values;
  for (const auto& c : controllers) spec.controllers.push_back(parse_controller(c));
  if (spec.controllers.empty()) spec.controllers = default_controllers();
  const Scenario sc = load_for_command(config_path, opts);
  spec.seeds = seed_list(sc, opts);
  const json manifest = make_manifest("sweep", sc, opts, spec.seeds);
  const auto cells = sweep(sc, spec, opts.threads);

  json jc = json::array();
  for (const auto& c : cells)
    jc.push_back({{"axis_value", c.axis_value},
                  {"controller", controller_name(c.controller)},
                  {"seed", c.seed},
                  {"metrics", metrics_to_json(c.metrics)}});
  json summary = json::array();
  const std::size_t ns = spec.seeds.size();
  for (std::size_t i = 0; i < cells.size(); i += ns) {
    std::vector<const Metrics*> ms;
    for (std::size_t s = 0; s < ns; ++s) ms.push_back(&cells[i + s].metrics);
    summary.push_back({{"axis_value", cells[i].axis_value},
                       {"controller", controller_name(cells[i].controller)},
                       {"seeds", ns},
                       {"stats", summarize(ms)}});
  }
  json names = json::array();
  for (auto c : spec.controllers) names.push_back(controller_name(c));
  json doc = {{"axis", axis_name(ax)}, {"values", values}, {"controllers", names}, {"cells", jc}, {"summary", summary}};
  return attach(std::move(doc), manifest);
}

std::string cmd_oracle_gap(const std::string& config_path, const CommandOptions& opts) {
  Scenario sc = load_for_command(config_path, opts);
  if (opts.grid_points < 0 || opts.channel_samples < 0) throw UsageError("grid sizes must be positive");
  if (opts.grid_points > 0) sc.oracle.grid_points = opts.grid_points;
  if (opts.channel_samples > 0) sc.oracle.channel_samples = opts.channel_samples;
  if (opts.grid_points == 1) throw UsageError("grid_points >= 2 required");
  if (opts.seed) sc.oracle.seed = *opts.seed;
  const json manifest = make_manifest("oracle-gap", sc, opts, {sc.oracle.seed});
  const ValueModel vm = obtain_model(sc, opts);
  const OracleGapReport r = oracle_gap(sc.cfg, vm, sc.oracle);
  json doc = {{"theta_star", r.theta_star},
              {"theta_tilde", r.theta_tilde},
              {"gap", r.gap()},
              {"cost_units", "per slot"},
              {"vi", {{"span", r.vi_span}, {"sweeps", r.vi_sweeps}, {"tol", sc.oracle.vi_tol}}},
              {"policy_evaluation", r.simulated ? "monte_carlo" : "power_iteration"},
              {"grid",
               {{"points_per_flow", sc.oracle.grid_points},
                {"q_max_bits", sc.oracle.q_max_factor * sc.cfg.q_high},
                {"rounding", "nearest"},
                {"states", r.states}}},
              {"catalog",
               {{"channel_samples", r.samples},
                {"sample_seed", sc.oracle.seed},
                {"actions", r.actions},
                {"product_actions", r.product_actions},
                {"proposed_actions", r.proposed_actions},
                {"level_multipliers", sc.oracle.level_multipliers},
                {"hash", r.catalog_hash}}}};
  return attach(std::move(doc), manifest);
}

std::string cmd_validate_config(const std::string& config_path, const CommandOptions& opts) {
  const Scenario sc = load_scenario(config_path);
  json doc = {{"valid", true}, {"config_hash", config_hash(sc)}, {"normalized", scenario_to_json(sc)}};
  return attach(std::move(doc), make_manifest("validate-config", sc, opts, {}));
}

}  // namespace mimostream
