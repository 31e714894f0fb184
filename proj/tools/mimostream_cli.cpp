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


#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mimostream/mimostream.h"

namespace {

int exit_code(ms_status s) {
  switch (s) {
    case MS_OK: return 0;
    case MS_ERR_CONFIG: return 2;
    case MS_ERR_NUMERICAL: return 3;
    default: return 1;
  }
}

struct Globals {
  std::uint64_t seed = 0;
  int seeds = 1;
  int threads = 1;
  std::string out;
  std::string trace;
  std::string value_model;
};

// Writes the document to --out or stdout and frees it.
int emit(ms_status s, char* doc, const Globals& g) {
  if (s != MS_OK) {
    std::fprintf(stderr, "mimostream: %s: %s\n", ms_status_name(s), ms_last_error());
    return exit_code(s);
  }
  if (g.out.empty()) {
    std::fputs(doc, stdout);
    ms_string_free(doc);
    return 0;
  }
  const ms_status w = ms_write_file(g.out.c_str(), doc);
  ms_string_free(doc);
  if (w != MS_OK) {
    std::fprintf(stderr, "mimostream: %s: %s\n", ms_status_name(w), ms_last_error());
    return exit_code(w);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Queue-aware MIMO precoding simulator"};
  app.set_version_flag("--version", std::string(ms_version()));
  app.require_subcommand(1);

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "first seed (default: the config seed)");
  app.add_option("--seeds", g.seeds, "number of consecutive seeds")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "output file (default: stdout)");
  app.add_option("--trace", g.trace, "per-slot trace CSV (run)");
  app.add_option("--value-model", g.value_model, "cached value model from precompute");

  std::string config;
  auto add_config = [&](CLI::App* sub) { sub->add_option("config", config, "scenario JSON")->required(); };

  auto* pre = app.add_subcommand("precompute", "build and serialize the value model");
  add_config(pre);

  auto* run = app.add_subcommand("run", "simulate one controller over several seeds");
  add_config(run);
  std::string controller;
  long slots = 0;
  run->add_option("-c,--controller", controller, "proposed, zfp, cop, qwp or zero")->required();
  run->add_option("--slots", slots, "episode length (default: the config value)")->check(CLI::PositiveNumber);

  auto* sw = app.add_subcommand("sweep", "run controllers along a parameter axis");
  add_config(sw);
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> controllers;
  sw->add_option("--axis", axis, "snr, pairs, sensing_distance or weight_beta")->required();
  sw->add_option("--values", values, "axis values")
      ->delimiter(',')
      ->required()
      ->check(CLI::Validator([](std::string& v) { return v.empty() ? std::string("empty axis value") : std::string(); }, "NUMBER"));
  sw->add_option("--controllers", controllers, "controller subset")->delimiter(',');
  sw->add_option("--slots", slots, "episode length (default: the config value)")->check(CLI::PositiveNumber);

  auto* og = app.add_subcommand("oracle-gap", "compare the proposed policy with value iteration");
  add_config(og);
  int grid_points = 0;
  int samples = 0;
  og->add_option("--grid-points", grid_points, "queue levels per flow")->check(CLI::Range(2, 4096));
  og->add_option("--samples", samples, "channel samples")->check(CLI::Range(1, 4096));

  auto* vc = app.add_subcommand("validate-config", "check a scenario and print its normalized form");
  add_config(vc);

  for (auto* sub : {pre, run, sw, og, vc}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  ms_command_options o;
  ms_command_options_init(&o);
  o.has_seed = seed_opt->count() > 0;
  o.seed = g.seed;
  o.seeds = g.seeds;
  o.threads = g.threads;
  o.slots = slots;
  o.out = g.out.c_str();
  o.trace = g.trace.empty() ? nullptr : g.trace.c_str();
  o.value_model = g.value_model.empty() ? nullptr : g.value_model.c_str();
  o.grid_points = grid_points;
  o.channel_samples = samples;

  char* doc = nullptr;
  ms_status s = MS_OK;
  if (*pre) {
    s = ms_cmd_precompute(config.c_str(), &o, &doc);
  } else if (*run) {
    s = ms_cmd_run(config.c_str(), controller.c_str(), &o, &doc);
  } else if (*sw) {
    std::vector<const char*> names;
    for (const auto& c : controllers) names.push_back(c.c_str());
    s = ms_cmd_sweep(config.c_str(), axis.c_str(), values.data(), values.size(), names.data(), names.size(), &o, &doc);
  } else if (*og) {
    s = ms_cmd_oracle_gap(config.c_str(), &o, &doc);
  } else {
    s = ms_cmd_validate_config(config.c_str(), &o, &doc);
  }
  return emit(s, doc, g);
}
