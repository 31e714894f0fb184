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


#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "mimostream/mimostream.h"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

const std::string kDir = MIMOSTREAM_CONFIG_DIR;

const char* kSmall = R"({
  "schema_version": 1, "pairs": 2, "tx_antennas": 2, "rx_antennas": 1,
  "gamma": 30.9, "beta": 30.9, "path_gain": {"snr_db": -5, "cross_ratio": 0.1},
  "simulation": {"slots": 50, "warmup_fraction": 0.1},
  "oracle": {"grid_points": 20, "channel_samples": 2, "level_multipliers": [1.0]}
})";

// Owns a string returned by the library.
struct Text {
  char* p = nullptr;
  ~Text() { ms_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("mimostream_capi_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = (path / name).string();
    std::ofstream(p) << text;
    return p;
  }
};

}  // namespace

TEST_CASE("library metadata") {
  CHECK(std::strlen(ms_version()) > 0);
  CHECK(std::string(ms_status_name(MS_OK)) == "ok");
  CHECK(std::string(ms_status_name(MS_ERR_CONFIG)) == "config error");
  CHECK(std::string(ms_status_name(MS_ERR_NUMERICAL)) == "numerical error");
  ms_command_options o;
  ms_command_options_init(&o);
  CHECK(o.seeds == 1);
  CHECK(o.threads == 1);
  CHECK(o.has_seed == 0);
  CHECK(o.slots == 0);
  CHECK(o.out == nullptr);
}

TEST_CASE("scenario handles") {
  ms_scenario* sc = nullptr;
  REQUIRE(ms_scenario_parse(kSmall, &sc) == MS_OK);
  CHECK(std::string(ms_last_error()).empty());
  int k = 0;
  CHECK(ms_scenario_pairs(sc, &k) == MS_OK);
  CHECK(k == 2);
  char hash[17];
  CHECK(ms_scenario_hash(sc, hash, sizeof hash) == MS_OK);
  CHECK(std::strlen(hash) == 16);
  char tiny[8];
  CHECK(ms_scenario_hash(sc, tiny, sizeof tiny) == MS_ERR_USAGE);
  Text t;
  CHECK(ms_scenario_to_json(sc, &t.p) == MS_OK);
  const json n = json::parse(t.str());
  CHECK(n["gamma"] == json::array({30.9, 30.9}));

  // The normalised text parses back to the same hash.
  ms_scenario* again = nullptr;
  REQUIRE(ms_scenario_parse(t.str().c_str(), &again) == MS_OK);
  char hash2[17];
  CHECK(ms_scenario_hash(again, hash2, sizeof hash2) == MS_OK);
  CHECK(std::string(hash) == hash2);
  ms_scenario_free(again);
  ms_scenario_free(sc);
  ms_scenario_free(nullptr);

  ms_scenario* bad = nullptr;
  CHECK(ms_scenario_parse("{\"schema_version\": 1, \"gamma\": 1}", &bad) == MS_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(std::string(ms_last_error()).find("missing key beta") != std::string::npos);
  CHECK(ms_scenario_parse("not json", &bad) == MS_ERR_CONFIG);
  CHECK(ms_scenario_parse(nullptr, &bad) == MS_ERR_USAGE);
  CHECK(ms_scenario_parse(kSmall, nullptr) == MS_ERR_USAGE);
  CHECK(ms_scenario_load("/nonexistent/x.json", &bad) == MS_ERR_IO);
  CHECK(ms_scenario_pairs(nullptr, &k) == MS_ERR_USAGE);

  ms_scenario* ref = nullptr;
  REQUIRE(ms_scenario_load((kDir + "/k5_reference.json").c_str(), &ref) == MS_OK);
  CHECK(ms_scenario_pairs(ref, &k) == MS_OK);
  CHECK(k == 5);
  ms_scenario_free(ref);
}

TEST_CASE("value model handles") {
  ms_scenario* sc = nullptr;
  REQUIRE(ms_scenario_parse(kSmall, &sc) == MS_OK);
  ms_value_model* vm = nullptr;
  REQUIRE(ms_value_model_build(sc, &vm) == MS_OK);

  ms_flow_constants f;
  CHECK(ms_value_model_flow(vm, 0, &f) == MS_OK);
  CHECK(f.lambda < 0.0);
  CHECK(f.q_star_bits == doctest::Approx(1e5).epsilon(1e-12));
  CHECK(f.slope_inf > 0.0);
  CHECK(f.c1 > 0.0);
  CHECK(ms_value_model_flow(vm, 2, &f) == MS_ERR_USAGE);
  CHECK(ms_value_model_flow(vm, -1, &f) == MS_ERR_USAGE);

  double e01 = 0.0;
  double e10 = 1.0;
  CHECK(ms_value_model_coupling(vm, 0, 1, &e01) == MS_OK);
  CHECK(ms_value_model_coupling(vm, 1, 0, &e10) == MS_OK);
  CHECK(e01 == e10);
  CHECK(ms_value_model_coupling(vm, 0, 5, &e01) == MS_ERR_USAGE);

  const double q[2] = {2e4, 1.8e5};
  double g[2];
  CHECK(ms_value_model_gradient(vm, q, 2, g) == MS_OK);
  CHECK(g[0] < 0.0);
  CHECK(g[1] > 0.0);
  CHECK(ms_value_model_gradient(vm, q, 1, g) == MS_ERR_USAGE);

  // Serialise, reload through a file, compare.
  TempDir dir;
  Text doc;
  REQUIRE(ms_value_model_to_json(vm, &doc.p) == MS_OK);
  const std::string path = (dir.path / "vm.json").string();
  CHECK(ms_write_file(path.c_str(), doc.p) == MS_OK);
  ms_value_model* back = nullptr;
  REQUIRE(ms_value_model_load(sc, path.c_str(), &back) == MS_OK);
  double gb[2];
  CHECK(ms_value_model_gradient(back, q, 2, gb) == MS_OK);
  CHECK(gb[0] == g[0]);
  CHECK(gb[1] == g[1]);
  ms_value_model_free(back);

  // A model built for one scenario is refused by another.
  ms_scenario* other = nullptr;
  std::string text = kSmall;
  text.replace(text.find("\"beta\": 30.9"), 12, "\"beta\": 31.0");
  REQUIRE(ms_scenario_parse(text.c_str(), &other) == MS_OK);
  CHECK(ms_value_model_load(other, path.c_str(), &back) == MS_ERR_CONFIG);
  CHECK(std::string(ms_last_error()).find("model_hash") != std::string::npos);
  ms_scenario_free(other);

  Text m;
  CHECK(ms_run_episode(sc, vm, "proposed", 3, &m.p) == MS_OK);
  const json mj = json::parse(m.str());
  CHECK(mj["pairs"] == 2);
  CHECK(mj["slots"] == 45);
  Text z;
  CHECK(ms_run_episode(sc, nullptr, "zero", 3, &z.p) == MS_OK);
  CHECK(json::parse(z.str())["avg_power_w"] == json::array({0.0, 0.0}));
  Text none;
  CHECK(ms_run_episode(sc, nullptr, "proposed", 3, &none.p) == MS_ERR_USAGE);
  CHECK(ms_run_episode(sc, vm, "bogus", 3, &none.p) == MS_ERR_USAGE);
  CHECK(none.p == nullptr);

  ms_value_model_free(vm);
  ms_scenario_free(sc);

  // beta at or below c_inf.
  std::string low = kSmall;
  low.replace(low.find("\"gamma\": 30.9"), 13, "\"gamma\": 1.00");
  low.replace(low.find("\"beta\": 30.9"), 12, "\"beta\": 1.00");
  ms_scenario* ls = nullptr;
  REQUIRE(ms_scenario_parse(low.c_str(), &ls) == MS_OK);
  ms_value_model* lv = nullptr;
  CHECK(ms_value_model_build(ls, &lv) == MS_ERR_CONFIG);
  CHECK(std::string(ms_last_error()).find("beta_k > c_k^inf required") != std::string::npos);
  ms_scenario_free(ls);
}

TEST_CASE("command entry points") {
  TempDir dir;
  const std::string cfg = dir.write("small.json", kSmall);
  ms_command_options o;
  ms_command_options_init(&o);

  Text a, b;
  REQUIRE(ms_cmd_precompute(cfg.c_str(), &o, &a.p) == MS_OK);
  REQUIRE(ms_cmd_precompute(cfg.c_str(), &o, &b.p) == MS_OK);
  CHECK(a.str() == b.str());
  CHECK(json::parse(a.str())["manifest"].contains("hash"));

  Text r;
  o.seeds = 2;
  REQUIRE(ms_cmd_run(cfg.c_str(), "zero", &o, &r.p) == MS_OK);
  CHECK(json::parse(r.str())["episodes"].size() == 2);

  Text s;
  const double values[2] = {-5.0, 0.0};
  const char* ctrls[1] = {"zero"};
  REQUIRE(ms_cmd_sweep(cfg.c_str(), "snr", values, 2, ctrls, 1, &o, &s.p) == MS_OK);
  CHECK(json::parse(s.str())["cells"].size() == 4);
  Text e;
  CHECK(ms_cmd_sweep(cfg.c_str(), "snr", nullptr, 0, ctrls, 1, &o, &e.p) == MS_ERR_USAGE);

  Text g;
  REQUIRE(ms_cmd_oracle_gap(cfg.c_str(), &o, &g.p) == MS_OK);
  CHECK(json::parse(g.str()).contains("theta_star"));

  Text v;
  REQUIRE(ms_cmd_validate_config(cfg.c_str(), nullptr, &v.p) == MS_OK);
  CHECK(json::parse(v.str())["valid"] == true);

  // Value iteration capped at one sweep cannot converge.
  std::string capped = kSmall;
  capped.replace(capped.find("\"level_multipliers\""), 0, "\"vi_max_sweeps\": 1, ");
  const std::string cfg_capped = dir.write("capped.json", capped);
  Text n;
  CHECK(ms_cmd_oracle_gap(cfg_capped.c_str(), &o, &n.p) == MS_ERR_NUMERICAL);
  CHECK(std::string(ms_last_error()).find("did not converge") != std::string::npos);

  const std::string cfg_bad = dir.write("bad.json", "{\"schema_version\": 1, \"gamma\": 1, \"beta\": 1, \"zeta\": 2}");
  Text bad;
  CHECK(ms_cmd_validate_config(cfg_bad.c_str(), &o, &bad.p) == MS_ERR_CONFIG);
  CHECK(bad.p == nullptr);
  CHECK(ms_cmd_run(cfg.c_str(), "proposed", &o, nullptr) == MS_ERR_USAGE);
  CHECK(ms_write_file("/nonexistent/dir/x", "x") == MS_ERR_IO);
}
