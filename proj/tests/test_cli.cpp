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

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

const std::string kCli = MIMOSTREAM_CLI;
const std::string kDir = MIMOSTREAM_CONFIG_DIR;

struct Result {
  int code = -1;
  std::string out;  // stdout
  std::string err;  // stderr
};

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("mimostream_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result cli(const std::string& args) {
  static TempDir scratch;
  const std::string err_path = scratch.file("stderr.txt");
  const std::string cmd = "'" + kCli + "' " + args + " 2>'" + err_path + "'";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  return r;
}

const char* kSmall = R"({
  "schema_version": 1, "pairs": 2, "tx_antennas": 2, "rx_antennas": 1,
  "gamma": 30.9, "beta": 30.9, "path_gain": {"snr_db": -5, "cross_ratio": 0.1},
  "simulation": {"slots": 80, "warmup_fraction": 0.1},
  "calibration": {"draws": 8, "qwp_grid_points": 2, "qwp_slots": 30},
  "oracle": {"grid_points": 20, "channel_samples": 2, "level_multipliers": [1.0]}
})";

}  // namespace

TEST_CASE("help and usage") {
  CHECK(cli("--help").code == 0);
  CHECK(cli("run --help").code == 0);
  const auto v = cli("--version");
  CHECK(v.code == 0);
  CHECK_FALSE(v.out.empty());
  CHECK(cli("").code == 1);
  CHECK(cli("frobnicate").code == 1);
  CHECK(cli("run").code == 1);
  CHECK(cli("--threads 0 validate-config '" + kDir + "/k5_reference.json'").code == 1);
}

TEST_CASE("validate-config") {
  const auto ok = cli("validate-config '" + kDir + "/k5_reference.json'");
  CHECK(ok.code == 0);
  const json d = json::parse(ok.out);
  CHECK(d["valid"] == true);
  CHECK(d["manifest"]["hash"].get<std::string>().size() == 16);

  TempDir t;
  const auto bad = cli("validate-config '" + t.write("bad.json", R"({"schema_version": 1, "gamma": 1, "beta": 1, "eta": -1})") + "'");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("eta > 0 required") != std::string::npos);
  CHECK(bad.out.empty());
  const auto typo = cli("validate-config '" + t.write("typo.json", R"({"schema_version": 1, "gamma": 1, "beta": 1, "etta": 1})") + "'");
  CHECK(typo.code == 2);
  CHECK(typo.err.find("unknown key etta") != std::string::npos);
  CHECK(cli("validate-config '" + t.file("absent.json") + "'").code == 1);
}

TEST_CASE("exit codes for config and numerical failures") {
  TempDir t;
  std::string low = kSmall;
  low.replace(low.find("\"gamma\": 30.9"), 13, "\"gamma\": 1.00");
  low.replace(low.find("\"beta\": 30.9"), 12, "\"beta\": 1.00");
  const auto r = cli("precompute '" + t.write("low.json", low) + "'");
  CHECK(r.code == 2);
  CHECK(r.err.find("beta_k > c_k^inf required") != std::string::npos);

  std::string w = kSmall;
  w.replace(w.find("\"eta\"") == std::string::npos ? w.find("\"path_gain\"") : 0, 0, "\"eta\": 1e-6, ");
  w.replace(w.find("\"gamma\": 30.9"), 13, "\"gamma\": 60.0");
  const auto wc = cli("precompute '" + t.write("weights.json", w) + "'");
  CHECK(wc.code == 2);
  CHECK(wc.err.find("weight condition") != std::string::npos);

  std::string capped = kSmall;
  capped.replace(capped.find("\"level_multipliers\""), 0, "\"vi_max_sweeps\": 1, ");
  const auto n = cli("oracle-gap '" + t.write("capped.json", capped) + "'");
  CHECK(n.code == 3);
  CHECK(n.err.find("numerical error") != std::string::npos);

  const std::string cfg = t.write("small.json", kSmall);
  CHECK(cli("run -c bogus '" + cfg + "'").code == 1);
  CHECK(cli("run -c oracle-policy '" + cfg + "'").code == 1);
  CHECK(cli("sweep --axis snr --values '' '" + cfg + "'").code == 1);
  CHECK(cli("sweep --axis colour --values 1 '" + cfg + "'").code == 1);
  CHECK(cli("--out '" + t.file("no/such/dir.json") + "' validate-config '" + cfg + "'").code == 1);
}

TEST_CASE("run with trace") {
  TempDir t;
  const std::string cfg = t.write("small.json", kSmall);
  const std::string out = t.file("run.json");
  const std::string trace = t.file("trace.csv");
  const auto r = cli("--seed 4 --seeds 2 --out '" + out + "' --trace '" + trace + "' run -c proposed '" + cfg + "'");
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const json d = json::parse(slurp(out));
  CHECK(d["manifest"]["seeds"] == json::array({4, 5}));
  CHECK(d["manifest"]["outputs"]["trace"] == trace);
  const std::string csv = slurp(trace);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "slot,pair,Q_bits,rate_bps,power_w,active");
  std::string line, last;
  int rows = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("#", 0) == 0) {
      last = line;
      continue;
    }
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
  }
  CHECK(rows == 160);
  CHECK(last == "# manifest " + d["manifest"]["hash"].get<std::string>());

  const auto s = cli("--slots 20 run -c zero '" + cfg + "'");
  CHECK(s.code == 1);
  const auto s2 = cli("run --slots 20 -c zero '" + cfg + "'");
  CHECK(s2.code == 0);
  CHECK(json::parse(s2.out)["slots"] == 20);
}

TEST_CASE("byte-identical reruns") {
  TempDir t;
  const std::string cfg = t.write("small.json", kSmall);
  for (const std::string cmd : {"precompute", "run -c proposed", "run -c qwp", "oracle-gap",
                                "sweep --axis weight_beta --values 20,40 --controllers zero,proposed,cop",
                                "validate-config"}) {
    for (const std::string threads : {"1", "2"}) {
      const std::string args = "--seeds 2 --threads " + threads + " " + cmd + " '" + cfg + "'";
      const auto a = cli(args);
      const auto b = cli(args);
      INFO(args);
      REQUIRE(a.code == 0);
      CHECK(a.out == b.out);
      CHECK(json::parse(a.out)["manifest"].contains("hash"));
    }
  }
  // Cached value model.
  const std::string vm = t.file("vm.json");
  REQUIRE(cli("--out '" + vm + "' precompute '" + cfg + "'").code == 0);
  const auto direct = json::parse(cli("run -c proposed '" + cfg + "'").out);
  const auto cached = json::parse(cli("--value-model '" + vm + "' run -c proposed '" + cfg + "'").out);
  CHECK(direct["episodes"] == cached["episodes"]);
  std::string other = kSmall;
  other.replace(other.find("\"beta\": 30.9"), 12, "\"beta\": 31.0");
  CHECK(cli("--value-model '" + vm + "' run -c proposed '" + t.write("other.json", other) + "'").code == 2);
}

TEST_CASE("two-pair smoke run within budget") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = cli("run -c proposed '" + kDir + "/k2_oracle.json'");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(r.code == 0);
  const json d = json::parse(r.out);
  CHECK(d["slots"] == 10000);
  CHECK(secs < 60.0);
}
