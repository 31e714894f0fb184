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


#include "config_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "hash.hpp"

namespace mimostream {

namespace {

double from_db(double db) { return std::pow(10.0, db / 10.0); }

// Object reader that remembers which keys were consumed so that typos are
// reported instead of silently ignored.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config must be a JSON object" : path_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double def) { return has(key) ? number(key) : def; }
  double number(const std::string& key) {
    require(key);
    const json& v = raw(key);
    if (!v.is_number()) fail(where(key) + " must be a number");
    return v.get<double>();
  }

  long long integer(const std::string& key, long long def) { return has(key) ? integer(key) : def; }
  long long integer(const std::string& key) {
    const double x = number(key);
    if (x != std::floor(x) || std::fabs(x) > 9.0e15) fail(where(key) + " must be an integer");
    return static_cast<long long>(x);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    fail(where(key) + " must be a non-negative integer");
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_boolean()) fail(where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const json& v = raw(key);
    if (!v.is_string()) fail(where(key) + " must be a string");
    return v.get<std::string>();
  }

  // Scalar broadcast to n entries, or an array of exactly n numbers.
  std::vector<double> per_pair(const std::string& key, int n) {
    require(key);
    const json& v = raw(key);
    if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(n), v.get<double>());
    if (!v.is_array()) fail(where(key) + " must be a number or an array");
    if (static_cast<int>(v.size()) != n) fail(where(key) + " must have one entry per pair");
    return numbers(key, v);
  }

  std::vector<double> numbers(const std::string& key, const json& v) const {
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(where(key) + " entries must be numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Reader child(const std::string& key) {
    seen_.insert(key);
    return Reader(j_.at(key), where(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail("unknown key " + where(it.key()));
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[noreturn]] static void fail(const std::string& msg) { throw ConfigError(msg); }

 private:
  void require(const std::string& key) const {
    if (!has(key)) fail("missing key " + where(key));
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

PathGainSpec read_path_gain(Reader r, int pairs) {
  PathGainSpec g;
  int sources = 0;
  for (const char* k : {"cross_ratio", "cross_ratio_db", "friis", "matrix"}) sources += r.has(k) ? 1 : 0;
  if (sources > 1) Reader::fail(r.where("") + " takes only one of cross_ratio, cross_ratio_db, friis, matrix");
  if (r.has("matrix")) {
    if (r.has("snr_db")) Reader::fail(r.where("matrix") + " excludes snr_db");
    g.mode = PathGainSpec::Mode::kMatrix;
    const json& m = r.raw("matrix");
    if (!m.is_array() || static_cast<int>(m.size()) != pairs) Reader::fail(r.where("matrix") + " must be K x K");
    g.matrix.resize(pairs, pairs);
    for (int i = 0; i < pairs; ++i) {
      if (!m[i].is_array() || static_cast<int>(m[i].size()) != pairs) Reader::fail(r.where("matrix") + " must be K x K");
      const auto row = r.numbers("matrix", m[i]);
      for (int j = 0; j < pairs; ++j) g.matrix(i, j) = row[j];
    }
  } else {
    g.snr_db = r.number("snr_db", g.snr_db);
    if (r.has("cross_ratio")) g.cross_ratio = r.number("cross_ratio");
    if (r.has("cross_ratio_db")) g.cross_ratio = from_db(r.number("cross_ratio_db"));
    if (r.has("friis")) {
      g.mode = PathGainSpec::Mode::kFriis;
      Reader f = r.child("friis");
      if (f.has("gr") && f.has("gr_db")) Reader::fail(f.where("gr") + " and gr_db are exclusive");
      if (f.has("gt") && f.has("gt_db")) Reader::fail(f.where("gt") + " and gt_db are exclusive");
      g.gr = f.has("gr_db") ? from_db(f.number("gr_db")) : f.number("gr", g.gr);
      g.gt = f.has("gt_db") ? from_db(f.number("gt_db")) : f.number("gt", g.gt);
      g.wavelength_m = f.number("wavelength_m", g.wavelength_m);
      g.distance_m = f.number("distance_m", g.distance_m);
      g.direct_gain_db = f.number("direct_gain_db", g.direct_gain_db);
      f.finish();
      if (!(g.gr > 0.0 && g.gt > 0.0 && g.wavelength_m > 0.0 && g.distance_m > 0.0))
        Reader::fail(f.where("") + " parameters must be positive");
    }
    if (!std::isfinite(g.snr_db)) Reader::fail(r.where("snr_db") + " must be finite");
    if (!(g.cross_ratio >= 0.0)) Reader::fail(r.where("cross_ratio") + " must be non-negative");
  }
  r.finish();
  return g;
}

InitScheme parse_init(const std::string& s) {
  if (s == "matched_filter") return InitScheme::kMatchedFilter;
  if (s == "random_seeded") return InitScheme::kRandomSeeded;
  throw ConfigError("wmmse.init must be matched_filter or random_seeded");
}

const char* init_name(InitScheme s) { return s == InitScheme::kMatchedFilter ? "matched_filter" : "random_seeded"; }

json matrix_json(const RMatrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

RMatrix matrix_from(const json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw ConfigError(std::string(what) + " must be K x K");
  RMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != n) throw ConfigError(std::string(what) + " must be K x K");
    for (int k = 0; k < n; ++k) m(i, k) = j[i][k].is_null() ? std::numeric_limits<double>::quiet_NaN() : j[i][k].get<double>();
  }
  return m;
}

// NaN has no JSON literal; it is written as null.
double num_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json system_json(const Scenario& sc) {
  const SystemConfig& c = sc.cfg;
  json j;
  j["pairs"] = c.pairs;
  j["tx_antennas"] = c.tx_antennas;
  j["rx_antennas"] = c.rx_antennas;
  j["bandwidth_hz"] = c.bandwidth_hz;
  j["slot_s"] = c.slot_s;
  j["zeta"] = c.zeta;
  j["playback_rate_bps"] = c.playback_bps;
  j["gamma"] = c.gamma;
  j["beta"] = c.beta;
  j["eta"] = c.eta;
  j["q_low_bits"] = c.q_low;
  j["q_high_bits"] = c.q_high;
  json g;
  switch (sc.gain.mode) {
    case PathGainSpec::Mode::kMatrix:
      g["matrix"] = matrix_json(sc.gain.matrix);
      break;
    case PathGainSpec::Mode::kFriis:
      g["snr_db"] = sc.gain.snr_db;
      g["friis"] = {{"gr", sc.gain.gr},
                    {"gt", sc.gain.gt},
                    {"wavelength_m", sc.gain.wavelength_m},
                    {"distance_m", sc.gain.distance_m},
                    {"direct_gain_db", sc.gain.direct_gain_db}};
      break;
    case PathGainSpec::Mode::kRatio:
      g["snr_db"] = sc.gain.snr_db;
      g["cross_ratio"] = sc.gain.cross_ratio;
      break;
  }
  j["path_gain"] = g;
  return j;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  Reader r(doc, "");
  if (!r.has("schema_version")) Reader::fail("missing key schema_version");
  if (r.integer("schema_version") != kConfigSchemaVersion)
    Reader::fail("unsupported schema_version (expected " + std::to_string(kConfigSchemaVersion) + ")");

  Scenario sc;
  SystemConfig& c = sc.cfg;
  c.pairs = static_cast<int>(r.integer("pairs", 5));
  c.tx_antennas = static_cast<int>(r.integer("tx_antennas", 5));
  c.rx_antennas = static_cast<int>(r.integer("rx_antennas", 2));
  if (c.pairs < 1) Reader::fail("pairs >= 1 required");
  if (c.pairs > 64) Reader::fail("pairs <= 64 required");
  if (c.tx_antennas < 1 || c.rx_antennas < 1 || c.tx_antennas > 8 || c.rx_antennas > 8)
    Reader::fail("antenna counts must be in [1, 8]");
  c.bandwidth_hz = r.number("bandwidth_hz", 1e6);
  c.slot_s = r.number("slot_s", 0.01);
  c.zeta = r.number("zeta", 1.0);
  c.playback_bps = r.has("playback_rate_bps") ? r.per_pair("playback_rate_bps", c.pairs)
                                              : std::vector<double>(static_cast<std::size_t>(c.pairs), 1.5e6);
  c.gamma = r.per_pair("gamma", c.pairs);
  c.beta = r.per_pair("beta", c.pairs);
  c.eta = r.number("eta", 50.0);
  c.q_low = r.number("q_low_bits", 5e4);
  c.q_high = r.number("q_high_bits", 1.5e5);
  c.seed = r.seed("seed", 1);

  if (r.has("path_gain")) sc.gain = read_path_gain(r.child("path_gain"), c.pairs);
  c.path_gain = sc.gain.build(c.pairs);

  if (r.has("wmmse")) {
    Reader w = r.child("wmmse");
    sc.wmmse.max_iters = static_cast<int>(w.integer("max_iters", sc.wmmse.max_iters));
    sc.wmmse.obj_tol = w.number("obj_tol", sc.wmmse.obj_tol);
    sc.wmmse.init = parse_init(w.string("init", init_name(sc.wmmse.init)));
    sc.wmmse.seed = w.seed("seed", sc.wmmse.seed);
    w.finish();
  }
  if (r.has("simulation")) {
    Reader s = r.child("simulation");
    sc.episode.slots = static_cast<long>(s.integer("slots", sc.episode.slots));
    sc.episode.warmup_fraction = s.number("warmup_fraction", sc.episode.warmup_fraction);
    if (s.has("q0_bits")) sc.episode.q0 = s.per_pair("q0_bits", c.pairs);
    s.finish();
  }
  if (r.has("value_model")) {
    Reader v = r.child("value_model");
    sc.value_model.table_points = static_cast<int>(v.integer("table_points", sc.value_model.table_points));
    sc.value_model.small_q_uses_gamma = v.boolean("small_q_uses_gamma", sc.value_model.small_q_uses_gamma);
    v.finish();
  }
  if (r.has("calibration")) {
    Reader k = r.child("calibration");
    sc.calibration.draws = static_cast<int>(k.integer("draws", sc.calibration.draws));
    sc.calibration.seed = k.seed("seed", sc.calibration.seed);
    sc.calibration.qwp_grid_points = static_cast<int>(k.integer("qwp_grid_points", sc.calibration.qwp_grid_points));
    sc.calibration.qwp_slots = static_cast<long>(k.integer("qwp_slots", sc.calibration.qwp_slots));
    k.finish();
  }
  if (r.has("oracle")) {
    Reader o = r.child("oracle");
    OracleOptions& oo = sc.oracle;
    oo.grid_points = static_cast<int>(o.integer("grid_points", oo.grid_points));
    oo.channel_samples = static_cast<int>(o.integer("channel_samples", oo.channel_samples));
    if (o.has("level_multipliers")) {
      const json& v = o.raw("level_multipliers");
      if (!v.is_array()) Reader::fail("oracle.level_multipliers must be an array");
      oo.level_multipliers = o.numbers("level_multipliers", v);
    }
    oo.include_proposed = o.boolean("include_proposed", oo.include_proposed);
    oo.q_max_factor = o.number("q_max_factor", oo.q_max_factor);
    oo.seed = o.seed("seed", oo.seed);
    oo.budget = static_cast<std::size_t>(o.integer("budget", static_cast<long long>(oo.budget)));
    oo.vi_tol = o.number("vi_tol", oo.vi_tol);
    oo.vi_max_sweeps = static_cast<int>(o.integer("vi_max_sweeps", oo.vi_max_sweeps));
    oo.vi_damping = o.number("vi_damping", oo.vi_damping);
    o.finish();
  }
  r.finish();

  c.validate();
  try {
    sc.wmmse.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("wmmse: ") + e.what());
  }
  if (sc.episode.slots < 1) Reader::fail("simulation.slots >= 1 required");
  if (!(sc.episode.warmup_fraction >= 0.0 && sc.episode.warmup_fraction < 1.0))
    Reader::fail("simulation.warmup_fraction must be in [0, 1)");
  for (double q : sc.episode.q0)
    if (!(q >= 0.0) || !std::isfinite(q)) Reader::fail("simulation.q0_bits must be finite and non-negative");
  if (sc.value_model.table_points < 8) Reader::fail("value_model.table_points >= 8 required");
  if (sc.calibration.draws < 1 || sc.calibration.qwp_grid_points < 1 || sc.calibration.qwp_slots < 10)
    Reader::fail("calibration sizes must be positive (qwp_slots >= 10)");
  const OracleOptions& oo = sc.oracle;
  if (oo.grid_points < 2 || oo.channel_samples < 1) Reader::fail("oracle.grid_points >= 2 and channel_samples >= 1 required");
  for (double m : oo.level_multipliers)
    if (!(m > 0.0) || !std::isfinite(m)) Reader::fail("oracle.level_multipliers must be positive");
  if (!(oo.q_max_factor >= 1.0)) Reader::fail("oracle.q_max_factor >= 1 required");
  if (!(oo.vi_tol > 0.0) || oo.vi_max_sweeps < 1) Reader::fail("oracle.vi_tol > 0 and vi_max_sweeps >= 1 required");
  if (!(oo.vi_damping > 0.0 && oo.vi_damping <= 1.0)) Reader::fail("oracle.vi_damping must be in (0, 1]");
  return sc;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON (" + e.what() + ")");
  }
}

Scenario load_scenario(const std::string& path) {
  const json doc = read_json_file(path);
  try {
    return scenario_from_json(doc);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json scenario_to_json(const Scenario& sc) {
  json j = system_json(sc);
  j["schema_version"] = kConfigSchemaVersion;
  j["seed"] = sc.cfg.seed;
  j["wmmse"] = {{"max_iters", sc.wmmse.max_iters},
                {"obj_tol", sc.wmmse.obj_tol},
                {"init", init_name(sc.wmmse.init)},
                {"seed", sc.wmmse.seed}};
  json sim = {{"slots", sc.episode.slots}, {"warmup_fraction", sc.episode.warmup_fraction}};
  if (!sc.episode.q0.empty()) sim["q0_bits"] = sc.episode.q0;
  j["simulation"] = sim;
  j["value_model"] = {{"table_points", sc.value_model.table_points},
                      {"small_q_uses_gamma", sc.value_model.small_q_uses_gamma}};
  j["calibration"] = {{"draws", sc.calibration.draws},
                      {"seed", sc.calibration.seed},
                      {"qwp_grid_points", sc.calibration.qwp_grid_points},
                      {"qwp_slots", sc.calibration.qwp_slots}};
  const OracleOptions& o = sc.oracle;
  j["oracle"] = {{"grid_points", o.grid_points},
                 {"channel_samples", o.channel_samples},
                 {"level_multipliers", o.level_multipliers},
                 {"include_proposed", o.include_proposed},
                 {"q_max_factor", o.q_max_factor},
                 {"seed", o.seed},
                 {"budget", o.budget},
                 {"vi_tol", o.vi_tol},
                 {"vi_max_sweeps", o.vi_max_sweeps},
                 {"vi_damping", o.vi_damping}};
  return j;
}

std::string config_hash(const Scenario& sc) { return fnv1a_hex(scenario_to_json(sc).dump()); }

std::string model_hash(const Scenario& sc) {
  json j = system_json(sc);
  j["value_model"] = {{"table_points", sc.value_model.table_points},
                      {"small_q_uses_gamma", sc.value_model.small_q_uses_gamma}};
  return fnv1a_hex(j.dump());
}

json value_model_to_json(const ValueModel& vm, const Scenario& sc) {
  json flows = json::array();
  for (const auto& f : vm.flows) {
    flows.push_back({{"lambda", f.lambda},
                     {"c_inf", f.c_inf},
                     {"q_star_bits", f.q_star},
                     {"slope_inf", f.slope_inf},
                     {"d_k", f.d_k},
                     {"c1", f.pc.c1},
                     {"c2", f.pc.c2},
                     {"c2_log", f.pc.c2_log},
                     {"c3", f.pc.c3},
                     {"table", {{"s", f.table.s()}, {"jprime", f.table.jprime()}}}});
  }
  return {{"kind", kValueModelKind},
          {"schema_version", kValueModelSchemaVersion},
          {"model_hash", model_hash(sc)},
          {"flows", flows},
          {"coupling", matrix_json(vm.coupling)},
          {"path_gain", matrix_json(vm.path_gain)}};
}

ValueModel value_model_from_json(const json& doc, const Scenario& sc) {
  try {
    if (!doc.is_object() || doc.value("kind", "") != kValueModelKind) throw ConfigError("not a value-model document");
    if (doc.at("schema_version").get<int>() != kValueModelSchemaVersion)
      throw ConfigError("unsupported value-model schema_version");
    if (doc.at("model_hash").get<std::string>() != model_hash(sc))
      throw ConfigError("value model was computed for a different configuration (model_hash mismatch)");
    const int k = sc.cfg.pairs;
    const json& flows = doc.at("flows");
    if (!flows.is_array() || static_cast<int>(flows.size()) != k) throw ConfigError("value model has the wrong pair count");
    ValueModel vm;
    for (int i = 0; i < k; ++i) {
      const json& f = flows[i];
      FlowValueModel m;
      m.params = flow_params(sc.cfg, i, sc.value_model.small_q_uses_gamma);
      m.lambda = f.at("lambda").get<double>();
      m.c_inf = f.at("c_inf").get<double>();
      m.q_star = f.at("q_star_bits").get<double>();
      m.slope_inf = f.at("slope_inf").get<double>();
      m.d_k = num_or_nan(f.at("d_k"));
      m.pc.c1 = f.at("c1").get<double>();
      m.pc.c2 = f.at("c2").get<double>();
      m.pc.c2_log = f.at("c2_log").get<double>();
      m.pc.c3 = f.at("c3").get<double>();
      m.table = JprimeTable(f.at("table").at("s").get<std::vector<double>>(),
                            f.at("table").at("jprime").get<std::vector<double>>());
      vm.flows.push_back(std::move(m));
    }
    vm.coupling = matrix_from(doc.at("coupling"), k, "coupling");
    vm.path_gain = matrix_from(doc.at("path_gain"), k, "path_gain");
    return vm;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed value model: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("malformed value model: ") + e.what());
  }
}

json metrics_to_json(const Metrics& m) {
  return {{"pairs", m.pairs},
          {"slots", m.slots},
          {"avg_power_w", m.avg_power},
          {"avg_rate_bps", m.avg_rate},
          {"avg_queue_bits", m.avg_queue},
          {"interruption_prob", m.interruption_prob},
          {"interruption_smooth", m.interruption_smooth},
          {"overflow_prob", m.overflow_prob},
          {"overflow_smooth", m.overflow_smooth},
          {"objective", m.objective}};
}

Metrics metrics_from_json(const json& j) {
  Metrics m;
  m.pairs = j.at("pairs").get<int>();
  m.slots = j.at("slots").get<long>();
  m.avg_power = j.at("avg_power_w").get<std::vector<double>>();
  m.avg_rate = j.at("avg_rate_bps").get<std::vector<double>>();
  m.avg_queue = j.at("avg_queue_bits").get<std::vector<double>>();
  m.interruption_prob = j.at("interruption_prob").get<std::vector<double>>();
  m.interruption_smooth = j.at("interruption_smooth").get<std::vector<double>>();
  m.overflow_prob = j.at("overflow_prob").get<std::vector<double>>();
  m.overflow_smooth = j.at("overflow_smooth").get<std::vector<double>>();
  m.objective = j.at("objective").get<double>();
  return m;
}

json calibration_to_json(const Calibration& c) {
  return {{"cop_alpha", c.cop_alpha},
          {"cop_rate_bps", c.cop_rate},
          {"zfp_power_w", c.zfp_power},
          {"zfp_rate_bps", c.zfp_rate},
          {"qwp_alpha", c.qwp_alpha},
          {"qwp_grid", c.qwp_grid},
          {"qwp_grid_objective", c.qwp_grid_objective}};
}

namespace {

void check_sweep(const json& doc) {
  auto fail = [](const std::string& m) { throw ConfigError("sweep document: " + m); };
  if (!doc.is_object()) fail("must be an object");
  for (const char* k : {"manifest", "axis", "cells", "summary"})
    if (!doc.contains(k)) fail(std::string("missing ") + k);
  if (!doc["manifest"].is_object() || !doc["manifest"].contains("hash")) fail("manifest without hash");
  parse_axis(doc["axis"].get<std::string>());
  if (!doc["cells"].is_array()) fail("cells must be an array");
  for (const auto& c : doc["cells"]) {
    for (const char* k : {"axis_value", "controller", "seed", "metrics"})
      if (!c.contains(k)) fail(std::string("cell without ") + k);
    if (!c["axis_value"].is_number() || !c["seed"].is_number_unsigned()) fail("cell field types");
    parse_controller(c["controller"].get<std::string>());
    const Metrics m = metrics_from_json(c["metrics"]);
    const auto n = static_cast<std::size_t>(m.pairs);
    for (const auto* v : {&m.avg_power, &m.avg_rate, &m.avg_queue, &m.interruption_prob, &m.interruption_smooth,
                          &m.overflow_prob, &m.overflow_smooth})
      if (v->size() != n) fail("per-pair metric length");
  }
  if (!doc["summary"].is_array()) fail("summary must be an array");
}

}  // namespace

void validate_sweep_json(const json& doc) {
  try {
    check_sweep(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep document: ") + e.what());
  } catch (const UsageError& e) {
    throw ConfigError(std::string("sweep document: ") + e.what());
  }
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace mimostream
