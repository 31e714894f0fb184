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


// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// nonzero on any outcome that disagrees with --expect-fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/distributions/binomial.hpp>

#include "config_io.hpp"
#include "control.hpp"
#include "mdp_oracle.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "sim.hpp"
#include "specfun.hpp"
#include "valuefn.hpp"

using namespace mimostream;
namespace fs = std::filesystem;

namespace {

const std::string kCli = MIMOSTREAM_CLI;
const std::string kConfigDir = MIMOSTREAM_CONFIG_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Clock {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

// Episodes with the queue cost sharp enough for the smooth metrics to be
// compared against the indicator ones.
struct EpisodeLog {
  std::string label;
  Metrics metrics;
};
std::vector<EpisodeLog> g_episodes;

void log_episodes(const std::string& label, const RunSummary& rs) {
  for (std::size_t i = 0; i < rs.episodes.size(); ++i)
    g_episodes.push_back({label + "/" + std::string(controller_name(rs.controller)) + "/seed" +
                              std::to_string(rs.seeds[i]),
                          rs.episodes[i].metrics});
}

Scenario load(const std::string& name) { return load_scenario(kConfigDir + "/" + name); }

void set_cross_ratio(Scenario& sc, double ratio) {
  sc.gain.mode = PathGainSpec::Mode::kRatio;
  sc.gain.cross_ratio = ratio;
  sc.cfg.path_gain = sc.gain.build(sc.cfg.pairs);
  sc.cfg.validate();
}

// ---------------------------------------------------------------------------

Outcome special_functions() {
  Clock clock;
  double worst_gamma = 0.0, worst_meijer = 0.0, worst_asym = 0.0;
  for (int m = 1; m <= 12; ++m)
    for (double x : {1e-6, 1e-3, 0.05, 0.3, 1.0, 2.5, 7.0, 15.0, 40.0}) {
      const double q = oracle::integrate_to_inf([&](double t) { return std::pow(t, m - 1) * std::exp(-t); }, x);
      worst_gamma = std::max(worst_gamma, oracle::rel_err(specfun::upper_incomplete_gamma(m, x), q));
    }
  for (int n = 1; n <= 10; ++n)
    for (int i = 0; i <= 12; ++i) {
      const double z = 1e-4 * std::pow(2e5, i / 12.0);  // log grid over [1e-4, 20]
      const double q =
          oracle::integrate_to_inf([&](double x) { return std::log(x / z) * std::pow(x, n - 1) * std::exp(-x); }, z);
      worst_meijer = std::max(worst_meijer, oracle::rel_err(specfun::meijer_special(n, z), q));
    }
  for (int n = 1; n <= 10; ++n) {
    const double asym = specfun::factorial(n - 1) * (-std::log(1e-8) + specfun::digamma_int(n));
    worst_asym = std::max(worst_asym, oracle::rel_err(specfun::meijer_special(n, 1e-8), asym));
  }
  const double t = clock.seconds();
  return {worst_gamma < 1e-8 && worst_meijer < 1e-8 && worst_asym < 1e-3 && t < 1.0,
          "incomplete gamma rel " + fmt(worst_gamma) + ", meijer rel " + fmt(worst_meijer) + ", small-z rel " +
              fmt(worst_asym) + ", " + fmt(t) + " s"};
}

Outcome density_normalization() {
  double worst = 0.0;
  for (auto [nt, nr] : {std::pair{1, 1}, {2, 2}, {5, 2}, {4, 4}}) {
    const auto c = specfun::sv_coeffs(nt, nr);
    const double mass = oracle::integrate_to_inf([&](double x) { return specfun::sv_density(c, x); }, 0.0);
    worst = std::max(worst, std::fabs(mass - 1.0));
  }
  return {worst <= 1e-6, "max |mass - 1| " + fmt(worst)};
}

SystemConfig single_flow(int nt, int nr) {
  SystemConfig c;
  c.pairs = 1;
  c.tx_antennas = nt;
  c.rx_antennas = nr;
  c.playback_bps = {1.5e6};
  c.gamma = {20.0};
  c.beta = {20.0};
  c.path_gain = uniform_path_gain(1, -5.0, 0.0);
  return c;
}

Outcome closed_forms() {
  std::mt19937_64 gen(derive_seed(3, static_cast<std::uint64_t>(Stream::kTest)));
  std::uniform_real_distribution<double> logz(std::log(1e-2), std::log(20.0));
  double worst = 0.0;
  int n = 0;
  for (auto [nt, nr] : {std::pair{1, 1}, {2, 2}, {5, 2}, {4, 4}}) {
    const FlowParams p = flow_params(single_flow(nt, nr), 0);
    for (int i = 0; i < 50; ++i, ++n) {
      // Water level w with cutoff x0 = 1 / (L w) spread log-uniformly.
      const double jp = p.t() / std::exp(logz(gen));
      const double w = -jp * p.bandwidth_hz / std::numbers::ln2;
      const double x0 = 1.0 / (p.direct_gain * w);
      const double pq =
          p.streams() * oracle::integrate_to_inf(
                            [&](double x) { return (w - 1.0 / (p.direct_gain * x)) * specfun::sv_density(p.sv, x); }, x0);
      const double rq =
          p.streams() * p.bandwidth_hz *
          oracle::integrate_to_inf([&](double x) { return std::log2(p.direct_gain * w * x) * specfun::sv_density(p.sv, x); },
                                   x0);
      worst = std::max({worst, oracle::rel_err(expected_power(p, jp), pq), oracle::rel_err(expected_rate(p, jp), rq)});
    }
  }
  return {worst < 1e-7, std::to_string(n) + " water levels, max rel " + fmt(worst)};
}

Outcome fixed_point() {
  Clock clock;
  const Scenario sc = load("k5_reference.json");
  const auto& c = sc.cfg;
  double worst_res = 0.0, worst_tab = 0.0, worst_inf = 0.0, worst_star = 0.0;
  bool monotone = true;
  for (int k = 0; k < c.pairs; ++k) {
    const FlowValueModel m = build_flow_model(flow_params(c, k, sc.value_model.small_q_uses_gamma),
                                              sc.value_model.table_points);
    const double scale = std::max(1.0, m.c_inf);
    double prev = -1e300;
    for (int i = 0; i < 200; ++i) {
      const double q = 2.0 * c.q_high * i / 199.0;
      const double jp = m.solve_jprime(q);
      const double tab = m.jprime(q);
      worst_res = std::max({worst_res, std::fabs(m.residual(q, jp)) / scale, std::fabs(m.residual(q, tab)) / scale});
      worst_tab = std::max(worst_tab, oracle::rel_err(tab, jp));
      monotone = monotone && tab >= prev;
      prev = tab;
    }
    worst_star = std::max(worst_star, oracle::rel_err(m.jprime(m.q_star), m.lambda));
    const double c_asym = (m.params.beta - m.c_inf) / m.params.playback_bps;
    worst_inf = std::max(worst_inf, oracle::rel_err(m.jprime(10.0 * c.q_high), c_asym));
  }
  const double t = clock.seconds();
  return {worst_res < 1e-8 && monotone && worst_star < 1e-12 && worst_inf < 1e-6 && t < 10.0,
          "max |g|/max(1,c_inf) " + fmt(worst_res) + ", monotone " + (monotone ? "yes" : "no") + ", J'(Q*) rel " +
              fmt(worst_star) + ", J'(10 Qh) vs C_k rel " + fmt(worst_inf) + ", table vs root rel " + fmt(worst_tab) +
              ", " + fmt(t) + " s"};
}

SystemConfig wmmse_cfg(int k, int nt, int nr, double snr_db, double ratio) {
  SystemConfig c;
  c.pairs = k;
  c.tx_antennas = nt;
  c.rx_antennas = nr;
  c.playback_bps.assign(k, 1.5e6);
  c.gamma.assign(k, 20.0);
  c.beta.assign(k, 20.0);
  c.path_gain = uniform_path_gain(k, snr_db, ratio);
  return c;
}

// Real parametrisation of the precoders for finite differences.
std::vector<double*> coordinates(PrecoderSet& f) {
  std::vector<double*> x;
  for (auto& m : f.f)
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      auto* z = reinterpret_cast<double*>(&m.data()[i]);
      x.push_back(z);
      x.push_back(z + 1);
    }
  return x;
}

Outcome wmmse() {
  // (a) descent
  Rng rng(5, Stream::kTest);
  WmmseOptions opts;
  opts.record_trace = true;
  opts.max_iters = 60;
  opts.obj_tol = 1e-12;
  int violations = 0;
  long steps = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + trial % 3;
    const SystemConfig cfg = wmmse_cfg(k, 4, 2, -5.0 + 10.0 * rng.uniform(), 0.3 * rng.uniform());
    const ChannelState h = sample_channel(rng, cfg);
    std::vector<double> w(k);
    for (auto& x : w) x = rng.uniform() < 0.2 ? 0.0 : 0.5 + 5.0 * rng.uniform();
    opts.init = trial % 2 ? InitScheme::kRandomSeeded : InitScheme::kMatchedFilter;
    opts.seed = static_cast<std::uint64_t>(trial);
    const auto sol = wmmse_solve_weights(h, cfg, w, opts);
    const auto& s = sol.surrogate_trace;
    for (std::size_t i = 1; i < s.size(); ++i, ++steps)
      if (s[i] > s[i - 1] + 1e-10 * std::max(1.0, std::fabs(s[i - 1]))) ++violations;
  }

  // (b) one pair: water filling
  WmmseOptions tight;
  tight.max_iters = 20000;
  tight.obj_tol = 1e-15;
  double worst_gram = 0.0;
  for (auto [nt, nr] : {std::pair{2, 2}, {4, 2}, {3, 3}}) {
    const SystemConfig cfg = wmmse_cfg(1, nt, nr, 3.0, 0.0);
    for (int trial = 0; trial < 10; ++trial) {
      const ChannelState h = sample_channel(rng, cfg);
      const double a = 2.0 + 3.0 * rng.uniform();
      const auto sol = wmmse_solve_weights(h, cfg, std::vector<double>{a}, tight);
      const CMatrix ref = single_user_waterfill(h.at(0, 0), cfg.link_gain(0, 0), a, cfg.streams());
      worst_gram = std::max(worst_gram, (sol.f.f[0] * sol.f.f[0].adjoint() - ref * ref.adjoint()).norm());
    }
  }

  // (c) stationarity on two pairs: the finite-difference gradient of the
  // utility against the gradient of its power term alone, 2F.
  tight.max_iters = 200000;
  double worst_stat = 0.0;
  const SystemConfig cfg2 = wmmse_cfg(2, 3, 2, 0.0, 0.3);
  const double g1 = -3.0 * std::numbers::ln2 / cfg2.bandwidth_hz;
  const double g2 = -1.5 * std::numbers::ln2 / cfg2.bandwidth_hz;
  for (int trial = 0; trial < 5; ++trial) {
    const ChannelState h = sample_channel(rng, cfg2);
    const std::vector<double> grad{g1, g2};
    PrecoderSet f = wmmse_solve(h, cfg2, grad, tight).f;
    double num = 0.0, den = 0.0;
    for (double* x : coordinates(f)) {
      const double x0 = *x;
      const double eps = 1e-6 * std::max(1.0, std::fabs(x0));
      *x = x0 + eps;
      const double up = wmmse_objective(h, cfg2, grad, f);
      *x = x0 - eps;
      const double dn = wmmse_objective(h, cfg2, grad, f);
      *x = x0;
      num += std::pow((up - dn) / (2.0 * eps), 2);
      den += 4.0 * x0 * x0;
    }
    worst_stat = std::max(worst_stat, std::sqrt(num / den));
  }
  return {violations == 0 && worst_gram < 1e-4 && worst_stat < 1e-5,
          "(a) " + std::to_string(violations) + " surrogate increases in " + std::to_string(steps) +
              " steps over 500 instances, (b) max Gram Frobenius " + fmt(worst_gram) +
              ", (c) max relative gradient " + fmt(worst_stat)};
}

Outcome decoupling() {
  // (a) gradient with no cross gain
  Scenario sc = load("k5_reference.json");
  set_cross_ratio(sc, 0.0);
  const ValueModel vm = build_value_model(sc.cfg, sc.value_model);
  std::mt19937_64 gen(derive_seed(6, static_cast<std::uint64_t>(Stream::kTest)));
  std::uniform_real_distribution<double> uq(0.0, 3.0 * sc.cfg.q_high);
  int mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> q(sc.cfg.pairs);
    for (auto& x : q) x = uq(gen);
    const auto g = vm.gradient(q);
    for (int k = 0; k < sc.cfg.pairs; ++k)
      if (g[k] != vm.flows[k].jprime(q[k])) ++mismatches;
  }

  // (b) oracle average cost of two independent pairs
  Scenario two = load("k2_oracle.json");
  set_cross_ratio(two, 0.0);
  Scenario one = load("k1_oracle.json");
  OracleOptions o = two.oracle;
  // The catalog's WMMSE stops on the joint objective; run it to convergence so
  // the joint and per-pair solves land on the same precoders.
  o.wmmse.max_iters = 5000;
  o.wmmse.obj_tol = 1e-14;
  const auto samples = oracle_channel_samples(two.cfg, o);
  const auto joint = relative_value_iteration(build_discrete_mdp(two.cfg, o, nullptr, samples).mdp, o.vi_tol,
                                              o.vi_max_sweeps, o.vi_damping);
  double sum = 0.0;
  for (int k = 0; k < 2; ++k) {
    std::vector<ChannelState> solo;
    for (const auto& h : samples) solo.push_back(ChannelState{1, {h.at(k, k)}});
    sum += relative_value_iteration(build_discrete_mdp(one.cfg, o, nullptr, solo).mdp, o.vi_tol, o.vi_max_sweeps,
                                    o.vi_damping)
               .theta;
  }
  // Each solve stops at span o.vi_tol, which bounds its theta error.
  const double tol = 3.0 * o.vi_tol;
  const double diff = std::fabs(joint.theta - sum);
  return {mismatches == 0 && diff <= tol,
          "(a) " + std::to_string(mismatches) + " gradient mismatches over 200 states, (b) theta*(K=2) " +
              fmt(joint.theta) + " vs sum of K=1 " + fmt(sum) + ", |diff| " + fmt(diff) + " (tol " + fmt(tol) + ")"};
}

Outcome gap_trend() {
  const Scenario base = load("k2_oracle.json");
  std::vector<double> gaps;
  bool nonneg = true;
  std::string detail;
  for (double ratio : {0.1, 0.05, 0.01}) {
    Scenario sc = base;
    set_cross_ratio(sc, ratio);
    const ValueModel vm = build_value_model(sc.cfg, sc.value_model);
    // Same oracle seed for every ratio: common channel samples.
    const auto r = oracle_gap(sc.cfg, vm, sc.oracle);
    gaps.push_back(r.gap());
    nonneg = nonneg && r.gap() >= -sc.oracle.vi_tol;
    detail += "ratio " + fmt(ratio) + ": theta* " + fmt(r.theta_star) + " theta~ " + fmt(r.theta_tilde) + " gap " +
              fmt(r.gap()) + "; ";
  }
  const bool decreasing = gaps[1] < gaps[0] && gaps[2] < gaps[1];
  return {nonneg && decreasing, detail + "non-negative " + (nonneg ? "yes" : "no") + ", decreasing " +
                                    (decreasing ? "yes" : "no")};
}

struct Options {
  bool quick = false;
  int threads = 1;
};

Outcome baseline_dominance(const Options& opt) {
  Scenario sc = load("k5_reference.json");
  const long slots = opt.quick ? 4000 : 100000;
  const int n_seeds = opt.quick ? 4 : 20;
  sc.episode.slots = slots;
  if (opt.quick) sc.calibration.qwp_slots = 4000;
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < n_seeds; ++i) seeds.push_back(1000 + i);
  const ValueModel vm = build_value_model(sc.cfg, sc.value_model);
  std::map<ControllerKind, std::vector<double>> obj;
  for (ControllerKind c : {ControllerKind::kProposed, ControllerKind::kZfp, ControllerKind::kCop, ControllerKind::kQwp}) {
    const RunSummary rs = run_controller(sc, c, seeds, opt.threads, &vm);
    log_episodes("k5_reference", rs);
    for (const auto& e : rs.episodes) obj[c].push_back(e.metrics.objective);
  }
  bool pass = true;
  std::string detail = std::to_string(n_seeds) + " seeds x " + std::to_string(slots) + " slots;";
  const auto& p = obj[ControllerKind::kProposed];
  double mean_p = 0.0;
  for (double x : p) mean_p += x / p.size();
  detail += " proposed mean " + fmt(mean_p) + ";";
  for (ControllerKind c : {ControllerKind::kZfp, ControllerKind::kCop, ControllerKind::kQwp}) {
    int wins = 0;
    double mean = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      wins += p[i] < obj[c][i];
      mean += obj[c][i] / p.size();
    }
    // One-sided sign test: P(X >= wins) under Binomial(n, 1/2).
    const boost::math::binomial_distribution<double> b(static_cast<double>(p.size()), 0.5);
    const double pval = wins == 0 ? 1.0 : boost::math::cdf(boost::math::complement(b, wins - 1.0));
    pass = pass && pval < 0.05;
    detail += " " + std::string(controller_name(c)) + " mean " + fmt(mean) + " wins " + std::to_string(wins) + "/" +
              std::to_string(p.size()) + " p " + fmt(pval) + ";";
  }
  if (opt.quick) {
    pass = false;
    detail += " reduced run (--quick), not conclusive";
  }
  return {pass, detail};
}

Outcome smooth_fidelity(const Options& opt) {
  if (g_episodes.empty()) {
    // Standalone: a short run of every controller on the sharp-cost scenario.
    Scenario sc = load("k5_reference.json");
    sc.episode.slots = opt.quick ? 2000 : 10000;
    sc.calibration.qwp_slots = sc.episode.slots;
    const ValueModel vm = build_value_model(sc.cfg, sc.value_model);
    for (ControllerKind c : default_controllers())
      log_episodes("k5_reference", run_controller(sc, c, {1, 2}, opt.threads, &vm));
  }
  {
    const Scenario sc = load("k2_oracle.json");
    const ValueModel vm = build_value_model(sc.cfg, sc.value_model);
    log_episodes("k2_oracle", run_controller(sc, ControllerKind::kProposed, {1}, opt.threads, &vm));
  }
  double worst = 0.0;
  std::string where;
  int runs = 0;
  for (const auto& e : g_episodes) {
    ++runs;
    const auto& m = e.metrics;
    for (int k = 0; k < m.pairs; ++k) {
      const double d = std::max(std::fabs(m.interruption_smooth[k] - m.interruption_prob[k]),
                                std::fabs(m.overflow_smooth[k] - m.overflow_prob[k]));
      if (d > worst) {
        worst = d;
        where = e.label + " pair " + std::to_string(k);
      }
    }
  }
  return {runs > 0 && worst < 0.02,
          std::to_string(runs) + " runs, max |smooth - indicator| " + fmt(worst) + (where.empty() ? "" : " at " + where)};
}

// CLI helpers for the determinism criterion.
struct Cli {
  int code = -1;
  std::string out;
};

Cli run_cli(const std::string& args) {
  Cli r;
  FILE* p = popen(("'" + kCli + "' " + args + " 2>/dev/null").c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("mimostream_accept_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  const std::string cfg = (dir / "small.json").string();
  std::ofstream(cfg) << R"({
  "schema_version": 1, "pairs": 2, "tx_antennas": 2, "rx_antennas": 1,
  "gamma": 30.9, "beta": 30.9, "path_gain": {"snr_db": -5, "cross_ratio": 0.1},
  "simulation": {"slots": 400, "warmup_fraction": 0.1},
  "calibration": {"draws": 16, "qwp_grid_points": 3, "qwp_slots": 200},
  "oracle": {"grid_points": 20, "channel_samples": 3, "level_multipliers": [1.0, 2.0]}
})";
  const std::vector<std::string> commands = {
      "validate-config", "precompute", "run -c proposed", "run -c zfp", "run -c cop", "run -c qwp", "run -c zero",
      "sweep --axis snr --values -5,0", "sweep --axis weight_beta --values 30.9,40 --controllers proposed,qwp",
      "oracle-gap"};
  int checked = 0;
  std::string mismatch;
  for (const auto& cmd : commands)
    for (const std::string threads : {"1", "3"}) {
      std::string bytes[2];
      for (int rep = 0; rep < 2; ++rep) {
        const fs::path out = dir / ("out" + std::to_string(rep) + ".json");
        const fs::path trace = dir / "trace.csv";
        const bool is_run = cmd.rfind("run", 0) == 0;
        const std::string args = "--seed 7 --seeds 2 --threads " + threads + " --out 'OUT'" +
                                 (is_run ? " --trace '" + trace.string() + "'" : "") + " " + cmd + " '" + cfg + "'";
        // The output path is part of the manifest, so both reruns use the same one.
        std::string a = args;
        a.replace(a.find("OUT"), 3, (dir / "out.json").string());
        const Cli r = run_cli(a);
        if (r.code != 0) {
          fs::remove_all(dir);
          return {false, "'" + cmd + "' exited with " + std::to_string(r.code)};
        }
        bytes[rep] = slurp(dir / "out.json") + (is_run ? slurp(trace) : "");
        fs::remove(dir / "out.json");
        (void)out;
      }
      ++checked;
      if (bytes[0] != bytes[1] && mismatch.empty()) mismatch = cmd + " (threads " + threads + ")";
    }
  fs::remove_all(dir);
  return {mismatch.empty(), std::to_string(checked) + " command/thread combinations rerun" +
                                (mismatch.empty() ? ", all byte-identical" : ", differs: " + mismatch)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> expect_fail, only;
  Options opt;
  app.add_option("--expect-fail", expect_fail, "criteria known to fail")->delimiter(',');
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_flag("--quick", opt.quick, "reduced episode lengths for the simulation criteria");
  app.add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  std::string report_path = "acceptance_report.txt";
  app.add_option("--report", report_path, "copy of the report (empty: none)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"special-function fidelity", special_functions},
      {"density normalization", density_normalization},
      {"closed form vs quadrature", closed_forms},
      {"fixed-point suite", fixed_point},
      {"WMMSE correctness", wmmse},
      {"decoupling consistency", decoupling},
      {"oracle gap trend", gap_trend},
      {"baseline dominance", [&] { return baseline_dominance(opt); }},
      {"smooth-approximation fidelity", [&] { return smooth_fidelity(opt); }},
      {"determinism", determinism},
  };
  const std::set<int> xfail(expect_fail.begin(), expect_fail.end());
  const std::set<int> selected(only.begin(), only.end());
  int unexpected = 0;
  std::ofstream report;
  if (!report_path.empty()) report.open(report_path);
  auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    if (report) report << line << std::endl;
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Clock clock;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool expected = xfail.count(id) ? !o.pass : o.pass;
    if (!expected) ++unexpected;
    emit("criterion " + std::to_string(id) + " [" + criteria[i].first + "]: " + (o.pass ? "PASS" : "FAIL") +
         (xfail.count(id) ? (o.pass ? " (unexpected pass)" : " (expected)") : "") + " | " + o.detail + " [" +
         fmt(clock.seconds()) + " s]");
  }
  emit(unexpected ? "acceptance: " + std::to_string(unexpected) + " unexpected outcome(s)"
                  : std::string("acceptance: all outcomes as expected"));
  return unexpected ? 1 : 0;
}
