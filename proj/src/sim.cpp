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

#include "sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "rng.hpp"

namespace mimostream {

double step_queue(double q, double rate_bps, double mu_bps, double tau) {
  return std::max(0.0, q - mu_bps * tau) + rate_bps * tau;
}

std::string_view controller_name(ControllerKind c) {
  switch (c) {
    case ControllerKind::kProposed: return "proposed";
    case ControllerKind::kZfp: return "zfp";
    case ControllerKind::kCop: return "cop";
    case ControllerKind::kQwp: return "qwp";
    case ControllerKind::kZero: return "zero";
  }
  return "unknown";
}

ControllerKind parse_controller(std::string_view name) {
  for (auto c : {ControllerKind::kProposed, ControllerKind::kZfp, ControllerKind::kCop, ControllerKind::kQwp,
                 ControllerKind::kZero})
    if (controller_name(c) == name) return c;
  if (name == "oracle-policy")
    throw UsageError("oracle-policy runs on the discretized model; use the oracle-gap command");
  throw UsageError("unknown controller '" + std::string(name) + "' (expected proposed, zfp, cop, qwp or zero)");
}

const std::vector<ControllerKind>& default_controllers() {
  static const std::vector<ControllerKind> all{ControllerKind::kProposed, ControllerKind::kZfp, ControllerKind::kCop,
                                               ControllerKind::kQwp};
  return all;
}

SlotPolicy make_policy(const SystemConfig& cfg, const ControllerSetup& setup) {
  const int n = cfg.pairs;
  const auto wopts = setup.wmmse;
  auto from_decision = [n](SlotDecision&& d) {
    SlotAction a;
    a.f = std::move(d.f);
    a.active.assign(n, 0);
    for (int k : d.active) a.active[k] = 1;
    return a;
  };
  switch (setup.kind) {
    case ControllerKind::kProposed: {
      if (setup.model == nullptr) throw UsageError("proposed controller needs a value model");
      const ValueModel* model = setup.model;
      return [&cfg, model, wopts, from_decision](const ChannelState& h, std::span<const double> q) {
        const auto grad = model->gradient(q);
        return from_decision(wmmse_solve(h, cfg, grad, wopts));
      };
    }
    case ControllerKind::kZfp: {
      const double p = setup.calibration.zfp_power;
      if (!(p > 0.0)) throw UsageError("zfp controller needs a calibrated power");
      return [&cfg, p, n](const ChannelState& h, std::span<const double>) {
        SlotAction a;
        a.f = zfp_precoder(h, cfg, p);
        a.active.assign(n, 1);
        return a;
      };
    }
    case ControllerKind::kCop: {
      const double alpha = setup.calibration.cop_alpha;
      if (!(alpha > 0.0)) throw UsageError("cop controller needs a calibrated alpha");
      return [&cfg, alpha, wopts, from_decision](const ChannelState& h, std::span<const double>) {
        return from_decision(cop_precoder(h, cfg, alpha, wopts));
      };
    }
    case ControllerKind::kQwp: {
      const double alpha = setup.calibration.qwp_alpha;
      if (!(alpha > 0.0)) throw UsageError("qwp controller needs a calibrated alpha");
      return [&cfg, alpha, wopts, from_decision](const ChannelState& h, std::span<const double> q) {
        return from_decision(qwp_precoder(h, cfg, q, alpha, wopts));
      };
    }
    case ControllerKind::kZero:
      return [&cfg, n](const ChannelState&, std::span<const double>) {
        SlotAction a;
        a.f = zero_precoders(cfg);
        a.active.assign(n, 0);
        return a;
      };
  }
  throw UsageError("unknown controller");
}

EpisodeResult run_episode(const SlotPolicy& policy, const SystemConfig& cfg, std::uint64_t seed,
                          const EpisodeOptions& opts) {
  cfg.validate();
  if (opts.slots < 1) throw UsageError("episode slots must be >= 1");
  if (!(opts.warmup_fraction >= 0.0 && opts.warmup_fraction < 1.0))
    throw UsageError("warmup_fraction must be in [0, 1)");
  const int n = cfg.pairs;
  const long warmup = static_cast<long>(std::floor(opts.warmup_fraction * static_cast<double>(opts.slots)));
  if (warmup >= opts.slots) throw UsageError("episode must be longer than its warmup");

  std::vector<double> q(n);
  if (opts.q0.empty()) {
    for (int k = 0; k < n; ++k) q[k] = q_star(flow_params(cfg, k));
  } else {
    if (static_cast<int>(opts.q0.size()) != n) throw UsageError("q0 must have one entry per pair");
    for (int k = 0; k < n; ++k) {
      if (!(opts.q0[k] >= 0.0)) throw UsageError("q0 entries must be non-negative");
      q[k] = opts.q0[k];
    }
  }
  const std::vector<double> q_init = q;

  EpisodeResult res;
  Metrics& m = res.metrics;
  m.pairs = n;
  m.slots = opts.slots - warmup;
  for (auto* v : {&m.avg_power, &m.avg_rate, &m.avg_queue, &m.interruption_prob, &m.interruption_smooth,
                  &m.overflow_prob, &m.overflow_smooth})
    v->assign(n, 0.0);
  std::vector<double> net_in(n, 0.0);
  if (opts.trace) res.trace.reserve(static_cast<std::size_t>(opts.slots) * n);

  Rng rng(seed, Stream::kChannel);
  const double tau = cfg.slot_s;
  for (long t = 0; t < opts.slots; ++t) {
    const ChannelState h = sample_channel(rng, cfg);
    SlotAction act;
    try {
      act = policy(h, q);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "slot " << t << ": " << e.what();
      if (dynamic_cast<const NumericalError*>(&e)) throw NumericalError(os.str());
      if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(os.str());
      throw Error(os.str());
    }
    for (int k = 0; k < n; ++k) {
      const double p = transmit_power(act.f.f[k]);
      const double r = p > 0.0 ? rate_mmse(h, cfg, act.f, k) : 0.0;
      if (t >= warmup) {
        m.avg_power[k] += p;
        m.avg_rate[k] += r;
        m.avg_queue[k] += q[k];
        m.interruption_prob[k] += q[k] < cfg.q_low ? 1.0 : 0.0;
        m.overflow_prob[k] += q[k] > cfg.q_high ? 1.0 : 0.0;
        m.interruption_smooth[k] += std::exp(-cfg.eta * std::max(0.0, q[k] - cfg.q_low));
        m.overflow_smooth[k] += std::exp(-cfg.eta * std::max(0.0, cfg.q_high - q[k]));
      }
      if (opts.trace) res.trace.push_back({t, k, q[k], r, p, act.active.empty() ? p > 0.0 : act.active[k] != 0});
      const double served = std::min(cfg.playback_bps[k] * tau, q[k]);
      net_in[k] += r * tau - served;
      q[k] = step_queue(q[k], r, cfg.playback_bps[k], tau);
    }
  }

  const double inv = 1.0 / static_cast<double>(m.slots);
  m.objective = 0.0;
  for (int k = 0; k < n; ++k) {
    for (auto* v : {&m.avg_power, &m.avg_rate, &m.avg_queue, &m.interruption_prob, &m.interruption_smooth,
                    &m.overflow_prob, &m.overflow_smooth})
      (*v)[k] *= inv;
    m.objective += m.avg_power[k] + cfg.gamma[k] * m.interruption_smooth[k] + cfg.beta[k] * m.overflow_smooth[k];
    const double scale = std::max({1.0, std::fabs(q[k]), std::fabs(q_init[k])});
    res.conservation_error = std::max(res.conservation_error, std::fabs(q[k] - q_init[k] - net_in[k]) / scale);
  }
  return res;
}

EpisodeResult run_episode(const ControllerSetup& setup, const SystemConfig& cfg, std::uint64_t seed,
                          const EpisodeOptions& opts) {
  return run_episode(make_policy(cfg, setup), cfg, seed, opts);
}

namespace {

// Geometric bisection for an increasing function f on (0, inf) with
// f(x) = target; starts from x0 and expands the bracket by factors of 2.
template <class F>
double geometric_bisect(F&& f, double target, double x0, const char* what) {
  double lo = x0;
  double hi = x0;
  int guard = 0;
  while (f(lo) > target) {
    lo *= 0.5;
    if (++guard > 200) throw NumericalError(std::string(what) + ": cannot bracket from below");
  }
  guard = 0;
  while (f(hi) < target) {
    hi *= 2.0;
    if (++guard > 200) throw ConfigError(std::string(what) + ": target rate unreachable");
  }
  while (hi / lo > 1.0 + 1e-4) {
    const double mid = std::sqrt(lo * hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace

Calibration calibrate_baselines(const SystemConfig& cfg, const CalibrationOptions& opts, const WmmseOptions& wmmse,
                                double warmup_fraction) {
  cfg.validate();
  if (opts.draws < 1 || opts.qwp_grid_points < 1 || opts.qwp_slots < 2) throw UsageError("invalid calibration options");
  const int n = cfg.pairs;
  Rng rng(opts.seed, Stream::kCalibration);
  std::vector<ChannelState> draws;
  draws.reserve(opts.draws);
  for (int i = 0; i < opts.draws; ++i) draws.push_back(sample_channel(rng, cfg));

  double mu = 0.0;
  double w_lambda = 0.0;
  double headroom = 0.0;
  for (int k = 0; k < n; ++k) {
    const auto p = flow_params(cfg, k);
    mu += cfg.playback_bps[k] / n;
    w_lambda += -solve_lambda(p) * cfg.bandwidth_hz / std::numbers::ln2 / n;
    headroom += (cfg.q_high - q_star(p)) / n;
  }

  Calibration cal;
  auto cop_rate = [&](double alpha) {
    double acc = 0.0;
    for (const auto& h : draws) {
      const auto d = cop_precoder(h, cfg, alpha, wmmse);
      for (int k = 0; k < n; ++k) acc += rate_mmse(h, cfg, d.f, k);
    }
    return acc / (static_cast<double>(draws.size()) * n);
  };
  cal.cop_alpha = geometric_bisect(cop_rate, mu, w_lambda, "cop calibration");
  cal.cop_rate = cop_rate(cal.cop_alpha);

  auto zfp_rate = [&](double p) {
    double acc = 0.0;
    for (const auto& h : draws) {
      const auto f = zfp_precoder(h, cfg, p);
      for (int k = 0; k < n; ++k) acc += rate_mmse(h, cfg, f, k);
    }
    return acc / (static_cast<double>(draws.size()) * n);
  };
  cal.zfp_power = geometric_bisect(zfp_rate, mu, 1.0, "zfp calibration");
  cal.zfp_rate = zfp_rate(cal.zfp_power);

  const double alpha0 = w_lambda / headroom;
  EpisodeOptions eo;
  eo.slots = opts.qwp_slots;
  eo.warmup_fraction = warmup_fraction;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < opts.qwp_grid_points; ++i) {
    const double u = opts.qwp_grid_points > 1 ? 2.0 * i / (opts.qwp_grid_points - 1) - 1.0 : 0.0;
    const double alpha = alpha0 * std::pow(4.0, u);
    ControllerSetup setup;
    setup.kind = ControllerKind::kQwp;
    setup.calibration.qwp_alpha = alpha;
    setup.wmmse = wmmse;
    const double obj = run_episode(setup, cfg, derive_seed(opts.seed, 0xca1), eo).metrics.objective;
    cal.qwp_grid.push_back(alpha);
    cal.qwp_grid_objective.push_back(obj);
    if (obj < best) {
      best = obj;
      cal.qwp_alpha = alpha;
    }
  }
  return cal;
}

std::string_view axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::kSnr: return "snr";
    case SweepAxis::kPairs: return "pairs";
    case SweepAxis::kSensingDistance: return "sensing_distance";
    case SweepAxis::kWeightBeta: return "weight_beta";
  }
  return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
  for (auto a : {SweepAxis::kSnr, SweepAxis::kPairs, SweepAxis::kSensingDistance, SweepAxis::kWeightBeta})
    if (axis_name(a) == name) return a;
  throw UsageError("unknown sweep axis '" + std::string(name) + "' (expected snr, pairs, sensing_distance or weight_beta)");
}

Scenario apply_axis(const Scenario& base, SweepAxis axis, double value) {
  Scenario sc = base;
  SystemConfig& c = sc.cfg;
  switch (axis) {
    case SweepAxis::kSnr:
      if (sc.gain.mode == PathGainSpec::Mode::kMatrix) throw UsageError("snr axis needs an snr-based path gain");
      sc.gain.snr_db = value;
      break;
    case SweepAxis::kPairs: {
      if (!(value >= 1.0) || value != std::floor(value)) throw UsageError("pairs axis values must be positive integers");
      if (sc.gain.mode == PathGainSpec::Mode::kMatrix) throw UsageError("pairs axis needs an snr-based path gain");
      const int k = static_cast<int>(value);
      c.pairs = k;
      c.tx_antennas = k;
      c.playback_bps.assign(k, base.cfg.playback_bps.front());
      c.gamma.assign(k, base.cfg.gamma.front());
      c.beta.assign(k, base.cfg.beta.front());
      break;
    }
    case SweepAxis::kSensingDistance:
      if (!(value > 0.0)) throw UsageError("sensing distance must be positive");
      sc.gain.mode = PathGainSpec::Mode::kFriis;
      sc.gain.distance_m = value;
      break;
    case SweepAxis::kWeightBeta:
      if (!(value > 0.0)) throw UsageError("weight values must be positive");
      c.gamma.assign(c.pairs, value);
      c.beta.assign(c.pairs, value);
      break;
  }
  c.path_gain = sc.gain.build(c.pairs);
  c.validate();
  return sc;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n || failed.load()) return;
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed.store(true);
          }
        }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

bool needs_calibration(const std::vector<ControllerKind>& cs) {
  return std::any_of(cs.begin(), cs.end(), [](ControllerKind c) {
    return c == ControllerKind::kZfp || c == ControllerKind::kCop || c == ControllerKind::kQwp;
  });
}

}  // namespace

std::vector<SweepCell> sweep(const Scenario& base, const SweepSpec& spec, int threads) {
  if (spec.values.empty()) throw UsageError("sweep needs at least one axis value");
  if (spec.seeds.empty()) throw UsageError("sweep needs at least one seed");
  const auto& controllers = spec.controllers.empty() ? default_controllers() : spec.controllers;
  const std::size_t nv = spec.values.size();
  const bool want_model = std::find(controllers.begin(), controllers.end(), ControllerKind::kProposed) !=
                          controllers.end();

  std::vector<Scenario> scenarios;
  std::vector<ValueModel> models(nv);
  std::vector<Calibration> cals(nv);
  for (double v : spec.values) scenarios.push_back(apply_axis(base, spec.axis, v));
  parallel_for(nv, threads, [&](std::size_t i) {
    const auto& sc = scenarios[i];
    if (want_model) models[i] = build_value_model(sc.cfg, sc.value_model);
    if (needs_calibration(controllers))
      cals[i] = calibrate_baselines(sc.cfg, sc.calibration, sc.wmmse, sc.episode.warmup_fraction);
  });

  const std::size_t nc = controllers.size();
  const std::size_t ns = spec.seeds.size();
  std::vector<SweepCell> cells(nv * nc * ns);
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    const std::size_t vi = idx / (nc * ns);
    const std::size_t ci = (idx / ns) % nc;
    const std::size_t si = idx % ns;
    const auto& sc = scenarios[vi];
    ControllerSetup setup;
    setup.kind = controllers[ci];
    setup.model = &models[vi];
    setup.calibration = cals[vi];
    setup.wmmse = sc.wmmse;
    EpisodeOptions eo = sc.episode;
    eo.trace = false;
    SweepCell& cell = cells[idx];
    cell.axis_value = spec.values[vi];
    cell.controller = controllers[ci];
    cell.seed = spec.seeds[si];
    cell.metrics = run_episode(setup, sc.cfg, cell.seed, eo).metrics;
  });
  return cells;
}

RunSummary run_controller(const Scenario& sc, ControllerKind controller, const std::vector<std::uint64_t>& seeds,
                          int threads, const ValueModel* model) {
  if (seeds.empty()) throw UsageError("at least one seed required");
  RunSummary out;
  out.controller = controller;
  out.seeds = seeds;
  ValueModel own;
  if (controller == ControllerKind::kProposed && model == nullptr) {
    own = build_value_model(sc.cfg, sc.value_model);
    model = &own;
  }
  if (needs_calibration({controller}))
    out.calibration = calibrate_baselines(sc.cfg, sc.calibration, sc.wmmse, sc.episode.warmup_fraction);
  ControllerSetup setup;
  setup.kind = controller;
  setup.model = model;
  setup.calibration = out.calibration;
  setup.wmmse = sc.wmmse;
  out.episodes.resize(seeds.size());
  parallel_for(seeds.size(), threads,
               [&](std::size_t i) { out.episodes[i] = run_episode(setup, sc.cfg, seeds[i], sc.episode); });
  return out;
}

}  // namespace mimostream
