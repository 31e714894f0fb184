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

#include "mdp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "hash.hpp"
#include "rng.hpp"
#include "sim.hpp"

namespace mimostream {

std::size_t DiscreteMdp::n_states() const {
  std::size_t n = 1;
  for (const auto& g : grid) n *= g.size();
  return n;
}

std::vector<int> DiscreteMdp::decode(std::size_t state) const {
  std::vector<int> idx(flows);
  for (int k = 0; k < flows; ++k) {
    idx[k] = static_cast<int>(state % grid[k].size());
    state /= grid[k].size();
  }
  return idx;
}

std::size_t DiscreteMdp::encode(const std::vector<int>& idx) const {
  std::size_t s = 0;
  for (int k = flows - 1; k >= 0; --k) s = s * grid[k].size() + static_cast<std::size_t>(idx[k]);
  return s;
}

std::size_t DiscreteMdp::next_state(std::size_t state, int sample, int action) const {
  std::size_t out = 0;
  std::size_t stride = 1;
  for (int k = 0; k < flows; ++k) {
    const std::size_t g = grid[k].size();
    const std::size_t i = state % g;
    state /= g;
    out += stride * static_cast<std::size_t>(next[k][(i * n_samples + sample) * n_actions + action]);
    stride *= g;
  }
  return out;
}

double DiscreteMdp::stage_cost(std::size_t state, int sample, int action) const {
  double c = action_power[static_cast<std::size_t>(sample) * n_actions + action];
  for (int k = 0; k < flows; ++k) {
    const std::size_t g = grid[k].size();
    c += queue_cost[k][state % g];
    state /= g;
  }
  return c;
}

std::size_t DiscreteMdp::nearest_state(const std::vector<double>& q) const {
  std::vector<int> idx(flows);
  for (int k = 0; k < flows; ++k) {
    const auto& g = grid[k];
    int best = 0;
    for (int i = 1; i < static_cast<int>(g.size()); ++i)
      if (std::fabs(g[i] - q[k]) < std::fabs(g[best] - q[k])) best = i;
    idx[k] = best;
  }
  return encode(idx);
}

void DiscreteMdp::validate() const {
  if (flows < 1 || static_cast<int>(grid.size()) != flows || static_cast<int>(next.size()) != flows ||
      static_cast<int>(queue_cost.size()) != flows)
    throw DomainError("mdp: per-flow tables do not match the flow count");
  if (n_samples < 1 || n_actions < 1) throw DomainError("mdp: need at least one sample and one action");
  if (action_power.size() != static_cast<std::size_t>(n_samples) * n_actions)
    throw DomainError("mdp: action_power size mismatch");
  for (int k = 0; k < flows; ++k) {
    const std::size_t g = grid[k].size();
    if (g < 1 || queue_cost[k].size() != g) throw DomainError("mdp: grid/queue_cost size mismatch");
    if (next[k].size() != g * n_samples * n_actions) throw DomainError("mdp: next table size mismatch");
    for (int j : next[k])
      if (j < 0 || static_cast<std::size_t>(j) >= g) throw DomainError("mdp: next index out of range");
  }
}

std::vector<ChannelState> oracle_channel_samples(const SystemConfig& cfg, const OracleOptions& opts) {
  Rng rng(opts.seed, Stream::kOracleSamples);
  std::vector<ChannelState> out;
  out.reserve(opts.channel_samples);
  for (int s = 0; s < opts.channel_samples; ++s) out.push_back(sample_channel(rng, cfg));
  return out;
}

namespace {

int nearest_index(const std::vector<double>& g, double q) {
  // Uniform grid from 0.
  const double step = g.size() > 1 ? g[1] - g[0] : 1.0;
  const long i = std::lround(q / step);
  return static_cast<int>(std::clamp<long>(i, 0, static_cast<long>(g.size()) - 1));
}

struct ActionOutcome {
  double power = 0.0;
  std::vector<double> rate;
};

ActionOutcome solve_action(const ChannelState& h, const SystemConfig& cfg, const std::vector<double>& weights,
                           const WmmseOptions& wopts) {
  ActionOutcome out;
  out.rate.assign(cfg.pairs, 0.0);
  const auto d = wmmse_solve_weights(h, cfg, weights, wopts);
  for (int k = 0; k < cfg.pairs; ++k) {
    out.power += transmit_power(d.f.f[k]);
    if (!d.f.f[k].isZero(0.0)) out.rate[k] = rate_mmse(h, cfg, d.f, k);
  }
  return out;
}

}  // namespace

BuiltMdp build_discrete_mdp(const SystemConfig& cfg, const OracleOptions& opts, const ValueModel* model,
                            const std::vector<ChannelState>& samples_in) {
  cfg.validate();
  opts.wmmse.validate();
  if (opts.grid_points < 2) throw UsageError("oracle grid_points must be >= 2");
  if (opts.channel_samples < 1 && samples_in.empty()) throw UsageError("oracle channel_samples must be >= 1");
  if (!(opts.q_max_factor > 0.0)) throw UsageError("oracle q_max_factor must be > 0");
  for (double m : opts.level_multipliers)
    if (!(m > 0.0)) throw UsageError("oracle level multipliers must be positive");

  const int n_flows = cfg.pairs;
  const std::vector<ChannelState> samples = samples_in.empty() ? oracle_channel_samples(cfg, opts) : samples_in;
  for (const auto& h : samples)
    if (h.pairs != n_flows) throw DomainError("oracle: channel sample size mismatch");

  BuiltMdp out;
  DiscreteMdp& mdp = out.mdp;
  mdp.flows = n_flows;
  mdp.n_samples = static_cast<int>(samples.size());
  const double q_max = opts.q_max_factor * cfg.q_high;
  // Coarser than this, rounding to the nearest point freezes an idle queue.
  const double step = q_max / (opts.grid_points - 1);
  for (int k = 0; k < n_flows; ++k)
    if (!(step < 2.0 * cfg.playback_bps[k] * cfg.slot_s)) {
      std::ostringstream os;
      os << "oracle grid too coarse: step " << step << " bits must be below twice the per-slot drain of pair " << k
         << " (" << 2.0 * cfg.playback_bps[k] * cfg.slot_s << " bits)";
      throw ConfigError(os.str());
    }
  mdp.grid.assign(n_flows, {});
  mdp.queue_cost.assign(n_flows, {});
  for (int k = 0; k < n_flows; ++k) {
    const auto p = flow_params(cfg, k);
    for (int i = 0; i < opts.grid_points; ++i) {
      const double q = q_max * i / (opts.grid_points - 1);
      mdp.grid[k].push_back(q);
      mdp.queue_cost[k].push_back(queue_cost(p, q));
    }
  }

  // Per-flow weight levels.
  std::vector<std::vector<double>> levels(n_flows);
  for (int k = 0; k < n_flows; ++k) {
    const double w_lambda = -solve_lambda(flow_params(cfg, k)) * cfg.bandwidth_hz / std::numbers::ln2;
    levels[k].push_back(0.0);
    for (double m : opts.level_multipliers) levels[k].push_back(m * w_lambda);
  }
  std::size_t n_product = 1;
  for (const auto& l : levels) n_product *= l.size();

  // Distinct weight vectors of the proposed controller over the grid.
  std::map<std::vector<double>, int> proposed_ids;
  std::vector<int> state_weight_id;
  const std::size_t n_states = mdp.n_states();
  if (opts.include_proposed && model != nullptr) {
    state_weight_id.resize(n_states);
    std::vector<double> q(n_flows);
    for (std::size_t st = 0; st < n_states; ++st) {
      const auto idx = mdp.decode(st);
      for (int k = 0; k < n_flows; ++k) q[k] = mdp.grid[k][idx[k]];
      const auto grad = model->gradient(q);
      std::vector<double> w(n_flows, 0.0);
      for (int k = 0; k < n_flows; ++k)
        if (grad[k] < 0.0) w[k] = -grad[k] * cfg.bandwidth_hz / std::numbers::ln2;
      auto [it, inserted] = proposed_ids.emplace(std::move(w), static_cast<int>(proposed_ids.size()));
      state_weight_id[st] = it->second;
    }
  }
  std::vector<std::vector<double>> proposed_weights(proposed_ids.size());
  for (const auto& [w, id] : proposed_ids) proposed_weights[id] = w;

  out.product_actions = static_cast<int>(n_product);
  out.proposed_actions = static_cast<int>(proposed_weights.size());
  mdp.n_actions = out.product_actions + out.proposed_actions;
  const double work = static_cast<double>(n_states) * mdp.n_samples * mdp.n_actions;
  if (work > static_cast<double>(opts.budget)) {
    std::ostringstream os;
    os << "oracle state space too large: " << n_states << " states x " << mdp.n_samples << " samples x "
       << mdp.n_actions << " actions exceeds budget " << opts.budget;
    throw ConfigError(os.str());
  }

  // Solve every catalog action on every sample.
  const int n_s = mdp.n_samples;
  const int n_a = mdp.n_actions;
  mdp.action_power.assign(static_cast<std::size_t>(n_s) * n_a, 0.0);
  std::vector<double> rates(static_cast<std::size_t>(n_s) * n_a * n_flows, 0.0);
  std::vector<double> w(n_flows);
  for (int s = 0; s < n_s; ++s) {
    for (int a = 0; a < n_a; ++a) {
      if (a < out.product_actions) {
        std::size_t rem = static_cast<std::size_t>(a);
        for (int k = 0; k < n_flows; ++k) {
          w[k] = levels[k][rem % levels[k].size()];
          rem /= levels[k].size();
        }
      } else {
        w = proposed_weights[a - out.product_actions];
      }
      const auto res = solve_action(samples[s], cfg, w, opts.wmmse);
      mdp.action_power[static_cast<std::size_t>(s) * n_a + a] = res.power;
      for (int k = 0; k < n_flows; ++k) rates[(static_cast<std::size_t>(s) * n_a + a) * n_flows + k] = res.rate[k];
    }
  }

  mdp.next.assign(n_flows, {});
  for (int k = 0; k < n_flows; ++k) {
    const auto& g = mdp.grid[k];
    auto& nx = mdp.next[k];
    nx.resize(g.size() * n_s * n_a);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (int s = 0; s < n_s; ++s)
        for (int a = 0; a < n_a; ++a) {
          const double r = rates[(static_cast<std::size_t>(s) * n_a + a) * n_flows + k];
          const double qn = std::min(step_queue(g[i], r, cfg.playback_bps[k], cfg.slot_s), q_max);
          nx[(i * n_s + s) * n_a + a] = nearest_index(g, qn);
        }
  }

  if (!state_weight_id.empty()) {
    out.proposed.resize(n_states * n_s);
    for (std::size_t st = 0; st < n_states; ++st)
      for (int s = 0; s < n_s; ++s) out.proposed[st * n_s + s] = out.product_actions + state_weight_id[st];
  }
  mdp.validate();
  return out;
}

namespace {

constexpr int kMaxFlows = 8;

// Precomputed decoding shared by the sweeps.
struct Flat {
  std::size_t n_states;
  std::vector<double> state_cost;
  std::vector<std::vector<int>> local;  // local[k][state]
  std::vector<std::size_t> stride;
};

Flat flatten(const DiscreteMdp& mdp) {
  if (mdp.flows > kMaxFlows) throw UsageError("mdp: at most 8 flows supported");
  Flat f;
  f.n_states = mdp.n_states();
  f.state_cost.assign(f.n_states, 0.0);
  f.local.assign(mdp.flows, std::vector<int>(f.n_states));
  f.stride.assign(mdp.flows, 1);
  for (int k = 1; k < mdp.flows; ++k) f.stride[k] = f.stride[k - 1] * mdp.grid[k - 1].size();
  for (std::size_t st = 0; st < f.n_states; ++st) {
    const auto idx = mdp.decode(st);
    for (int k = 0; k < mdp.flows; ++k) {
      f.local[k][st] = idx[k];
      f.state_cost[st] += mdp.queue_cost[k][idx[k]];
    }
  }
  return f;
}

// min_a [power + V(next)] for one (state, sample); returns the argmin too.
inline double best_action(const DiscreteMdp& mdp, const Flat& fl, const std::vector<double>& v, std::size_t st, int s,
                          int* arg) {
  const int n_a = mdp.n_actions;
  const int n_s = mdp.n_samples;
  double best = std::numeric_limits<double>::infinity();
  int best_a = 0;
  const double* power = &mdp.action_power[static_cast<std::size_t>(s) * n_a];
  const int* rows[kMaxFlows];
  for (int k = 0; k < mdp.flows; ++k)
    rows[k] = &mdp.next[k][(static_cast<std::size_t>(fl.local[k][st]) * n_s + s) * n_a];
  for (int a = 0; a < n_a; ++a) {
    std::size_t nxt = 0;
    for (int k = 0; k < mdp.flows; ++k) nxt += fl.stride[k] * static_cast<std::size_t>(rows[k][a]);
    const double c = power[a] + v[nxt];
    if (c < best) {
      best = c;
      best_a = a;
    }
  }
  if (arg) *arg = best_a;
  return best;
}

}  // namespace

ViResult relative_value_iteration(const DiscreteMdp& mdp, double tol, int max_sweeps, double damping) {
  mdp.validate();
  if (!(tol > 0.0) || max_sweeps < 1) throw UsageError("relative VI: tol > 0 and max_sweeps >= 1 required");
  if (!(damping > 0.0 && damping <= 1.0)) throw UsageError("relative VI: damping must be in (0, 1]");
  const Flat fl = flatten(mdp);
  const std::size_t n = fl.n_states;
  const double inv_s = 1.0 / mdp.n_samples;
  std::vector<double> v(n, 0.0), tv(n);
  ViResult res;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t st = 0; st < n; ++st) {
      double acc = 0.0;
      for (int s = 0; s < mdp.n_samples; ++s) acc += best_action(mdp, fl, v, st, s, nullptr);
      tv[st] = fl.state_cost[st] + acc * inv_s;
      const double diff = tv[st] - v[st];
      lo = std::min(lo, diff);
      hi = std::max(hi, diff);
    }
    res.sweeps = sweep;
    res.span = hi - lo;
    res.theta = 0.5 * (hi + lo);
    // Aperiodicity transform: V <- (1 - d) V + d T V, renormalised at state 0.
    const double ref = (1.0 - damping) * v[0] + damping * tv[0];
    for (std::size_t st = 0; st < n; ++st) v[st] = (1.0 - damping) * v[st] + damping * tv[st] - ref;
    if (res.span < tol) {
      res.value = std::move(v);
      return res;
    }
  }
  std::ostringstream os;
  os << "relative value iteration did not converge in " << max_sweeps << " sweeps (span " << res.span << ")";
  throw NumericalError(os.str());
}

MdpPolicy greedy_policy(const DiscreteMdp& mdp, const std::vector<double>& value) {
  const Flat fl = flatten(mdp);
  if (value.size() != fl.n_states) throw DomainError("greedy_policy: value table size mismatch");
  MdpPolicy pol(fl.n_states * mdp.n_samples);
  for (std::size_t st = 0; st < fl.n_states; ++st)
    for (int s = 0; s < mdp.n_samples; ++s) best_action(mdp, fl, value, st, s, &pol[st * mdp.n_samples + s]);
  return pol;
}

PolicyEvaluation evaluate_policy(const DiscreteMdp& mdp, const MdpPolicy& policy, std::size_t start, double tol,
                                 int max_iters, std::uint64_t seed) {
  mdp.validate();
  const std::size_t n = mdp.n_states();
  const int n_s = mdp.n_samples;
  if (policy.size() != n * n_s) throw DomainError("evaluate_policy: policy size mismatch");
  if (start >= n) throw DomainError("evaluate_policy: start state out of range");
  for (int a : policy)
    if (a < 0 || a >= mdp.n_actions) throw DomainError("evaluate_policy: action index out of range");

  std::vector<std::size_t> succ(n * n_s);
  std::vector<double> cost(n, 0.0);
  for (std::size_t st = 0; st < n; ++st) {
    for (int s = 0; s < n_s; ++s) {
      const int a = policy[st * n_s + s];
      succ[st * n_s + s] = mdp.next_state(st, s, a);
      cost[st] += mdp.stage_cost(st, s, a);
    }
    cost[st] /= n_s;
  }

  // Lazy power iteration on the state distribution.
  PolicyEvaluation ev;
  std::vector<double> p(n, 0.0), q(n);
  p[start] = 1.0;
  const double w = 0.5 / n_s;
  for (int it = 1; it <= max_iters; ++it) {
    for (std::size_t st = 0; st < n; ++st) q[st] = 0.5 * p[st];
    for (std::size_t st = 0; st < n; ++st) {
      if (p[st] == 0.0) continue;
      const double m = w * p[st];
      for (int s = 0; s < n_s; ++s) q[succ[st * n_s + s]] += m;
    }
    double diff = 0.0;
    for (std::size_t st = 0; st < n; ++st) diff += std::fabs(q[st] - p[st]);
    p.swap(q);
    if (diff < tol) {
      ev.iterations = it;
      for (std::size_t st = 0; st < n; ++st) ev.theta += p[st] * cost[st];
      return ev;
    }
  }

  // Fallback: long simulated trajectory of the chain.
  ev.simulated = true;
  ev.iterations = max_iters;
  Rng rng(seed, Stream::kOracleSamples);
  std::size_t st = start;
  const long burn = 10000;
  const long steps = 2000000;
  double acc = 0.0;
  for (long t = 0; t < burn + steps; ++t) {
    const int s = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n_s));
    if (t >= burn) acc += mdp.stage_cost(st, s, policy[st * n_s + s]);
    st = succ[st * n_s + s];
  }
  ev.theta = acc / steps;
  return ev;
}

OracleGapReport oracle_gap(const SystemConfig& cfg, const ValueModel& model, const OracleOptions& opts) {
  auto built = build_discrete_mdp(cfg, opts, &model);
  if (built.proposed.empty()) throw UsageError("oracle_gap: the catalog must include the proposed controller");
  const auto& mdp = built.mdp;
  const auto vi = relative_value_iteration(mdp, opts.vi_tol, opts.vi_max_sweeps, opts.vi_damping);
  std::vector<double> q_star(cfg.pairs);
  for (int k = 0; k < cfg.pairs; ++k) q_star[k] = model.flows[k].q_star;
  const auto ev = evaluate_policy(mdp, built.proposed, mdp.nearest_state(q_star), 1e-12, 2'000'000, opts.seed);

  OracleGapReport r;
  r.theta_star = vi.theta;
  r.theta_tilde = ev.theta;
  r.vi_span = vi.span;
  r.vi_sweeps = vi.sweeps;
  r.simulated = ev.simulated;
  r.states = mdp.n_states();
  r.samples = mdp.n_samples;
  r.actions = mdp.n_actions;
  r.product_actions = built.product_actions;
  r.proposed_actions = built.proposed_actions;
  Fnv1a h;
  h.update(mdp.action_power.data(), mdp.action_power.size() * sizeof(double));
  for (const auto& nx : mdp.next) h.update(nx.data(), nx.size() * sizeof(int));
  r.catalog_hash = h.hex();
  return r;
}

}  // namespace mimostream
