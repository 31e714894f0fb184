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

#include <cstdint>
#include <string>
#include <vector>

#include "channel.hpp"
#include "control.hpp"
#include "valuefn.hpp"

namespace mimostream {

// Finite average-cost MDP over a product queue grid. The channel sample is
// drawn uniformly each slot and observed before acting; the action catalog is
// indexed per sample. Flow k's next queue depends only on its own queue
// index, the sample and the action, so transitions are stored per flow.
struct DiscreteMdp {
  int flows = 0;
  std::vector<std::vector<double>> grid;        // grid[k][i] in bits
  int n_samples = 0;
  int n_actions = 0;
  std::vector<double> action_power;             // [s * n_actions + a]
  std::vector<std::vector<int>> next;           // next[k][(i * n_samples + s) * n_actions + a]
  std::vector<std::vector<double>> queue_cost;  // queue_cost[k][i]

  std::size_t n_states() const;
  // Mixed radix with flow 0 least significant.
  std::vector<int> decode(std::size_t state) const;
  std::size_t encode(const std::vector<int>& idx) const;
  std::size_t next_state(std::size_t state, int sample, int action) const;
  double stage_cost(std::size_t state, int sample, int action) const;
  // Nearest grid point per flow.
  std::size_t nearest_state(const std::vector<double>& q) const;
  void validate() const;
};

struct OracleOptions {
  int grid_points = 48;
  int channel_samples = 24;
  // Per-flow weight levels as multiples of the flow's rate-matching water
  // level; the zero level is always present.
  std::vector<double> level_multipliers{0.5, 1.0, 2.0, 4.0};
  bool include_proposed = true;
  double q_max_factor = 3.0;  // Q_max = factor * Q_high
  std::uint64_t seed = 1;
  std::size_t budget = 60'000'000;  // states * samples * actions
  double vi_tol = 1e-7;
  int vi_max_sweeps = 200'000;
  double vi_damping = 0.9;
  WmmseOptions wmmse;
};

// policy[state * n_samples + sample] = action index.
using MdpPolicy = std::vector<int>;

struct BuiltMdp {
  DiscreteMdp mdp;
  // Proposed controller mapped onto the catalog; empty when not requested.
  MdpPolicy proposed;
  int product_actions = 0;
  int proposed_actions = 0;
};

std::vector<ChannelState> oracle_channel_samples(const SystemConfig& cfg, const OracleOptions& opts);

// Uses `samples` when non-empty, otherwise draws oracle_channel_samples.
BuiltMdp build_discrete_mdp(const SystemConfig& cfg, const OracleOptions& opts, const ValueModel* model = nullptr,
                            const std::vector<ChannelState>& samples = {});

struct ViResult {
  double theta = 0.0;
  double span = 0.0;
  int sweeps = 0;
  std::vector<double> value;
};

ViResult relative_value_iteration(const DiscreteMdp& mdp, double tol, int max_sweeps, double damping = 0.9);

MdpPolicy greedy_policy(const DiscreteMdp& mdp, const std::vector<double>& value);

struct PolicyEvaluation {
  double theta = 0.0;
  bool simulated = false;  // power iteration did not settle; Monte Carlo estimate
  int iterations = 0;
};

// Long-run average cost of the chain started at `start`.
PolicyEvaluation evaluate_policy(const DiscreteMdp& mdp, const MdpPolicy& policy, std::size_t start,
                                 double tol = 1e-12, int max_iters = 2'000'000, std::uint64_t seed = 1);

struct OracleGapReport {
  double theta_star = 0.0;
  double theta_tilde = 0.0;
  double vi_span = 0.0;
  int vi_sweeps = 0;
  bool simulated = false;
  std::size_t states = 0;
  int samples = 0;
  int actions = 0;
  int product_actions = 0;
  int proposed_actions = 0;
  std::string catalog_hash;
  double gap() const { return theta_tilde - theta_star; }
};

OracleGapReport oracle_gap(const SystemConfig& cfg, const ValueModel& model, const OracleOptions& opts);

}  // namespace mimostream
