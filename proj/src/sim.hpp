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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "channel.hpp"
#include "control.hpp"
#include "mdp_oracle.hpp"
#include "valuefn.hpp"

namespace mimostream {

// [q - mu tau]^+ + rate tau.
double step_queue(double q, double rate_bps, double mu_bps, double tau);

enum class ControllerKind { kProposed, kZfp, kCop, kQwp, kZero };

std::string_view controller_name(ControllerKind c);
ControllerKind parse_controller(std::string_view name);
const std::vector<ControllerKind>& default_controllers();

struct Calibration {
  double cop_alpha = 0.0;   // water level shared by all pairs
  double zfp_power = 0.0;   // watts per pair
  double qwp_alpha = 0.0;   // water level per bit below Q_high
  double cop_rate = 0.0;    // open-loop mean rate per pair at cop_alpha
  double zfp_rate = 0.0;
  std::vector<double> qwp_grid;
  std::vector<double> qwp_grid_objective;
};

struct CalibrationOptions {
  int draws = 200;                 // open-loop channel draws for rate matching
  std::uint64_t seed = 0x5eed;
  int qwp_grid_points = 9;         // geometric grid over [alpha0 / 4, 4 alpha0]
  long qwp_slots = 20000;          // closed-loop calibration episode length
};

struct Metrics {
  int pairs = 0;
  long slots = 0;  // slots after warmup
  std::vector<double> avg_power;
  std::vector<double> avg_rate;
  std::vector<double> avg_queue;
  std::vector<double> interruption_prob;
  std::vector<double> interruption_smooth;
  std::vector<double> overflow_prob;
  std::vector<double> overflow_smooth;
  double objective = 0.0;
};

struct TraceRow {
  long slot = 0;
  int pair = 0;
  double q_bits = 0.0;
  double rate_bps = 0.0;
  double power_w = 0.0;
  bool active = false;
};

struct EpisodeOptions {
  long slots = 100000;
  double warmup_fraction = 0.1;
  std::vector<double> q0;  // empty: start every pair at Q*_k
  bool trace = false;
};

struct EpisodeResult {
  Metrics metrics;
  std::vector<TraceRow> trace;
  // max_k |Q_k(T) - Q_k(0) - sum_t (R_k tau - served_k tau)| / scale
  double conservation_error = 0.0;
};

// One slot's precoders; `active` marks pairs with a non-zero precoder
// decision.
struct SlotAction {
  PrecoderSet f;
  std::vector<char> active;
};
using SlotPolicy = std::function<SlotAction(const ChannelState&, std::span<const double>)>;

struct ControllerSetup {
  ControllerKind kind = ControllerKind::kProposed;
  const ValueModel* model = nullptr;  // required by kProposed
  Calibration calibration;
  WmmseOptions wmmse;
};

SlotPolicy make_policy(const SystemConfig& cfg, const ControllerSetup& setup);

EpisodeResult run_episode(const SlotPolicy& policy, const SystemConfig& cfg, std::uint64_t seed,
                          const EpisodeOptions& opts);
EpisodeResult run_episode(const ControllerSetup& setup, const SystemConfig& cfg, std::uint64_t seed,
                          const EpisodeOptions& opts);

// Rate-matched COP and ZFP parameters (open-loop mean rate per pair equals
// the mean playback rate) and the QWP alpha minimising the closed-loop
// objective on a calibration episode.
Calibration calibrate_baselines(const SystemConfig& cfg, const CalibrationOptions& opts, const WmmseOptions& wmmse,
                                double warmup_fraction = 0.1);

// Everything needed to rebuild a configuration along a sweep axis.
struct Scenario {
  SystemConfig cfg;
  PathGainSpec gain;
  ValueModelOptions value_model;
  WmmseOptions wmmse;
  EpisodeOptions episode;
  CalibrationOptions calibration;
  OracleOptions oracle;
};

enum class SweepAxis { kSnr, kPairs, kSensingDistance, kWeightBeta };
std::string_view axis_name(SweepAxis a);
SweepAxis parse_axis(std::string_view name);

// Scenario with the axis parameter replaced by `value`. For the pairs axis
// Nt follows K; for weight_beta both gamma and beta take the value.
Scenario apply_axis(const Scenario& base, SweepAxis axis, double value);

struct SweepCell {
  double axis_value = 0.0;
  ControllerKind controller = ControllerKind::kProposed;
  std::uint64_t seed = 0;
  Metrics metrics;
};

struct SweepSpec {
  SweepAxis axis = SweepAxis::kSnr;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::vector<ControllerKind> controllers;
};

// Cells ordered by (value, controller, seed) regardless of thread count.
std::vector<SweepCell> sweep(const Scenario& base, const SweepSpec& spec, int threads);

struct RunSummary {
  ControllerKind controller = ControllerKind::kProposed;
  Calibration calibration;
  std::vector<std::uint64_t> seeds;
  std::vector<EpisodeResult> episodes;
};

// All seeds of one controller on one scenario; calibration only when the
// controller needs it.
RunSummary run_controller(const Scenario& sc, ControllerKind controller, const std::vector<std::uint64_t>& seeds,
                          int threads, const ValueModel* model = nullptr);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions are
// rethrown (the one with the smallest index).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace mimostream
