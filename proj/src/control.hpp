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
#include <span>
#include <vector>

#include "channel.hpp"

namespace mimostream {

enum class InitScheme { kMatchedFilter, kRandomSeeded };

struct WmmseOptions {
  int max_iters = 100;
  double obj_tol = 1e-6;
  InitScheme init = InitScheme::kMatchedFilter;
  std::uint64_t seed = 0;
  bool record_trace = false;

  void validate() const;
};

struct SlotDecision {
  PrecoderSet f;
  DecoderSet u;
  std::vector<int> active;
  int iters_used = 0;
  double objective = 0.0;
  // With record_trace: surrogate weighted sum-MSE objective after each
  // precoder update, and the true objective of each iterate.
  std::vector<double> surrogate_trace;
  std::vector<double> objective_trace;
};

// {k : grad_k < 0}.
std::vector<int> active_set(std::span<const double> grad);

// Minimises sum_k Tr(F_k F_k^H) - a_k ln det(I + SINR_k) over the pairs with
// a_k > 0; pairs with a_k <= 0 get zero precoder and decoder. The returned
// objective is in the same units (nats weighted by a_k).
SlotDecision wmmse_solve_weights(const ChannelState& h, const SystemConfig& cfg, std::span<const double> weights,
                                 const WmmseOptions& opts = {});

// Weight -grad_k W / ln 2 for every pair with grad_k < 0.
SlotDecision wmmse_solve(const ChannelState& h, const SystemConfig& cfg, std::span<const double> grad,
                         const WmmseOptions& opts = {});

// sum_k [Tr(F_k F_k^H) + grad_k R_k(F)] with the MMSE-receiver rate.
double wmmse_objective(const ChannelState& h, const SystemConfig& cfg, std::span<const double> grad,
                       const PrecoderSet& f);

// F = V_d diag(sqrt(p_i)) with p_i = (w - 1 / (gain sigma_i^2))^+ over the d
// dominant right singular vectors of h.
CMatrix single_user_waterfill(const CMatrix& h, double gain, double water_level, int streams);

// Zero-forcing precoders at fixed power per pair. When Nt exceeds the total
// receive dimension of the other pairs, every cross channel is nulled
// exactly; otherwise the dominant right singular direction of each cross
// channel is removed.
PrecoderSet zfp_precoder(const ChannelState& h, const SystemConfig& cfg, double power_per_pair);

// QSI-blind WMMSE with the same weight alpha (a water level) for every pair.
SlotDecision cop_precoder(const ChannelState& h, const SystemConfig& cfg, double alpha, const WmmseOptions& opts = {});

// WMMSE with weight alpha [Q_high - Q_k]^+.
SlotDecision qwp_precoder(const ChannelState& h, const SystemConfig& cfg, std::span<const double> q, double alpha,
                          const WmmseOptions& opts = {});

}  // namespace mimostream
