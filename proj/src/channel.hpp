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

#include "linalg.hpp"
#include "rng.hpp"

namespace mimostream {

// Scenario parameters for a K-pair MIMO interference network.
// Queue quantities are in bits, rates in bit/s, power in units of the
// receiver noise power.
struct SystemConfig {
  int pairs = 1;
  int tx_antennas = 1;
  int rx_antennas = 1;
  double bandwidth_hz = 1e6;
  double slot_s = 0.01;
  double zeta = 1.0;
  std::vector<double> playback_bps;  // mu_k
  std::vector<double> gamma;         // interruption weight
  std::vector<double> beta;          // overflow weight
  double eta = 50.0;
  double q_low = 5e4;
  double q_high = 1.5e5;
  RMatrix path_gain;  // L(k, j): gain from BS j to user k
  std::uint64_t seed = 1;

  int streams() const { return std::min(tx_antennas, rx_antennas); }

  // Gain seen by user k from BS j with the MCS factor applied to the direct
  // link: zeta * L_kk on the diagonal, L_kj elsewhere.
  double link_gain(int k, int j) const { return k == j ? zeta * path_gain(k, k) : path_gain(k, j); }

  // Throws ConfigError naming the first violated invariant.
  void validate() const;
};

// Direct gains from an average transmit SNR per pair (unit noise, unit
// reference power) and uniform cross gains L_kj = ratio * L_kk.
RMatrix uniform_path_gain(int pairs, double snr_db, double cross_ratio);

// Worst-case cross gain at carrier-sensing distance delta under a
// fourth-power Friis law: Gr Gt (lambda / 4 pi)^2 / delta^4.
double friis_cross_gain(double gr, double gt, double wavelength_m, double distance_m);

// How the path-gain matrix is built from scenario parameters. In Friis mode
// the cross/direct ratio is the Friis gain divided by the direct path gain
// (given in dB), applied on top of the SNR-derived direct gain.
struct PathGainSpec {
  enum class Mode { kRatio, kFriis, kMatrix };
  Mode mode = Mode::kRatio;
  double snr_db = -5.0;
  double cross_ratio = 0.1;
  double gr = 2.0;
  double gt = 2.0;
  double wavelength_m = 0.125;
  double distance_m = 188.0;
  double direct_gain_db = -75.0;
  RMatrix matrix;

  double effective_cross_ratio() const;
  RMatrix build(int pairs) const;
};

// H[k * K + j] is the Nr x Nt channel from BS j to user k.
struct ChannelState {
  int pairs = 0;
  std::vector<CMatrix> h;

  const CMatrix& at(int k, int j) const { return h[static_cast<std::size_t>(k) * pairs + j]; }
  CMatrix& at(int k, int j) { return h[static_cast<std::size_t>(k) * pairs + j]; }
};

// F_k is Nt x d.
struct PrecoderSet {
  std::vector<CMatrix> f;
};

// U_k is Nr x d.
struct DecoderSet {
  std::vector<CMatrix> u;
};

PrecoderSet zero_precoders(const SystemConfig& cfg);

ChannelState sample_channel(Rng& rng, const SystemConfig& cfg);

double transmit_power(const CMatrix& f);

// sum_{j != k} L_kj H_kj F_j F_j^H H_kj^H + I.
CMatrix interference_plus_noise(const ChannelState& h, const SystemConfig& cfg, const PrecoderSet& f, int k);

// Achievable rate of pair k with decorrelator u treating interference as
// noise. The noise seen after the decorrelator is u^H (interference + I) u;
// decorrelator directions outside its range carry no information.
double rate(const ChannelState& h, const SystemConfig& cfg, const PrecoderSet& f, const CMatrix& u, int k);

// Rate with the MMSE decorrelator, via the receiver-free form
//   W log2 det(I + zeta L_kk H_kk F_k F_k^H H_kk^H N_k^-1).
double rate_mmse(const ChannelState& h, const SystemConfig& cfg, const PrecoderSet& f, int k);

// U_k = J_k^-1 L_kk H_kk F_k, J_k = sum_j L_kj H_kj F_j F_j^H H_kj^H + I.
CMatrix mmse_receiver(const ChannelState& h, const SystemConfig& cfg, const PrecoderSet& f, int k);

}  // namespace mimostream
