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

#include <memory>
#include <span>
#include <vector>

#include "pchip.hpp"

#include "channel.hpp"
#include "specfun.hpp"

namespace mimostream {

// Scalar per-flow parameters of the decoupled (zero cross gain) problem.
struct FlowParams {
  int tx_antennas = 1;
  int rx_antennas = 1;
  double bandwidth_hz = 1e6;
  double direct_gain = 1.0;  // zeta * L_kk
  double playback_bps = 1e6;
  double gamma = 1.0;
  double beta = 1.0;
  double eta = 1.0;
  double q_low = 0.0;
  double q_high = 1.0;
  // Use gamma_k instead of beta_k as the queue-cost constant in the
  // small-queue asymptotic equation for D_k.
  bool small_q_uses_gamma = false;

  specfun::SvCoeffs sv;
  std::vector<double> kernel;  // sv.kernel_weights()

  int streams() const { return sv.d; }
  // t_k = -ln 2 / (W L_kk) < 0.
  double t() const;
};

FlowParams flow_params(const SystemConfig& cfg, int k, bool small_q_uses_gamma = false);

// Smoothed queue cost gamma e^{-eta [Q - Ql]^+} + beta e^{-eta [Qh - Q]^+}.
double queue_cost(const FlowParams& p, double q);

// d E[p*] for water level w = -jp W / ln 2, jp < 0; 0 for jp >= 0.
double expected_power(const FlowParams& p, double jp);
// d E[W log2(1 + L sigma^2 p*)]; 0 for jp >= 0.
double expected_rate(const FlowParams& p, double jp);
// d/d jp of expected_rate (negative for jp < 0).
double expected_rate_slope(const FlowParams& p, double jp);

// Unique lambda < 0 with expected_rate(lambda) = mu.
double solve_lambda(const FlowParams& p);

double q_star(const FlowParams& p);

// expected_power(lambda) + queue_cost(Q*). Throws ConfigError unless
// beta > c_inf.
double compute_c_infty(const FlowParams& p, double lambda);

// Large-water-level expansion constants. The expected power behaves as
// -c1 J - c2 - c2_log ln(-J) and the expected rate as c1 ln(-J) + c3 when
// J -> -inf. c2_log is nonzero only for square antenna arrays (s = 0),
// where the order-zero gamma kernel contributes a logarithm.
struct PerturbationConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c2_log = 0.0;
  double c3 = 0.0;

  double asymptotic_power(double jp) const;
  double asymptotic_rate(double jp) const;
};

PerturbationConstants perturbation_constants(const FlowParams& p);

// Root of the small-queue asymptotic fixed point on the branch where the
// asymptotic rate exceeds mu.
double solve_dk(const FlowParams& p, const PerturbationConstants& pc, double c_inf);

// Monotone interpolation table for J'(Q), parametrised by
// s = sign(J' - lambda) sqrt(h(lambda) - h(J')), which is smooth through the
// double root at lambda.
class JprimeTable {
 public:
  JprimeTable() = default;
  JprimeTable(std::vector<double> s, std::vector<double> jprime);

  double operator()(double s) const;
  const std::vector<double>& s() const { return s_; }
  const std::vector<double>& jprime() const { return jp_; }
  bool empty() const { return s_.empty(); }

 private:
  std::vector<double> s_;
  std::vector<double> jp_;
  std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

struct FlowValueModel {
  FlowParams params;
  double lambda = 0.0;
  double c_inf = 0.0;
  double q_star = 0.0;
  double slope_inf = 0.0;  // C_k = (beta - c_inf) / mu
  double d_k = 0.0;
  PerturbationConstants pc;
  JprimeTable table;

  // h(J) = P(J) + J (R(J) - mu); the fixed point reads h(J) = c_inf - qc(Q).
  double h(double jp) const;
  // g(Q, J) = h(J) + qc(Q) - c_inf.
  double residual(double q, double jp) const;
  // Exact root of g(Q, .) on the branch selected by Q versus Q*.
  double solve_jprime(double q) const;
  // Table lookup with the closed form on the J' >= 0 segment.
  double jprime(double q) const;
};

struct ValueModelOptions {
  int table_points = 512;
  bool small_q_uses_gamma = false;
};

FlowValueModel build_flow_model(const FlowParams& p, int table_points = 512);

// E_kj for k != j. Throws NumericalError on a vanishing denominator.
double coupling_coefficient(const FlowValueModel& k, const FlowValueModel& j);

struct ValueModel {
  std::vector<FlowValueModel> flows;
  RMatrix coupling;   // E(k, j); diagonal unused (zero)
  RMatrix path_gain;  // L(k, j)

  // dV/dQ_k = J'_k(Q_k) - sum_{j != k} (L_kj + L_jk) E_kj 1{Q_k <= Q*_k, Q_j <= Q*_j}
  std::vector<double> gradient(std::span<const double> q) const;
  // Same with exact root solves instead of the table.
  std::vector<double> gradient_exact(std::span<const double> q) const;
};

ValueModel build_value_model(const SystemConfig& cfg, const ValueModelOptions& opts = {});

}  // namespace mimostream
