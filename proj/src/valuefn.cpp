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

#include "valuefn.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "roots.hpp"

namespace mimostream {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double expand_left(const std::function<double(double)>& f, double start, const char* what) {
  // Doubles |x| until f(x) < 0; f is increasing on the branch.
  double x = start;
  for (int i = 0; i < 400; ++i) {
    if (f(x) < 0.0) return x;
    x *= 2.0;
  }
  throw NumericalError(std::string(what) + ": could not bracket root from below");
}

}  // namespace

double FlowParams::t() const { return -kLn2 / (bandwidth_hz * direct_gain); }

FlowParams flow_params(const SystemConfig& cfg, int k, bool small_q_uses_gamma) {
  FlowParams p;
  p.tx_antennas = cfg.tx_antennas;
  p.rx_antennas = cfg.rx_antennas;
  p.bandwidth_hz = cfg.bandwidth_hz;
  p.direct_gain = cfg.link_gain(k, k);
  p.playback_bps = cfg.playback_bps.at(k);
  p.gamma = cfg.gamma.at(k);
  p.beta = cfg.beta.at(k);
  p.eta = cfg.eta;
  p.q_low = cfg.q_low;
  p.q_high = cfg.q_high;
  p.small_q_uses_gamma = small_q_uses_gamma;
  p.sv = specfun::sv_coeffs(cfg.tx_antennas, cfg.rx_antennas);
  p.kernel = p.sv.kernel_weights();
  return p;
}

double queue_cost(const FlowParams& p, double q) {
  return p.gamma * std::exp(-p.eta * std::max(0.0, q - p.q_low)) +
         p.beta * std::exp(-p.eta * std::max(0.0, p.q_high - q));
}

double expected_power(const FlowParams& p, double jp) {
  if (!(jp < 0.0)) return 0.0;
  const double t = p.t();
  const double z = t / jp;
  const double level = jp / t;  // water level times L_kk
  double acc = 0.0;
  for (std::size_t m = 1; m < p.kernel.size(); ++m) {
    const double w = p.kernel[m];
    if (w == 0.0) continue;
    const int order = static_cast<int>(m);
    acc += w * (level * specfun::upper_incomplete_gamma(order, z) - specfun::incomplete_gamma_ext(order - 1, z));
  }
  return std::max(0.0, acc / p.direct_gain);
}

double expected_rate(const FlowParams& p, double jp) {
  if (!(jp < 0.0)) return 0.0;
  const double z = p.t() / jp;
  double acc = 0.0;
  for (std::size_t m = 1; m < p.kernel.size(); ++m)
    if (p.kernel[m] != 0.0) acc += p.kernel[m] * specfun::meijer_special(static_cast<int>(m), z);
  return std::max(0.0, p.bandwidth_hz / kLn2 * acc);
}

double expected_rate_slope(const FlowParams& p, double jp) {
  if (!(jp < 0.0)) return 0.0;
  const double z = p.t() / jp;
  double acc = 0.0;
  for (std::size_t m = 1; m < p.kernel.size(); ++m)
    if (p.kernel[m] != 0.0) acc += p.kernel[m] * specfun::upper_incomplete_gamma(static_cast<int>(m), z);
  return p.bandwidth_hz / kLn2 * acc / jp;
}

double PerturbationConstants::asymptotic_power(double jp) const {
  return -c1 * jp - c2 - c2_log * std::log(-jp);
}

double PerturbationConstants::asymptotic_rate(double jp) const { return c1 * std::log(-jp) + c3; }

PerturbationConstants perturbation_constants(const FlowParams& p) {
  PerturbationConstants pc;
  const double t = p.t();
  const double lnmt = std::log(-t);
  for (std::size_t m = 1; m < p.kernel.size(); ++m) {
    const double w = p.kernel[m];
    if (w == 0.0) continue;
    const int order = static_cast<int>(m);
    const double fm1 = specfun::factorial(order - 1);
    pc.c1 += w * fm1 / (-t);
    pc.c3 += w * fm1 * (-lnmt + specfun::digamma_int(order));
    if (order >= 2) {
      pc.c2 += w * specfun::factorial(order - 2);
    } else {
      // G(0, z) = E1(z) ~ -gamma_E - ln z with z = t / J.
      pc.c2 += -w * (specfun::kEulerGamma + lnmt);
      pc.c2_log += w;
    }
  }
  pc.c1 /= p.direct_gain;
  pc.c2 /= p.direct_gain;
  pc.c2_log /= p.direct_gain;
  pc.c3 *= p.bandwidth_hz / kLn2;
  return pc;
}

double solve_lambda(const FlowParams& p) {
  const double mu = p.playback_bps;
  if (!(mu > 0.0)) throw ConfigError("playback rate mu_k > 0 required");
  const auto pc = perturbation_constants(p);
  const double expo = std::clamp((mu - pc.c3) / pc.c1, -600.0, 600.0);
  const double guess = -std::exp(expo);
  auto f = [&](double j) { return expected_rate(p, j) - mu; };
  auto df = [&](double j) { return expected_rate_slope(p, j); };
  double lo = guess;
  double hi = guess;
  int n = 0;
  while (f(lo) <= 0.0) {
    lo *= 2.0;
    if (++n > 1500 || !std::isfinite(lo)) throw ConfigError("playback rate unreachable: expected rate cannot reach mu_k");
  }
  n = 0;
  while (f(hi) >= 0.0) {
    hi *= 0.5;
    if (++n > 1500) throw ConfigError("playback rate unreachable: cannot bracket lambda_k from above");
  }
  return detail::bracketed_newton(f, df, lo, hi, 1e-11 * mu, "solve_lambda");
}

double q_star(const FlowParams& p) {
  const double log_ratio = std::log(p.gamma) - std::log(p.beta);
  if (!(std::fabs(log_ratio) < p.eta * (p.q_high - p.q_low)))
    throw ConfigError("weight condition e^{eta(Ql-Qh)} < gamma_k/beta_k < e^{eta(Qh-Ql)} violated");
  return 0.5 * (p.q_low + p.q_high) + log_ratio / (2.0 * p.eta);
}

double compute_c_infty(const FlowParams& p, double lambda) {
  const double qs = q_star(p);
  const double c = expected_power(p, lambda) + p.gamma * std::exp(-p.eta * (qs - p.q_low)) +
                   p.beta * std::exp(-p.eta * (p.q_high - qs));
  if (!(p.beta > c)) {
    std::ostringstream os;
    os << "beta_k > c_k^inf required (beta_k = " << p.beta << ", c_k^inf = " << c << ")";
    throw ConfigError(os.str());
  }
  return c;
}

double solve_dk(const FlowParams& p, const PerturbationConstants& pc, double c_inf) {
  const double weight = p.small_q_uses_gamma ? p.gamma : p.beta;
  if (!(weight > c_inf)) throw ConfigError("beta_k > c_k^inf required for the small-queue asymptote");
  const double mu = p.playback_bps;
  auto f = [&](double d) {
    return pc.asymptotic_power(d) + weight + d * (pc.asymptotic_rate(d) - mu) - c_inf;
  };
  auto df = [&](double d) { return pc.asymptotic_rate(d) - mu - pc.c2_log / d; };
  // The branch of interest is where the asymptotic rate exceeds mu.
  const double edge = -std::exp(std::clamp((mu - pc.c3) / pc.c1, -600.0, 600.0));
  if (!(f(edge) > 0.0))
    throw ConfigError("small-queue asymptotic equation has no root with rate above mu_k");
  const double lo = expand_left(f, 2.0 * edge, "solve_dk");
  return detail::bracketed_newton(f, df, lo, edge, 1e-12 * std::max(1.0, c_inf), "solve_dk");
}

JprimeTable::JprimeTable(std::vector<double> s, std::vector<double> jprime) : s_(std::move(s)), jp_(std::move(jprime)) {
  if (s_.size() != jp_.size() || s_.size() < 4) throw NumericalError("J' table: need at least 4 matched points");
  for (std::size_t i = 1; i < s_.size(); ++i)
    if (!(s_[i] > s_[i - 1]) || !(jp_[i] >= jp_[i - 1])) throw NumericalError("J' table: abscissae not monotone");
  interp_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::vector<double>(s_),
                                                                                      std::vector<double>(jp_));
}

double JprimeTable::operator()(double s) const {
  s = std::clamp(s, s_.front(), s_.back());
  return (*interp_)(s);
}

double FlowValueModel::h(double jp) const {
  if (jp >= 0.0) return -params.playback_bps * jp;
  return expected_power(params, jp) + jp * (expected_rate(params, jp) - params.playback_bps);
}

double FlowValueModel::residual(double q, double jp) const { return h(jp) + queue_cost(params, q) - c_inf; }

double FlowValueModel::solve_jprime(double q) const {
  const double mu = params.playback_bps;
  const double qc = queue_cost(params, q);
  const double ftol = 1e-12 * std::max({1.0, c_inf, qc});
  auto g = [&](double j) { return h(j) + qc - c_inf; };
  auto dg = [&](double j) { return j < 0.0 ? expected_rate(params, j) - mu : -mu; };
  if (q <= q_star) {
    if (g(lambda) <= ftol) return lambda;
    const double lo = expand_left(g, 2.0 * lambda, "solve_jprime");
    return detail::bracketed_newton(g, dg, lo, lambda, ftol, "solve_jprime (left branch)");
  }
  if (qc >= c_inf) return (qc - c_inf) / mu;
  if (g(lambda) <= ftol) return lambda;
  return detail::bracketed_newton(g, dg, lambda, 0.0, ftol, "solve_jprime (right branch)");
}

double FlowValueModel::jprime(double q) const {
  const double qc = queue_cost(params, q);
  if (q > q_star && qc >= c_inf) return (qc - c_inf) / params.playback_bps;
  const double delta = std::max(0.0, qc - queue_cost(params, q_star));
  const double s = q < q_star ? -std::sqrt(delta) : std::sqrt(delta);
  return table(s);
}

FlowValueModel build_flow_model(const FlowParams& p, int table_points) {
  if (table_points < 8) throw UsageError("table_points must be at least 8");
  FlowValueModel m;
  m.params = p;
  m.pc = perturbation_constants(p);
  m.lambda = solve_lambda(p);
  m.q_star = q_star(p);
  m.c_inf = compute_c_infty(p, m.lambda);
  m.slope_inf = (p.beta - m.c_inf) / p.playback_bps;
  try {
    m.d_k = solve_dk(p, m.pc, m.c_inf);
  } catch (const ConfigError&) {
    m.d_k = kNaN;
  }

  // Table over s = sign(J - lambda) sqrt(h(lambda) - h(J)).
  const double h_lambda = m.h(m.lambda);
  const double qc_star = queue_cost(p, m.q_star);
  const double span_left = 1.25 * (queue_cost(p, 0.0) - qc_star) + 1e-12;
  // Left end: h(J_min) = h(lambda) - span_left.
  auto left_eq = [&](double j) { return m.h(j) - (h_lambda - span_left); };
  auto left_deq = [&](double j) { return expected_rate(p, j) - p.playback_bps; };
  const double lo = expand_left(left_eq, 2.0 * m.lambda, "J' table");
  const double j_min =
      detail::bracketed_newton(left_eq, left_deq, lo, m.lambda, 1e-12 * std::max(1.0, span_left), "J' table");

  const int n_left = table_points / 2;
  const int n_right = table_points - n_left - 1;
  std::vector<double> js;
  js.reserve(table_points);
  for (int i = n_left; i >= 1; --i) {
    const double u = static_cast<double>(i) / n_left;
    js.push_back(m.lambda + (j_min - m.lambda) * u * u);
  }
  js.push_back(m.lambda);
  for (int i = 1; i <= n_right; ++i) {
    const double u = static_cast<double>(i) / n_right;
    js.push_back(m.lambda * (1.0 - u * u));
  }
  std::vector<double> ss;
  ss.reserve(js.size());
  for (double j : js) {
    const double gap = std::max(0.0, h_lambda - m.h(j));
    ss.push_back(j < m.lambda ? -std::sqrt(gap) : std::sqrt(gap));
  }
  m.table = JprimeTable(std::move(ss), std::move(js));
  return m;
}

double coupling_coefficient(const FlowValueModel& k, const FlowValueModel& j) {
  if (!std::isfinite(k.d_k) || !std::isfinite(j.d_k))
    throw ConfigError("coupling coefficient needs D_k; the small-queue asymptotic equation has no valid root");
  const double num = kLn2 * (-k.pc.asymptotic_power(k.d_k)) * (-j.pc.asymptotic_power(j.d_k));
  const double gap = k.params.playback_bps - k.pc.asymptotic_rate(k.d_k);
  if (std::fabs(gap) < 1e-12 * k.params.playback_bps)
    throw NumericalError("coupling coefficient: degenerate configuration (mu_k - c1 ln(-D_k) - c3 ~ 0)");
  if (!(gap < 0.0)) throw NumericalError("coupling coefficient: expected mu_k - c1 ln(-D_k) - c3 < 0");
  return num / (2.0 * k.params.streams() * k.params.bandwidth_hz * gap);
}

namespace {

// J'_k(Q_k) from `jp`, minus the coupling slopes of the pairs below Q*.
template <class Jp>
std::vector<double> assemble_gradient(const ValueModel& vm, std::span<const double> q, Jp&& jp) {
  const int n = static_cast<int>(vm.flows.size());
  if (static_cast<int>(q.size()) != n) throw DomainError("gradient: queue vector size mismatch");
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) {
    double v = jp(vm.flows[k], q[k]);
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      const double l = vm.path_gain(k, j) + vm.path_gain(j, k);
      if (l == 0.0) continue;
      if (q[k] <= vm.flows[k].q_star && q[j] <= vm.flows[j].q_star) v -= l * vm.coupling(k, j);
    }
    g[k] = v;
  }
  return g;
}

}  // namespace

std::vector<double> ValueModel::gradient(std::span<const double> q) const {
  return assemble_gradient(*this, q, [](const FlowValueModel& f, double x) { return f.jprime(x); });
}

std::vector<double> ValueModel::gradient_exact(std::span<const double> q) const {
  return assemble_gradient(*this, q, [](const FlowValueModel& f, double x) { return f.solve_jprime(x); });
}

ValueModel build_value_model(const SystemConfig& cfg, const ValueModelOptions& opts) {
  cfg.validate();
  ValueModel vm;
  vm.path_gain = cfg.path_gain;
  vm.flows.reserve(cfg.pairs);
  for (int k = 0; k < cfg.pairs; ++k) {
    try {
      vm.flows.push_back(build_flow_model(flow_params(cfg, k, opts.small_q_uses_gamma), opts.table_points));
    } catch (const Error& e) {
      std::ostringstream os;
      os << "pair " << k << ": " << e.what();
      if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(os.str());
      if (dynamic_cast<const UsageError*>(&e)) throw UsageError(os.str());
      throw NumericalError(os.str());
    }
  }
  vm.coupling = RMatrix::Zero(cfg.pairs, cfg.pairs);
  for (int k = 0; k < cfg.pairs; ++k)
    for (int j = 0; j < cfg.pairs; ++j) {
      if (j == k) continue;
      if (cfg.path_gain(k, j) + cfg.path_gain(j, k) == 0.0) continue;
      vm.coupling(k, j) = coupling_coefficient(vm.flows[k], vm.flows[j]);
    }
  return vm;
}

}  // namespace mimostream
