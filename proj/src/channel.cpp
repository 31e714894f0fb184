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

#include "channel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "errors.hpp"

namespace mimostream {

double log_det_hpd(const CMatrix& a) {
  Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError("log_det_hpd: matrix is not positive definite");
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  return 2.0 * acc;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (pairs < 1) fail("pairs >= 1 required");
  if (tx_antennas < 1 || rx_antennas < 1) fail("antenna counts must be positive");
  if (tx_antennas < pairs) fail("Nt >= K required (tx_antennas must be at least the number of pairs)");
  if (!(bandwidth_hz > 0.0)) fail("bandwidth_hz > 0 required");
  if (!(slot_s > 0.0)) fail("slot_s > 0 required");
  if (!(zeta > 0.0 && zeta <= 1.0)) fail("zeta in (0, 1] required");
  if (!(eta > 0.0)) fail("eta > 0 required");
  if (!(q_low > 0.0)) fail("Q_high > Q_low > 0 required (q_low must be positive)");
  if (!(q_high > q_low)) fail("Q_high > Q_low > 0 required (q_high must exceed q_low)");
  const auto k = static_cast<std::size_t>(pairs);
  if (playback_bps.size() != k || gamma.size() != k || beta.size() != k)
    fail("per-pair vectors (playback_bps, gamma, beta) must have one entry per pair");
  if (path_gain.rows() != pairs || path_gain.cols() != pairs) fail("path_gain must be K x K");
  for (int i = 0; i < pairs; ++i)
    if (!(path_gain(i, i) > 0.0) || !std::isfinite(path_gain(i, i))) fail("all gains positive required (direct gain)");
  for (int i = 0; i < pairs; ++i) {
    if (!(playback_bps[i] > 0.0)) fail("playback rate mu_k > 0 required");
    if (!(gamma[i] > 0.0) || !(beta[i] > 0.0)) fail("cost weights gamma_k, beta_k > 0 required");
    for (int j = 0; j < pairs; ++j) {
      if (i == j) continue;
      if (!(path_gain(i, j) >= 0.0) || !std::isfinite(path_gain(i, j))) fail("cross gains must be finite and non-negative");
      if (!(path_gain(i, j) < path_gain(i, i))) {
        std::ostringstream os;
        os << "weak interference L_kj < L_kk required (k=" << i << ", j=" << j << ")";
        fail(os.str());
      }
    }
    // e^{eta (Ql - Qh)} < gamma/beta < e^{eta (Qh - Ql)}, compared in the log domain.
    const double log_ratio = std::log(gamma[i]) - std::log(beta[i]);
    if (!(std::fabs(log_ratio) < eta * (q_high - q_low))) {
      std::ostringstream os;
      os << "weight condition e^{eta(Ql-Qh)} < gamma_k/beta_k < e^{eta(Qh-Ql)} violated for pair " << i;
      fail(os.str());
    }
  }
}

RMatrix uniform_path_gain(int pairs, double snr_db, double cross_ratio) {
  const double direct = std::pow(10.0, snr_db / 10.0);
  RMatrix l = RMatrix::Constant(pairs, pairs, cross_ratio * direct);
  l.diagonal().setConstant(direct);
  return l;
}

double friis_cross_gain(double gr, double gt, double wavelength_m, double distance_m) {
  if (!(gr > 0.0) || !(gt > 0.0) || !(wavelength_m > 0.0) || !(distance_m > 0.0))
    throw DomainError("friis_cross_gain: all arguments must be positive");
  const double r = wavelength_m / (4.0 * std::numbers::pi);
  return gr * gt * r * r / std::pow(distance_m, 4);
}

double PathGainSpec::effective_cross_ratio() const {
  if (mode == Mode::kFriis)
    return friis_cross_gain(gr, gt, wavelength_m, distance_m) / std::pow(10.0, direct_gain_db / 10.0);
  return cross_ratio;
}

RMatrix PathGainSpec::build(int pairs) const {
  if (mode == Mode::kMatrix) {
    if (matrix.rows() != pairs || matrix.cols() != pairs) throw ConfigError("path_gain matrix must be K x K");
    return matrix;
  }
  return uniform_path_gain(pairs, snr_db, effective_cross_ratio());
}

PrecoderSet zero_precoders(const SystemConfig& cfg) {
  PrecoderSet f;
  f.f.assign(cfg.pairs, CMatrix::Zero(cfg.tx_antennas, cfg.streams()));
  return f;
}

ChannelState sample_channel(Rng& rng, const SystemConfig& cfg) {
  ChannelState s;
  s.pairs = cfg.pairs;
  s.h.resize(static_cast<std::size_t>(cfg.pairs) * cfg.pairs);
  const double scale = std::sqrt(0.5);
  for (auto& m : s.h) {
    m.resize(cfg.rx_antennas, cfg.tx_antennas);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double re = rng.normal();
        const double im = rng.normal();
        m(r, c) = cplx(scale * re, scale * im);
      }
  }
  return s;
}

double transmit_power(const CMatrix& f) { return f.squaredNorm(); }

CMatrix interference_plus_noise(const ChannelState& h, const SystemConfig& cfg, const PrecoderSet& f, int k) {
  CMatrix n = CMatrix::Identity(cfg.rx_antennas, cfg.rx_antennas);
  for (int j = 0; j < cfg.pairs; ++j) {
    if (j == k || cfg.path_gain(k, j) == 0.0) continue;
    const CMatrix hf = h.at(k, j) * f.f[j];
    n.noalias() += cfg.path_gain(k, j) * hf * hf.adjoint();
  }
  return n;
}

namespace {

void check_dims(const ChannelState& h, const SystemConfig& cfg, const PrecoderSet& f, int k) {
  if (k < 0 || k >= cfg.pairs) throw DomainError("pair index out of range");
  if (h.pairs != cfg.pairs || static_cast<int>(f.f.size()) != cfg.pairs)
    throw DomainError("channel/precoder dimension mismatch with config");
  for (const auto& fj : f.f)
    if (fj.rows() != cfg.tx_antennas) throw DomainError("precoder row count must equal Nt");
}

}  // namespace

double rate(const ChannelState& h, const SystemConfig& cfg, const PrecoderSet& f, const CMatrix& u, int k) {
  check_dims(h, cfg, f, k);
  if (u.rows() != cfg.rx_antennas) throw DomainError("decoder row count must equal Nr");
  if (f.f[k].size() == 0 || f.f[k].squaredNorm() == 0.0) return 0.0;
  const CMatrix noise = u.adjoint() * interference_plus_noise(h, cfg, f, k) * u;
  const CMatrix g = u.adjoint() * h.at(k, k) * f.f[k];
  const CMatrix signal = cfg.link_gain(k, k) * g * g.adjoint();

  // Whiten on the range of the post-decorrelator noise covariance.
  Eigen::SelfAdjointEigenSolver<CMatrix> es(noise);
  const auto& ev = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, ev.maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cutoff) keep.push_back(i);
  if (keep.empty()) return 0.0;
  CMatrix w(noise.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    w.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) / std::sqrt(ev(keep[c]));
  CMatrix m = w.adjoint() * signal * w;
  m += CMatrix::Identity(m.rows(), m.cols());
  m = 0.5 * (m + m.adjoint()).eval();
  return cfg.bandwidth_hz * log_det_hpd(m) / std::numbers::ln2;
}

double rate_mmse(const ChannelState& h, const SystemConfig& cfg, const PrecoderSet& f, int k) {
  check_dims(h, cfg, f, k);
  if (f.f[k].squaredNorm() == 0.0) return 0.0;
  const CMatrix n = interference_plus_noise(h, cfg, f, k);
  const CMatrix hf = h.at(k, k) * f.f[k];
  CMatrix total = n + cfg.link_gain(k, k) * hf * hf.adjoint();
  const double r = cfg.bandwidth_hz * (log_det_hpd(total) - log_det_hpd(n)) / std::numbers::ln2;
  return std::max(0.0, r);
}

CMatrix mmse_receiver(const ChannelState& h, const SystemConfig& cfg, const PrecoderSet& f, int k) {
  check_dims(h, cfg, f, k);
  const CMatrix hf = h.at(k, k) * f.f[k];
  CMatrix j = interference_plus_noise(h, cfg, f, k);
  j.noalias() += cfg.link_gain(k, k) * hf * hf.adjoint();
  return j.llt().solve(cfg.link_gain(k, k) * hf);
}

}  // namespace mimostream
