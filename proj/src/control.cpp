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

#include "control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace mimostream {

namespace {

// Dominant `n` right singular vectors of h.
CMatrix dominant_right(const CMatrix& h, int n) {
  Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeFullV);
  return svd.matrixV().leftCols(n);
}

// Orthonormal basis of the null space of the rows of c.
CMatrix null_basis(const CMatrix& c, int cols) {
  if (c.rows() == 0) return CMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<CMatrix> svd(c, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0) * cols;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

constexpr int kSmall = 8;
using SmallMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kSmall, kSmall>;

// Hand-rolled kernels for the tiny Hermitian systems of the WMMSE loop;
// Eigen's blocked paths cost more than the arithmetic at these sizes.

// Cholesky of the lower triangle of a, in place. Returns false unless a is
// positive definite; log_det receives ln det a.
template <class M>
bool chol_inplace(M& a, double& log_det) {
  const Eigen::Index n = a.rows();
  log_det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double djj = a(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) djj -= std::norm(a(j, k));
    if (!(djj > 0.0)) return false;
    const double l = std::sqrt(djj);
    a(j, j) = l;
    log_det += 2.0 * std::log(l);
    const double inv = 1.0 / l;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cplx acc = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) acc -= a(i, k) * std::conj(a(j, k));
      a(i, j) = acc * inv;
    }
  }
  return true;
}

// b <- L^-1 b.
template <class M>
void lower_solve(const M& l, M& b) {
  const Eigen::Index n = l.rows();
  for (Eigen::Index c = 0; c < b.cols(); ++c)
    for (Eigen::Index i = 0; i < n; ++i) {
      cplx acc = b(i, c);
      for (Eigen::Index k = 0; k < i; ++k) acc -= l(i, k) * b(k, c);
      b(i, c) = acc / l(i, i).real();
    }
}

// b <- L^-H b.
template <class M>
void upper_solve(const M& l, M& b) {
  const Eigen::Index n = l.rows();
  for (Eigen::Index c = 0; c < b.cols(); ++c)
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      cplx acc = b(i, c);
      for (Eigen::Index k = i + 1; k < n; ++k) acc -= std::conj(l(k, i)) * b(k, c);
      b(i, c) = acc / l(i, i).real();
    }
}

template <class M>
SlotDecision wmmse_core(const ChannelState& h, const SystemConfig& cfg, std::span<const double> weights,
                        const WmmseOptions& opts) {
  const int n_pairs = cfg.pairs;
  if (static_cast<int>(weights.size()) != n_pairs) throw DomainError("wmmse: weight vector size mismatch");
  if (h.pairs != n_pairs) throw DomainError("wmmse: channel size mismatch");
  const int nt = cfg.tx_antennas;
  const int nr = cfg.rx_antennas;
  const int d = cfg.streams();

  SlotDecision out;
  out.f = zero_precoders(cfg);
  out.u.u.assign(n_pairs, CMatrix::Zero(nr, d));
  for (int k = 0; k < n_pairs; ++k)
    if (weights[k] > 0.0 && std::isfinite(weights[k])) out.active.push_back(k);
  const auto& act = out.active;
  const int na = static_cast<int>(act.size());
  if (na == 0) return out;

  // Effective channels sqrt(L_kj) H_kj restricted to the active pairs.
  std::vector<M> g(static_cast<std::size_t>(na) * na);
  auto gi = [&](int a, int b) -> M& { return g[static_cast<std::size_t>(a) * na + b]; };
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b) gi(a, b) = std::sqrt(cfg.link_gain(act[a], act[b])) * h.at(act[a], act[b]);
  std::vector<double> w(na);
  for (int a = 0; a < na; ++a) w[a] = weights[act[a]];

  std::vector<M> f(na), rx(na), z(na), e(na), root(na);
  std::vector<double> log_det_e(na);
  if (opts.init == InitScheme::kMatchedFilter) {
    for (int a = 0; a < na; ++a) f[a] = dominant_right(h.at(act[a], act[a]), d);
  } else {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(Stream::kWmmseInit)));
    for (int a = 0; a < na; ++a) {
      f[a].resize(nt, d);
      for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < nt; ++r) f[a](r, c) = cplx(rng.normal(), rng.normal());
        f[a].col(c).normalize();
      }
    }
  }

  const M eye_r = M::Identity(nr, nr);
  const M eye_d = M::Identity(d, d);
  const M eye_t = M::Identity(nt, nt);
  std::vector<M> hf(static_cast<std::size_t>(na) * na);
  auto hfi = [&](int a, int b) -> M& { return hf[static_cast<std::size_t>(a) * na + b]; };
  M jm(nr, nr), am(nt, nt), tmp(nt, d), le(d, d), tmp_d(d, nr), rxz(nr, d);
  double ld = 0.0;

  // MMSE receivers and MSE weights for the current precoders; returns the
  // true objective sum_k Tr(F F^H) - w_k ln det Z_k.
  auto receivers = [&]() {
    double obj = 0.0;
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < na; ++b) hfi(a, b).noalias() = gi(a, b).lazyProduct(f[b]);
    for (int a = 0; a < na; ++a) {
      jm = eye_r;
      for (int b = 0; b < na; ++b) jm.noalias() += hfi(a, b).lazyProduct(hfi(a, b).adjoint());
      if (!chol_inplace(jm, ld)) throw NumericalError("wmmse: interference covariance not positive definite");
      rx[a] = hfi(a, a);
      lower_solve(jm, rx[a]);
      upper_solve(jm, rx[a]);
      e[a] = eye_d;
      e[a].noalias() -= rx[a].adjoint().lazyProduct(hfi(a, a));
      le = e[a];
      if (!chol_inplace(le, log_det_e[a])) throw NumericalError("wmmse: MSE matrix lost positive definiteness");
      // Z = E^-1 = L^-H L^-1, and rx Z rx^H = root root^H with root = rx L^-H.
      tmp_d = rx[a].adjoint();
      lower_solve(le, tmp_d);
      root[a] = tmp_d.adjoint();
      z[a] = eye_d;
      lower_solve(le, z[a]);
      upper_solve(le, z[a]);
      obj += f[a].squaredNorm() + w[a] * log_det_e[a];
    }
    return obj;
  };

  auto surrogate = [&]() {
    double s = 0.0;
    for (int a = 0; a < na; ++a) {
      // MSE of receiver rx[a] against the updated precoders.
      M err = eye_d - rx[a].adjoint() * gi(a, a) * f[a];
      M mse = err * err.adjoint() + rx[a].adjoint() * rx[a];
      for (int b = 0; b < na; ++b) {
        if (b == a) continue;
        const M t = rx[a].adjoint() * gi(a, b) * f[b];
        mse.noalias() += t * t.adjoint();
      }
      // Tr(Z E) - d - ln det Z, equal to -ln det Z_mmse when E is the MMSE error.
      s += f[a].squaredNorm() + w[a] * ((z[a] * mse).trace().real() - d + log_det_e[a]);
    }
    return s;
  };

  double obj = receivers();
  if (opts.record_trace) out.objective_trace.push_back(obj);
  int iters = 0;
  while (iters < opts.max_iters) {
    for (int a = 0; a < na; ++a) {
      am = eye_t;
      for (int b = 0; b < na; ++b) {
        tmp.noalias() = gi(b, a).adjoint().lazyProduct(root[b]);
        am.noalias() += w[b] * tmp.lazyProduct(tmp.adjoint());
      }
      rxz.noalias() = rx[a].lazyProduct(z[a]);
      f[a].noalias() = w[a] * gi(a, a).adjoint().lazyProduct(rxz);
      if (!chol_inplace(am, ld)) throw NumericalError("wmmse: precoder system not positive definite");
      lower_solve(am, f[a]);
      upper_solve(am, f[a]);
    }
    ++iters;
    if (opts.record_trace) out.surrogate_trace.push_back(surrogate());
    const double prev = obj;
    obj = receivers();
    if (!std::isfinite(obj)) {
      std::ostringstream os;
      os << "wmmse: non-finite objective at iteration " << iters;
      throw NumericalError(os.str());
    }
    if (opts.record_trace) out.objective_trace.push_back(obj);
    if (std::fabs(obj - prev) <= opts.obj_tol * std::max(std::fabs(prev), 1e-300)) break;
  }

  out.iters_used = iters;
  out.objective = obj;
  for (int a = 0; a < na; ++a) {
    out.f.f[act[a]] = CMatrix(f[a]);
    out.u.u[act[a]] = CMatrix(rx[a]);
  }
  return out;
}

}  // namespace

void WmmseOptions::validate() const {
  if (max_iters < 1) throw UsageError("wmmse max_iters must be >= 1");
  if (!(obj_tol > 0.0)) throw UsageError("wmmse obj_tol must be > 0");
}

std::vector<int> active_set(std::span<const double> grad) {
  std::vector<int> a;
  for (std::size_t k = 0; k < grad.size(); ++k)
    if (grad[k] < 0.0) a.push_back(static_cast<int>(k));
  return a;
}

SlotDecision wmmse_solve_weights(const ChannelState& h, const SystemConfig& cfg, std::span<const double> weights,
                                 const WmmseOptions& opts) {
  opts.validate();
  // Fixed-capacity storage avoids heap traffic for the usual small arrays.
  if (cfg.tx_antennas <= kSmall && cfg.rx_antennas <= kSmall) return wmmse_core<SmallMatrix>(h, cfg, weights, opts);
  return wmmse_core<CMatrix>(h, cfg, weights, opts);
}

SlotDecision wmmse_solve(const ChannelState& h, const SystemConfig& cfg, std::span<const double> grad,
                         const WmmseOptions& opts) {
  std::vector<double> w(grad.size(), 0.0);
  const double scale = cfg.bandwidth_hz / std::numbers::ln2;
  for (std::size_t k = 0; k < grad.size(); ++k)
    if (grad[k] < 0.0) w[k] = -grad[k] * scale;
  return wmmse_solve_weights(h, cfg, w, opts);
}

double wmmse_objective(const ChannelState& h, const SystemConfig& cfg, std::span<const double> grad,
                       const PrecoderSet& f) {
  if (static_cast<int>(grad.size()) != cfg.pairs) throw DomainError("wmmse_objective: gradient size mismatch");
  double obj = 0.0;
  for (int k = 0; k < cfg.pairs; ++k) {
    obj += transmit_power(f.f[k]);
    if (grad[k] != 0.0) obj += grad[k] * rate_mmse(h, cfg, f, k);
  }
  return obj;
}

CMatrix single_user_waterfill(const CMatrix& h, double gain, double water_level, int streams) {
  if (!(water_level >= 0.0)) throw DomainError("single_user_waterfill: water level must be non-negative");
  if (!(gain > 0.0)) throw DomainError("single_user_waterfill: gain must be positive");
  Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeFullV);
  CMatrix f = CMatrix::Zero(h.cols(), streams);
  const auto& sv = svd.singularValues();
  for (int i = 0; i < streams && i < sv.size(); ++i) {
    const double s2 = sv(i) * sv(i);
    if (s2 <= 0.0) continue;
    const double p = water_level - 1.0 / (gain * s2);
    if (p > 0.0) f.col(i) = svd.matrixV().col(i) * std::sqrt(p);
  }
  return f;
}

PrecoderSet zfp_precoder(const ChannelState& h, const SystemConfig& cfg, double power_per_pair) {
  if (!(power_per_pair >= 0.0)) throw DomainError("zfp: power must be non-negative");
  const int n = cfg.pairs;
  const int nt = cfg.tx_antennas;
  const int nr = cfg.rx_antennas;
  if (nt < n) throw ConfigError("zfp: Nt >= K required for a non-trivial null space");
  PrecoderSet out = zero_precoders(cfg);
  const bool full = nt > (n - 1) * nr;
  for (int k = 0; k < n; ++k) {
    CMatrix c;
    if (full) {
      c.resize((n - 1) * nr, nt);
      int row = 0;
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        c.middleRows(row, nr) = h.at(j, k);
        row += nr;
      }
    } else {
      c.resize(n - 1, nt);
      int row = 0;
      for (int j = 0; j < n; ++j) {
        if (j == k) continue;
        c.row(row++) = dominant_right(h.at(j, k), 1).col(0).adjoint();
      }
    }
    const CMatrix basis = null_basis(c, nt);
    if (basis.cols() == 0) throw NumericalError("zfp: empty null space");
    const int m = std::min<int>(cfg.streams(), static_cast<int>(basis.cols()));
    const CMatrix v = dominant_right(h.at(k, k) * basis, m);
    out.f[k].leftCols(m) = basis * v * std::sqrt(power_per_pair / m);
  }
  return out;
}

SlotDecision cop_precoder(const ChannelState& h, const SystemConfig& cfg, double alpha, const WmmseOptions& opts) {
  if (!(alpha > 0.0)) throw DomainError("cop: alpha > 0 required");
  std::vector<double> w(cfg.pairs, alpha);
  return wmmse_solve_weights(h, cfg, w, opts);
}

SlotDecision qwp_precoder(const ChannelState& h, const SystemConfig& cfg, std::span<const double> q, double alpha,
                          const WmmseOptions& opts) {
  if (!(alpha > 0.0)) throw DomainError("qwp: alpha > 0 required");
  if (static_cast<int>(q.size()) != cfg.pairs) throw DomainError("qwp: queue vector size mismatch");
  std::vector<double> w(cfg.pairs);
  for (int k = 0; k < cfg.pairs; ++k) w[k] = alpha * std::max(0.0, cfg.q_high - q[k]);
  return wmmse_solve_weights(h, cfg, w, opts);
}

}  // namespace mimostream
