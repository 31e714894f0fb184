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

#include "specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace mimostream::specfun {

double factorial(int n) {
  if (n < 0) throw DomainError("factorial: negative argument " + std::to_string(n));
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double upper_incomplete_gamma(int m, double x) {
  if (m < 1) throw DomainError("upper_incomplete_gamma: order must be >= 1, got " + std::to_string(m));
  if (!(x > 0.0)) return 0.0;
  // (m-1)! e^-x sum_{k<m} x^k / k!
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < m; ++k) {
    term *= x / k;
    sum += term;
  }
  return factorial(m - 1) * std::exp(-x) * sum;
}

double exp_integral_e1(double x) {
  if (!(x > 0.0)) throw DomainError("exp_integral_e1: argument must be positive");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (x <= 1.0) {
    // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double sum = 0.0;
    double fact = 1.0;
    for (int k = 1; k < 200; ++k) {
      fact *= -x / k;
      const double del = -fact / k;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * eps) break;
    }
    return -kEulerGamma - std::log(x) + sum;
  }
  // Modified Lentz evaluation of the continued fraction.
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h * std::exp(-x);
  }
  throw NumericalError("exp_integral_e1: continued fraction did not converge");
}

double incomplete_gamma_ext(int m, double x) {
  if (!(x > 0.0)) return 0.0;
  if (m == 0) return exp_integral_e1(x);
  return upper_incomplete_gamma(m, x);
}

double digamma_int(int n) {
  if (n < 1) throw DomainError("digamma_int: argument must be >= 1, got " + std::to_string(n));
  double h = 0.0;
  for (int i = n - 1; i >= 1; --i) h += 1.0 / i;
  return h - kEulerGamma;
}

double meijer_special(int n, double z) {
  if (n < 1) throw DomainError("meijer_special: order must be >= 1, got " + std::to_string(n));
  if (!(z > 0.0)) return 0.0;
  // sum_{m=1}^{n-1} G(m,z)/m! = e^-z sum_m (1/m) sum_{k<m} z^k/k!
  const double ez = std::exp(-z);
  double partial = 0.0;  // sum_{k<m} z^k/k!
  double term = 1.0;
  double acc = 0.0;
  for (int m = 1; m < n; ++m) {
    partial += term;
    term *= z / m;
    acc += partial / m;
  }
  return factorial(n - 1) * (exp_integral_e1(z) + ez * acc);
}

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// A_{n,l}: 1 when l = n, prod_{r=0}^{n-l-1} (n - r + s) otherwise.
double laguerre_a(int n, int l, int s) {
  double p = 1.0;
  for (int r = 0; r < n - l; ++r) p *= n - r + s;
  return p;
}

}  // namespace

SvCoeffs sv_coeffs(int nt, int nr) {
  if (nt < 1 || nr < 1) throw DomainError("sv_coeffs: antenna counts must be positive");
  SvCoeffs c;
  c.d = std::min(nt, nr);
  c.b = std::max(nt, nr);
  c.s = c.b - c.d;
  c.bn.resize(c.d);
  c.a.assign(static_cast<std::size_t>(c.d) * c.d * c.d, 0.0);
  for (int n = 0; n < c.d; ++n) {
    c.bn[n] = 1.0 / (factorial(n) * factorial(n + c.s));
    for (int l = 0; l <= n; ++l) {
      const double al = laguerre_a(n, l, c.s) * binomial(n, l);
      for (int j = l; j <= n; ++j) {
        const double aj = laguerre_a(n, j, c.s) * binomial(n, j);
        const double sign = ((l + j) % 2 == 0) ? 1.0 : -1.0;
        c.a[(static_cast<std::size_t>(n) * c.d + l) * c.d + j] = (l == j) ? al * al : sign * al * aj;
      }
    }
  }
  return c;
}

std::vector<double> SvCoeffs::kernel_weights() const {
  std::vector<double> w(static_cast<std::size_t>(2 * d + s + 1), 0.0);
  for (int n = 0; n < d; ++n) {
    for (int l = 0; l <= n; ++l) {
      w[1 + 2 * l + s] += bn[n] * coeff(n, l, l);
      for (int j = l + 1; j <= n; ++j) w[1 + l + j + s] += 2.0 * bn[n] * coeff(n, l, j);
    }
  }
  return w;
}

double sv_density(const SvCoeffs& coeffs, double x) {
  if (x < 0.0) throw DomainError("sv_density: negative argument");
  double poly = 0.0;
  for (int n = 0; n < coeffs.d; ++n) {
    double inner = 0.0;
    for (int l = 0; l <= n; ++l) {
      inner += coeffs.coeff(n, l, l) * std::pow(x, 2 * l);
      for (int j = l + 1; j <= n; ++j) inner += 2.0 * coeffs.coeff(n, l, j) * std::pow(x, l + j);
    }
    poly += coeffs.bn[n] * inner;
  }
  return std::pow(x, coeffs.s) * std::exp(-x) * poly / coeffs.d;
}

}  // namespace mimostream::specfun
