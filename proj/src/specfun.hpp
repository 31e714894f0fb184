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

#include <vector>

namespace mimostream::specfun {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

double factorial(int n);

// Upper incomplete gamma for integer order m >= 1:
//   G(m, x) = int_x^inf t^(m-1) e^-t dt   for x > 0,   0 for x <= 0.
double upper_incomplete_gamma(int m, double x);

// Exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.
double exp_integral_e1(double x);

// G(m, x) extended to m = 0, where G(0, x) = E1(x). Same x <= 0 convention.
double incomplete_gamma_ext(int m, double x);

// psi(n) = -gamma_E + sum_{i<n} 1/i.
double digamma_int(int n);

// M(n, z) = int_z^inf ln(x/z) x^(n-1) e^-x dx for z > 0, 0 for z <= 0.
// Evaluated through the integration-by-parts recursion
//   M(n, z) = (n-1)! [E1(z) + sum_{m=1}^{n-1} G(m, z) / m!].
double meijer_special(int n, double z);

// Marginal density of an unordered squared singular value of an Nr x Nt
// matrix with i.i.d. CN(0,1) entries, expanded in Laguerre coefficients.
struct SvCoeffs {
  int d = 0;  // min(Nt, Nr)
  int b = 0;  // max(Nt, Nr)
  int s = 0;  // b - d
  std::vector<double> bn;  // bn[n] = 1 / (n! (n+s)!)
  std::vector<double> a;   // a[(n*d + l)*d + j], 0 <= l <= j <= n

  double coeff(int n, int l, int j) const { return a[(static_cast<std::size_t>(n) * d + l) * d + j]; }

  // The density collapsed onto gamma kernels:
  //   f(x) = (1/d) sum_m weight[m] x^(m-1) e^-x,
  // with m = 1 + l + j + s. weight is indexed by m (entries below s+1 are 0).
  std::vector<double> kernel_weights() const;
};

SvCoeffs sv_coeffs(int nt, int nr);

double sv_density(const SvCoeffs& coeffs, double x);

}  // namespace mimostream::specfun
