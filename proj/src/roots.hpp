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

#include <cmath>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace mimostream::detail {

// Newton iteration safeguarded by a sign-change bracket [a, b]. Falls back to
// bisection whenever the Newton step leaves the bracket. Stops once
// |f| <= ftol or the bracket collapses to floating-point resolution.
template <class F, class DF>
double bracketed_newton(F&& f, DF&& df, double a, double b, double ftol, const char* what, int max_iter = 400) {
  double fa = f(a);
  double fb = f(b);
  if (std::fabs(fa) <= ftol) return a;
  if (std::fabs(fb) <= ftol) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os << what << ": root not bracketed on [" << a << ", " << b << "] (f = " << fa << ", " << fb << ")";
    throw NumericalError(os.str());
  }
  double x = 0.5 * (a + b);
  double best = std::fabs(fa) < std::fabs(fb) ? a : b;
  double best_f = std::min(std::fabs(fa), std::fabs(fb));
  for (int it = 0; it < max_iter; ++it) {
    const double fx = f(x);
    if (std::fabs(fx) < best_f) {
      best = x;
      best_f = std::fabs(fx);
    }
    if (std::fabs(fx) <= ftol) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    if (hi - lo <= 4e-16 * std::max(std::fabs(lo), std::fabs(hi))) return best;
    const double d = df(x);
    double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  std::ostringstream os;
  os << what << ": no convergence after " << max_iter << " iterations (|f| = " << best_f << ")";
  throw NumericalError(os.str());
}

}  // namespace mimostream::detail
