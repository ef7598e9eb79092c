// Copyright 2026 The qdspi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qdspi/expsum.hpp"

#include <algorithm>
#include <cmath>

namespace qdspi {

namespace {

constexpr double kSeriesRadius = 0.5;

// Sum_{p,q} x^p y^q / (p! q! (q + 1) (p + q + 2)), the nested integral on the unit triangle.
cplx nested_series(cplx x, cplx y) {
  cplx total = 0.0;
  cplx xp = 1.0;
  for (int p = 0; p < 30; ++p) {
    cplx yq = 1.0;
    cplx row = 0.0;
    for (int q = 0; q < 30; ++q) {
      row += yq / (static_cast<double>(q + 1) * (p + q + 2));
      yq *= y / static_cast<double>(q + 1);
    }
    total += xp * row;
    xp *= x / static_cast<double>(p + 1);
  }
  return total;
}

}  // namespace

cplx phi1(cplx z) {
  if (std::abs(z) < kSeriesRadius) {
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 2; k < 40; ++k) {
      term *= z / static_cast<double>(k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

cplx exp_integral(cplx z, double T) { return T * phi1(z * T); }

cplx shifted_exp_integral(cplx eps, cplx c, double T) {
  if (std::abs(c * T) < kSeriesRadius) return std::exp(eps * T) * T * phi1(c * T);
  return (std::exp((eps + c) * T) - std::exp(eps * T)) / c;
}

cplx nested_exp_integral(cplx a, cplx c, double T) {
  double ax = std::abs(a * T);
  double cx = std::abs(c * T);
  if (ax >= kSeriesRadius && ax >= cx) return (shifted_exp_integral(a, c, T) - exp_integral(a + c, T)) / a;
  if (cx >= kSeriesRadius) return (exp_integral(a + c, T) - exp_integral(a, T)) / c;
  return T * T * nested_series(a * T, c * T);
}

}  // namespace qdspi
