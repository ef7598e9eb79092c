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

#ifndef QDSPI_QUADRATURE_HPP_
#define QDSPI_QUADRATURE_HPP_

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdspi/params.hpp"

namespace qdspi {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved_tolerance)
      : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved_tolerance) + ")"),
        achieved_tolerance_(achieved_tolerance) {}
  double achieved_tolerance() const { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

struct QuadratureResult {
  cplx value;
  double error = 0.0;
  int evaluations = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod integration of a complex integrand on [a, b].
/// The interval is first split at every breakpoint inside (a, b).  Throws QuadratureError
/// if the error estimate stays above max(abs_tol, rel_tol * |I|).
QuadratureResult integrate(const std::function<cplx(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {}, const std::vector<double>& breakpoints = {});

/// Real-valued convenience wrapper.
double integrate_real(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& opts = {},
                      const std::vector<double>& breakpoints = {});

/// Breakpoints splitting [0, t] at multiples of a characteristic decay time and at
/// half-periods of an oscillation frequency, whichever are denser (capped at max_points).
std::vector<double> time_breakpoints(double t, double decay_rate, double max_frequency, int max_points = 400);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes and weights for the standard normal density, weights summing to 1.
GaussRule gauss_hermite_normal(int n);

/// Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

/// Pairwise (cascade) summation; the result depends only on the input order.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace qdspi

#endif  // QDSPI_QUADRATURE_HPP_
