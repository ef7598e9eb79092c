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

#include "qdspi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qdspi {

namespace {

struct Segment {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk21(const std::function<cplx(double)>& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  static const auto& xk = Kronrod::abscissa();
  static const auto& wk = Kronrod::weights();
  static const auto& wg = Gauss::weights();
  double c = 0.5 * (a + b);
  double h = 0.5 * (b - a);
  cplx f0 = f(c);
  cplx kron = wk[0] * f0;
  cplx gauss = 0.0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    cplx s = f(c - h * xk[i]) + f(c + h * xk[i]);
    kron += wk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  kron *= h;
  gauss *= h;
  double err = std::abs(kron - gauss);
  if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
  return {a, b, kron, err};
}

}  // namespace

QuadratureResult integrate(const std::function<cplx(double)>& f, double a, double b, const QuadratureOptions& opts,
                           const std::vector<double>& breakpoints) {
  if (!(b >= a)) throw std::invalid_argument("integration bounds must satisfy a <= b");
  QuadratureResult result;
  if (b == a) return result;

  std::vector<double> edges = {a};
  for (double p : breakpoints)
    if (p > a && p < b) edges.push_back(p);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<Segment> heap;
  cplx total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Segment s = gk21(f, edges[i], edges[i + 1]);
    result.evaluations += 21;
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }

  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (total_err > target()) {
    if (static_cast<int>(heap.size()) >= opts.max_intervals) break;
    Segment worst = heap.top();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    Segment left = gk21(f, worst.a, mid);
    Segment right = gk21(f, mid, worst.b);
    result.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the leaves to remove drift from the running updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  result.value = total;
  result.error = total_err;
  if (!(total_err <= target())) throw QuadratureError("adaptive quadrature did not converge", total_err);
  return result;
}

double integrate_real(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& opts,
                      const std::vector<double>& breakpoints) {
  return integrate([&](double x) { return cplx(f(x), 0.0); }, a, b, opts, breakpoints).value.real();
}

std::vector<double> time_breakpoints(double t, double decay_rate, double max_frequency, int max_points) {
  std::vector<double> pts;
  if (!(t > 0)) return pts;
  double step = t;
  if (decay_rate > 0) step = std::min(step, 1.0 / decay_rate);
  if (max_frequency > 0) step = std::min(step, std::numbers::pi / max_frequency);
  int n = static_cast<int>(std::ceil(t / step));
  n = std::min(n, max_points);
  for (int i = 1; i < n; ++i) pts.push_back(t * i / n);
  return pts;
}

GaussRule gauss_hermite_normal(int n) {
  if (n < 1) throw std::invalid_argument("rule size must be positive");
  // Golub-Welsch for the probabilists' Hermite recurrence.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    rule.weights[i] = v * v;
  }
  // Exact symmetry about zero.
  for (int i = 0; i < n / 2; ++i) {
    double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    double wt = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = wt;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  double s = pairwise_sum(rule.weights);
  for (double& x : rule.weights) x /= s;
  return rule;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("rule size must be positive");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule rule;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    double v = es.eigenvectors()(0, i);
    rule.weights.push_back(2.0 * v * v);
  }
  return rule;
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace qdspi
