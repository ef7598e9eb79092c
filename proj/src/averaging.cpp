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

#include "qdspi/averaging.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qdspi/quadrature.hpp"

namespace qdspi {

namespace {

std::vector<double> parallel_map(std::size_t n, unsigned workers, const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

double checked(const SampleFunction& fn, const MagneticSample& s, const Vec3& field) {
  double v = fn(s);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "non-finite integrand at field (" << field[0] << ", " << field[1] << ", " << field[2] << ")";
    throw NonFiniteSampleError(msg.str());
  }
  return v;
}

double tensor_mean(const SampleFunction& fn, const OverhauserDistribution& dist, double omega_e, int n,
                   unsigned workers) {
  GaussRule rule = gauss_hermite_normal(n);
  std::size_t total = static_cast<std::size_t>(n) * n * n;
  std::vector<double> vals = parallel_map(total, workers, [&](std::size_t k) {
    std::size_t i = k / (n * n), j = (k / n) % n, l = k % n;
    Vec3 draw = {rule.nodes[i], rule.nodes[j], rule.nodes[l]};
    MagneticSample s = sample_magnetic(dist, omega_e, draw);
    Vec3 field = {dist.external[0] + dist.w * draw[0], dist.external[1] + dist.w * draw[1],
                  dist.external[2] + dist.w * draw[2]};
    return rule.weights[i] * rule.weights[j] * rule.weights[l] * checked(fn, s, field);
  });
  return pairwise_sum(vals);
}

}  // namespace

void AverageSpec::validate() const {
  distribution.validate();
  if (auto* gh = std::get_if<GaussHermiteMode>(&mode)) {
    if (gh->nodes_per_axis < 5 || gh->nodes_per_axis > 51 || gh->nodes_per_axis % 2 == 0)
      throw ConfigError("Gauss-Hermite nodes per axis must be odd and in [5, 51]");
  } else {
    if (std::get<MonteCarloMode>(mode).n_samples < 100) throw ConfigError("Monte Carlo needs at least 100 samples");
  }
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      std::size_t lo = n * w / workers;
      std::size_t hi = n * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

unsigned default_workers() {
  const char* env = std::getenv("QDSPI_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || v < 1) return 1;
  return static_cast<unsigned>(std::min(v, 256L));
}

AverageResult gaussian_average(const SampleFunction& fn, const AverageSpec& spec, double omega_e, unsigned workers) {
  spec.validate();
  if (workers == 0) workers = default_workers();
  const OverhauserDistribution& dist = spec.distribution;
  if (dist.w == 0.0) {
    MagneticSample s = sample_from_field(dist.external, omega_e);
    return {checked(fn, s, dist.external), 0.0};
  }
  if (auto* gh = std::get_if<GaussHermiteMode>(&spec.mode)) {
    double fine = tensor_mean(fn, dist, omega_e, gh->nodes_per_axis, workers);
    double coarse = tensor_mean(fn, dist, omega_e, gh->nodes_per_axis - 2, workers);
    return {fine, std::abs(fine - coarse)};
  }
  const auto& mc = std::get<MonteCarloMode>(spec.mode);
  std::vector<double> vals = parallel_map(mc.n_samples, workers, [&](std::size_t i) {
    Vec3 draw = gaussian_draw(mc.seed, i);
    Vec3 field = {dist.external[0] + dist.w * draw[0], dist.external[1] + dist.w * draw[1],
                  dist.external[2] + dist.w * draw[2]};
    return checked(fn, sample_magnetic(dist, omega_e, draw), field);
  });
  double n = static_cast<double>(vals.size());
  double mean = pairwise_sum(vals) / n;
  std::vector<double> dev(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) dev[i] = (vals[i] - mean) * (vals[i] - mean);
  double var = pairwise_sum(dev) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

double merkulov_sz(double t, double w) {
  if (t < 0 || w < 0) throw std::domain_error("require t, w >= 0");
  double x = w * w * t * t;
  return (1.0 + 2.0 * std::exp(-0.5 * x) * (1.0 - x)) / 3.0;
}

double sz_single_sample(double t, const MagneticSample& sample) {
  double c = std::cos(0.5 * sample.omega_g * t);
  double s = std::sin(0.5 * sample.omega_g * t);
  return c * c + s * s * (2.0 * sample.n[2] * sample.n[2] - 1.0);
}

double merkulov_sz_spherical(double t, double w) {
  if (w == 0.0) return 1.0;
  // Polar integral in u = cos(theta); the integrand is a quadratic polynomial in u.
  GaussRule leg = gauss_legendre(8);
  auto angular = [&](double omega) {
    double acc = 0.0;
    for (std::size_t i = 0; i < leg.nodes.size(); ++i) {
      double u = leg.nodes[i];
      MagneticSample s;
      s.omega_g = omega;
      s.n = {std::sqrt(1.0 - u * u), 0.0, u};
      acc += leg.weights[i] * sz_single_sample(t, s);
    }
    return 2.0 * std::numbers::pi * acc;
  };
  double norm = std::pow(2.0 * std::numbers::pi * w * w, 1.5);
  auto radial = [&](double omega) { return omega * omega * std::exp(-0.5 * omega * omega / (w * w)) * angular(omega); };
  double upper = 14.0 * w;
  std::vector<double> pts;
  if (t > 0) {
    double half = std::numbers::pi / t;
    for (double x = half; x < upper && pts.size() < 400; x += half) pts.push_back(x);
  }
  QuadratureOptions opts{0.0, 1e-13, 8000};
  return integrate_real(radial, 0.0, upper, opts, pts) / norm;
}

}  // namespace qdspi
