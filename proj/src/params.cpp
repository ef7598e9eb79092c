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

#include "qdspi/params.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <string>

namespace qdspi {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}

void default_warning(const std::string& msg) {
  static std::set<std::string> seen;
  if (seen.insert(msg).second) std::cerr << "warning: " << msg << "\n";
}

std::function<void(const std::string&)>& warning_handler() {
  static std::function<void(const std::string&)> h = default_warning;
  return h;
}

}  // namespace

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(warning_mutex());
  warning_handler()(message);
}

void set_warning_handler(std::function<void(const std::string&)> handler) {
  std::lock_guard<std::mutex> lock(warning_mutex());
  // An empty handler restores the default.
  warning_handler() = handler ? std::move(handler) : default_warning;
}

PhysicalConfig PhysicalConfig::with_lande_ratio(double omega_e, double k, double w) {
  PhysicalConfig c;
  c.omega_e = omega_e;
  c.k_ratio = k;
  c.omega_g_bar = k * omega_e;
  c.w = w;
  c.validate();
  return c;
}

PhysicalConfig PhysicalConfig::for_cz(double omega, double w, double big_gamma) {
  PhysicalConfig c;
  c.omega_e = omega;
  c.omega_g_bar = omega;
  c.w = w;
  c.big_gamma = big_gamma;
  c.validate();
  return c;
}

void PhysicalConfig::validate() const {
  require(gamma > 0 && std::isfinite(gamma), "gamma must be positive");
  require(gamma == kGamma, "gamma is the unit of rates and must equal 1");
  require(omega_e >= 0 && std::isfinite(omega_e), "omega_e must be nonnegative");
  require(omega_g_bar >= 0 && std::isfinite(omega_g_bar), "omega_g_bar must be nonnegative");
  require(w >= 0 && std::isfinite(w), "w must be nonnegative");
  require(big_gamma >= 0 && std::isfinite(big_gamma), "big_gamma must be nonnegative");
  if (k_ratio) {
    require(*k_ratio > 0 && std::isfinite(*k_ratio), "k_ratio must be positive");
    double expect = *k_ratio * omega_e;
    require(std::abs(omega_g_bar - expect) <= 1e-12 * std::max(1.0, std::abs(expect)),
            "omega_g_bar must equal k_ratio * omega_e");
  }
}

double MagneticSample::theta() const { return std::acos(std::clamp(n[2], -1.0, 1.0)); }

double MagneticSample::phi() const { return std::atan2(n[1], n[0]); }

MagneticSample MagneticSample::from_angles(double omega_g, double omega_e, double theta, double phi) {
  MagneticSample s;
  s.omega_g = omega_g;
  s.omega_e = omega_e;
  s.n = {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
  s.validate();
  return s;
}

void MagneticSample::validate() const {
  require(omega_g >= 0 && std::isfinite(omega_g), "omega_g must be nonnegative");
  require(omega_e >= 0 && std::isfinite(omega_e), "omega_e must be nonnegative");
  double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  require(std::abs(norm - 1.0) <= 1e-12, "precession axis must be a unit vector");
}

BlochQubit BlochQubit::from_angles(double theta, double phi) {
  return {std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)};
}

void BlochQubit::validate() const {
  require(std::abs(std::norm(alpha) + std::norm(beta) - 1.0) <= 1e-12, "qubit must be normalized");
}

void OverhauserDistribution::validate() const {
  require(w >= 0 && std::isfinite(w), "Overhauser width must be nonnegative");
  for (double e : external) require(std::isfinite(e), "external field must be finite");
}

double uniform_draw(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) {
  std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ index) ^ (lane * 0xd1b54a32d192ed03ULL));
  // 53 random bits mapped to the open interval (0, 1).
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

Vec3 gaussian_draw(std::uint64_t seed, std::uint64_t index) {
  auto box_muller = [&](std::uint64_t lane, double* z0, double* z1) {
    double u1 = uniform_draw(seed, index, lane);
    double u2 = uniform_draw(seed, index, lane + 1);
    double r = std::sqrt(-2.0 * std::log(u1));
    *z0 = r * std::cos(2 * std::numbers::pi * u2);
    *z1 = r * std::sin(2 * std::numbers::pi * u2);
  };
  double a, b, c, d;
  box_muller(0, &a, &b);
  box_muller(2, &c, &d);
  return {a, b, c};
}

MagneticSample sample_from_field(const Vec3& field, double omega_e) {
  MagneticSample s;
  s.omega_e = omega_e;
  double norm = std::hypot(field[0], field[1], field[2]);
  s.omega_g = norm;
  if (norm == 0.0) {
    s.n = {1.0, 0.0, 0.0};
    s.degenerate = true;
  } else {
    s.n = {field[0] / norm, field[1] / norm, field[2] / norm};
    // Renormalize once more so the unit-norm invariant holds to rounding.
    double r = std::hypot(s.n[0], s.n[1], s.n[2]);
    for (double& x : s.n) x /= r;
  }
  return s;
}

MagneticSample sample_magnetic(const OverhauserDistribution& dist, double omega_e, const Vec3& draw) {
  dist.validate();
  Vec3 field;
  for (int i = 0; i < 3; ++i) field[i] = dist.external[i] + dist.w * draw[i];
  return sample_from_field(field, omega_e);
}

MagneticSample sample_magnetic(const OverhauserDistribution& dist, double omega_e, std::uint64_t seed,
                               std::uint64_t index) {
  return sample_magnetic(dist, omega_e, gaussian_draw(seed, index));
}

}  // namespace qdspi
