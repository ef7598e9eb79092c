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

#ifndef QDSPI_PARAMS_HPP_
#define QDSPI_PARAMS_HPP_

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace qdspi {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

// All rates are in units of the spontaneous-emission rate, which is fixed to 1.
inline constexpr double kGamma = 1.0;

enum class Spin { Up = 0, Down = 1 };
enum class Polarization { R = 0, L = 1 };

inline constexpr std::array<Spin, 2> kSpins = {Spin::Up, Spin::Down};
inline constexpr std::array<Polarization, 2> kPolarizations = {Polarization::R, Polarization::L};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PhysicalConfig {
  double gamma = kGamma;
  double omega_e = 0.0;
  double omega_g_bar = 0.0;
  std::optional<double> k_ratio;
  double w = 0.0;
  double big_gamma = 1.0;

  /// Builds a config with omega_g_bar = k * omega_e.
  static PhysicalConfig with_lande_ratio(double omega_e, double k, double w);
  /// Builds a CZ config with omega_e = omega_g_bar.
  static PhysicalConfig for_cz(double omega, double w, double big_gamma);

  /// Throws ConfigError if any invariant is violated.
  void validate() const;
};

struct MagneticSample {
  double omega_g = 0.0;
  double omega_e = 0.0;
  Vec3 n = {1.0, 0.0, 0.0};
  bool degenerate = false;

  double theta() const;
  double phi() const;

  static MagneticSample from_angles(double omega_g, double omega_e, double theta, double phi);
  void validate() const;
};

struct BlochQubit {
  cplx alpha = 1.0;
  cplx beta = 0.0;

  /// alpha = cos(theta/2), beta = e^{i phi} sin(theta/2).
  static BlochQubit from_angles(double theta, double phi);
  void validate() const;
};

struct OverhauserDistribution {
  double w = 0.0;
  Vec3 external = {0.0, 0.0, 0.0};

  void validate() const;
};

/// Non-fatal diagnostics.  The default handler prints each distinct message once to stderr;
/// passing an empty handler restores it.
void warn(const std::string& message);
void set_warning_handler(std::function<void(const std::string&)> handler);

/// Standard normal triplet, a pure function of (seed, index).
Vec3 gaussian_draw(std::uint64_t seed, std::uint64_t index);

/// Uniform variate in (0, 1), a pure function of (seed, index, lane).
double uniform_draw(std::uint64_t seed, std::uint64_t index, std::uint64_t lane);

/// Sample from a field draw of unit-normal components (scaled by dist.w).
MagneticSample sample_magnetic(const OverhauserDistribution& dist, double omega_e, const Vec3& draw);

/// Sample number `index` of the stream identified by `seed`.
MagneticSample sample_magnetic(const OverhauserDistribution& dist, double omega_e, std::uint64_t seed,
                               std::uint64_t index = 0);

/// Sample for a total ground precession vector (external + Overhauser).
MagneticSample sample_from_field(const Vec3& field, double omega_e);

}  // namespace qdspi

#endif  // QDSPI_PARAMS_HPP_
