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

#ifndef QDSPI_AMPLITUDES_HPP_
#define QDSPI_AMPLITUDES_HPP_

#include <array>
#include <limits>
#include <vector>

#include "qdspi/params.hpp"

namespace qdspi {

/// zeta is the initial spin, mu the final spin.
struct SpinLabelPair {
  Spin zeta = Spin::Up;
  Spin mu = Spin::Up;
};

inline constexpr std::array<SpinLabelPair, 4> kSpinLabelPairs = {
    SpinLabelPair{Spin::Up, Spin::Up}, SpinLabelPair{Spin::Up, Spin::Down}, SpinLabelPair{Spin::Down, Spin::Up},
    SpinLabelPair{Spin::Down, Spin::Down}};

/// Normalized single-photon temporal mode.
class Wavepacket {
 public:
  enum class Kind { Exponential, TruncatedExponential, Sampled };

  /// sqrt(G) e^{-G t / 2} on [0, inf).
  static Wavepacket exponential(double big_gamma);
  /// Exponential of the given rate restricted to [0, t_end] and renormalized.
  static Wavepacket truncated_exponential(double rate, double t_end);
  /// Linear interpolation of complex samples on a strictly increasing grid, zero outside.
  /// Throws std::invalid_argument unless the norm is 1 within 1e-10.
  static Wavepacket sampled(std::vector<double> t, std::vector<cplx> values);
  /// As sampled(), rescaling the values to unit norm first.
  static Wavepacket sampled_normalized(std::vector<double> t, std::vector<cplx> values);

  Kind kind() const { return kind_; }
  double rate() const { return rate_; }
  double support_begin() const;
  double support_end() const;

  cplx operator()(double t) const;

  /// Integral of |xi|^2 over the support (exact for the sampled kind).
  double norm_squared() const;
  /// Points where the packet is not smooth (sample nodes for the sampled kind).
  const std::vector<double>& kinks() const { return grid_; }

 private:
  Kind kind_ = Kind::Exponential;
  double rate_ = 1.0;
  double t_end_ = std::numeric_limits<double>::infinity();
  double scale_ = 1.0;
  std::vector<double> grid_;
  std::vector<cplx> values_;
};

enum class Method { Automatic, ClosedForm, Quadrature };

/// Long-time evaluation point used wherever an "infinite" time is needed.
inline constexpr double kTInfinity = 40.0;

/// Emission amplitude of a photon with polarization pol at time t_prime, observed at t.
cplx f_coefficient(Polarization pol, SpinLabelPair labels, double t, double t_prime, const MagneticSample& sample);

/// Amplitude of remaining in the excited manifold at time t.
cplx f0_coefficient(SpinLabelPair labels, double t, const MagneticSample& sample);

/// Scattering amplitude of an input photon, R-polarized, into mode (pol, t_prime) at time t.
cplx lambda_coefficient(Polarization pol, SpinLabelPair labels, double t, double t_prime,
                        const MagneticSample& sample, const Wavepacket& input, Method method = Method::Automatic);

/// Overlap of the emitted mode with the ideal exponential photon normalized on [0, T1].
cplx o_overlap(Polarization pol, SpinLabelPair labels, double T1, const MagneticSample& sample,
               Method method = Method::Automatic);

/// Overlap of the R-polarized scattered photon with the input mode on [0, T_g].
cplx lambda_overlap(SpinLabelPair labels, double T_g, const MagneticSample& sample, const Wavepacket& input,
                    Method method = Method::Automatic);

/// True when e^{-G T_g / 2} and e^{-gamma T_g / 2} are both below 1e-6.
bool scattering_window_ok(double T_g, const Wavepacket& input);

}  // namespace qdspi

#endif  // QDSPI_AMPLITUDES_HPP_
