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

#ifndef QDSPI_ORACLE_HPP_
#define QDSPI_ORACLE_HPP_

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qdspi/amplitudes.hpp"
#include "qdspi/params.hpp"
#include "qdspi/protocols.hpp"

namespace qdspi {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Photon {
  std::uint32_t bin = 0;
  Polarization pol = Polarization::R;
  auto operator<=>(const Photon&) const = default;
};

/// Sorted list of occupied (bin, polarization) modes.
using PhotonKey = std::vector<Photon>;

/// Spin-photon state on a time-bin lattice, truncated to at most n_max photons.  Each key
/// maps to the emitter amplitudes in the basis (up g, down g, up e, down e).
class LatticeState {
 public:
  LatticeState(double delta_t, std::size_t n_bins, int n_max = 2, std::size_t start_step = 0);

  double delta_t() const { return delta_t_; }
  std::size_t n_bins() const { return n_bins_; }
  int n_max() const { return n_max_; }
  /// Index of the next bin to interact with the emitter.
  std::size_t step() const { return step_; }
  /// Squared norm discarded because it left the truncated photon-number space.
  double leakage() const { return leakage_; }

  void set(PhotonKey key, const Eigen::Vector4cd& amp);
  Eigen::Vector4cd get(PhotonKey key) const;
  const std::map<PhotonKey, Eigen::Vector4cd>& entries() const { return entries_; }
  double norm_squared() const;

  /// Text dump: a header with delta_t, n_bins, n_max, step, then one row per nonzero
  /// amplitude as "bin:pol,... emitter re im" ("-" for the vacuum).
  void write_text(std::ostream& os) const;

 private:
  friend LatticeState evolve(const LatticeState&, const MagneticSample&, std::size_t);
  friend void apply_excitation_pulse(LatticeState&);

  double delta_t_;
  std::size_t n_bins_;
  int n_max_;
  std::size_t step_;
  double leakage_ = 0.0;
  std::map<PhotonKey, Eigen::Vector4cd> entries_;
};

/// Applies n_steps collisions.  Throws OracleError if the norm (including leakage) drifts
/// by more than 1e-8 * n_steps.
LatticeState evolve(const LatticeState& initial, const MagneticSample& sample, std::size_t n_steps);

/// Instantaneous ground-to-excited swap.  Throws OracleError if any excited amplitude is present.
void apply_excitation_pulse(LatticeState& state);

/// One-photon sector resolved by (polarization, bin, final spin).
struct OnePhotonField {
  double delta_t = 0.0;
  std::size_t first_bin = 0;
  std::size_t n_bins = 0;
  std::vector<cplx> data;
  /// Emitter amplitudes with no photon present.
  Eigen::Vector4cd no_photon = Eigen::Vector4cd::Zero();
  double leakage = 0.0;

  cplx at(Polarization pol, std::size_t bin, Spin mu) const;
  double bin_center(std::size_t bin) const { return (static_cast<double>(bin) + 0.5) * delta_t; }
  double norm_squared() const;
};

OnePhotonField one_photon_field(const LatticeState& state, std::size_t first_bin, std::size_t n_bins);

/// Spontaneous emission from |zeta, e> over round(t_final / delta_t) bins.
OnePhotonField simulate_emission(const MagneticSample& sample, double t_final, double delta_t,
                                 Spin zeta = Spin::Up);

/// Scattering of an R-polarized photon, discretized as sqrt(dt) xi(bin center) and renormalized,
/// off the ground spin zeta.
OnePhotonField simulate_scattering(const MagneticSample& sample, const Wavepacket& input, double t_final,
                                   double delta_t, Spin zeta = Spin::Up);

/// Cluster-state source on the lattice: the spin starts in (|up> + i|down>)/sqrt(2), each
/// segment of round(T1 / dt) bins starts with an excitation pulse, and the still-excited
/// remainder at the end of a segment is discarded.
struct LrLatticeResult {
  int n_steps = 0;
  std::size_t bins_per_segment = 0;
  double delta_t = 0.0;
  /// Segment duration on the lattice.
  double t1 = 0.0;
  /// Per segment and starting spin, the emitted one-photon field.
  std::vector<std::array<OnePhotonField, 2>> segments;
  /// Per segment, overlaps of the emitted photon with the ideal lattice mode.
  std::vector<LrOverlapSet> overlaps;
  double fidelity = 0.0;
  double undelivered_weight = 0.0;
  double leakage = 0.0;

  /// Amplitude of the photons (pol1, bin1) [, (pol2, bin2)] with final spin nu; bins are
  /// relative to their segment.
  cplx amplitude(Polarization p1, std::size_t m1, Spin nu) const;
  cplx amplitude(Polarization p1, std::size_t m1, Polarization p2, std::size_t m2, Spin nu) const;
};

LrLatticeResult simulate_lr(const MagneticSample& sample, int n_steps, double T1, double delta_t);

struct ConvergenceReport {
  std::vector<double> delta_t;
  std::vector<double> discrepancy;
  /// Least-squares slope of log(discrepancy) against log(delta_t); NaN when undefined.
  double order = 0.0;
  bool monotone = true;
  bool defined = true;
};

/// Requires at least three step sizes in geometric progression.
ConvergenceReport convergence_study(const std::function<double(double)>& runner, const std::vector<double>& delta_ts);

enum class OracleScenario { Vacuum, Emission, Scattering, Lr1, Lr2 };

struct OracleSetup {
  MagneticSample sample;
  Spin zeta = Spin::Up;
  double t_emission = 8.0;
  double t_scattering = 16.0;
  double big_gamma = 1.0;
  double t1 = 4.0;
};

/// Maximum bin-wise difference between lattice amplitudes (divided by sqrt(dt) per photon)
/// and the analytic coefficients evaluated at bin centers.
double oracle_discrepancy(OracleScenario scenario, const OracleSetup& setup, double delta_t);

OracleScenario parse_oracle_scenario(const std::string& name);
std::string to_string(OracleScenario scenario);

}  // namespace qdspi

#endif  // QDSPI_ORACLE_HPP_
