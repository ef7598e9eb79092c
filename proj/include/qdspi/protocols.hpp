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

#ifndef QDSPI_PROTOCOLS_HPP_
#define QDSPI_PROTOCOLS_HPP_

#include <array>
#include <vector>

#include "qdspi/amplitudes.hpp"
#include "qdspi/averaging.hpp"
#include "qdspi/params.hpp"

namespace qdspi {

// Photon-number superposition source.

double pns_fidelity(const BlochQubit& qubit, double omega_o);
double pns_fidelity_bloch(double omega_o);
/// Bloch-averaged fidelity averaged over the Overhauser magnitude distribution of width w.
double pns_fidelity_averaged(double w_over_gamma);

/// e^{z^2} erfc(z) without overflow for large z.
double erfcx(double z);

// Controlled-Z gate.

struct CzCoefficients {
  cplx a, b, c, d;
};

/// Gate duration set by the nominal ground precession.
double cz_gate_time(double omega_g_bar);

/// Coefficients from the four input/output overlaps, ordered (uu, ud, du, dd) with the
/// initial spin first.
CzCoefficients cz_coefficients_from_overlaps(const Vec3& n, const std::array<cplx, 4>& lambda);
CzCoefficients cz_coefficients(const MagneticSample& sample, const Wavepacket& input, double T_g,
                               Method method = Method::Automatic);

double cz_fidelity(const BlochQubit& c1, const BlochQubit& c2, const CzCoefficients& k);
double cz_fidelity_bloch(const CzCoefficients& k);
/// Requires omega_e == omega_g_bar > 0.  The external field is along x.
AverageResult cz_fidelity_averaged(const PhysicalConfig& config, const AverageMode& mode = GaussHermiteMode{},
                                   unsigned workers = 0);

// Lindner-Rudolph cluster-state source.

class LrOverlapSet {
 public:
  cplx& operator()(Polarization pol, Spin zeta, Spin mu) { return v_[slot(pol, zeta, mu)]; }
  cplx operator()(Polarization pol, Spin zeta, Spin mu) const { return v_[slot(pol, zeta, mu)]; }

  /// R and L swapped together with up and down.
  LrOverlapSet mirrored() const;

 private:
  static int slot(Polarization p, Spin z, Spin m) {
    return static_cast<int>(p) * 4 + static_cast<int>(z) * 2 + static_cast<int>(m);
  }
  std::array<cplx, 8> v_{};
};

/// Time between excitation pulses set by the nominal ground precession.
double lr_step_time(double omega_g_bar);

LrOverlapSet lr_overlaps(const MagneticSample& sample, double T1, Method method = Method::Automatic);

double lr_error_probability(double omega_e_over_gamma);
double lr_fidelity_1(const LrOverlapSet& o);
double lr_fidelity_2(const LrOverlapSet& o);
/// Fidelity after n_steps photons from the transfer-matrix contraction of the overlaps.
double lr_fidelity_n(const LrOverlapSet& o, int n_steps);
/// As lr_fidelity_n with a separate overlap set for each emitted photon.
double lr_fidelity_sequence(const std::vector<LrOverlapSet>& steps);
double lr_fidelity_ideal_n(int n_steps, double k, double omega_e_over_gamma);

/// Requires a Lande ratio consistent with omega_g_bar / omega_e.  The external field is along x.
AverageResult lr_fidelity_averaged(const PhysicalConfig& config, int n_steps,
                                   const AverageMode& mode = GaussHermiteMode{}, unsigned workers = 0);

}  // namespace qdspi

#endif  // QDSPI_PROTOCOLS_HPP_
