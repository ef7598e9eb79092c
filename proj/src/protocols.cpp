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

#include "qdspi/protocols.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace qdspi {

namespace {

const cplx kI(0.0, 1.0);

double square(double x) { return x * x; }

}  // namespace

double pns_fidelity(const BlochQubit& q, double omega_o) {
  if (omega_o < 0) throw std::domain_error("require omega_o >= 0");
  double a2 = std::norm(q.alpha);
  double b2 = std::norm(q.beta);
  return (a2 * a2 + 2.0 * a2 * b2) / (1.0 + square(0.5 * omega_o)) + b2 * b2;
}

double pns_fidelity_bloch(double omega_o) {
  if (omega_o < 0) throw std::domain_error("require omega_o >= 0");
  double x2 = omega_o * omega_o;
  return (1.0 + x2 / 12.0) / (1.0 + x2 / 4.0);
}

double erfcx(double z) {
  if (z < 5.0) return std::exp(z * z) * std::erfc(z);
  // Continued fraction z + (1/2)/(z + 1/(z + (3/2)/(z + ...))), evaluated backwards.
  double f = z;
  for (int n = 80; n >= 1; --n) f = z + 0.5 * n / f;
  return 1.0 / (std::sqrt(std::numbers::pi) * f);
}

double pns_fidelity_averaged(double x) {
  if (x < 0) throw std::domain_error("require w >= 0");
  if (x == 0.0) return 1.0;
  if (x < 0.02) {
    // Moments of the Maxwell distribution: E[Omega^{2m}] = (2m+1)!! w^{2m}.
    double q = x * x / 4.0;
    double term = 1.0;
    double sum = 0.0;
    for (int m = 1; m < 200; ++m) {
      term *= (2.0 * m + 1.0) * q;
      sum += (m % 2 == 1 ? term : -term);
      if (term < 1e-18) break;
    }
    return 1.0 - 2.0 / 3.0 * sum;
  }
  double x3 = x * x * x;
  return (8.0 * x + x3 - 8.0 * std::sqrt(2.0 * std::numbers::pi) * erfcx(std::sqrt(2.0) / x)) / (3.0 * x3);
}

double cz_gate_time(double omega_g_bar) {
  if (!(omega_g_bar > 0)) throw std::domain_error("gate time needs a positive ground precession");
  return std::numbers::pi / (2.0 * omega_g_bar);
}

CzCoefficients cz_coefficients_from_overlaps(const Vec3& n, const std::array<cplx, 4>& lambda) {
  const cplx uu = lambda[0], ud = lambda[1], du = lambda[2], dd = lambda[3];
  // sin(theta) e^{-+i phi} = n_x -+ i n_y, cos(theta) = n_z.
  const cplx sin_em = cplx(n[0], -n[1]);
  const cplx c_minus = sin_em + kI * n[2];
  const cplx c_plus = cplx(n[0], n[1]) + kI * n[2];
  const double r2 = std::sqrt(2.0);
  CzCoefficients k;
  k.a = c_minus;
  k.b = ((-uu + kI * du) * (1.0 - kI * n[2]) + (dd + kI * ud) * sin_em) / r2;
  k.c = ((c_minus - 1.0) * uu + kI * (1.0 + c_plus) * du) / r2;
  k.d = ud * du + uu * uu - kI * dd * du - kI * du * uu;
  return k;
}

CzCoefficients cz_coefficients(const MagneticSample& sample, const Wavepacket& input, double T_g, Method method) {
  std::array<cplx, 4> lambda;
  for (std::size_t i = 0; i < kSpinLabelPairs.size(); ++i)
    lambda[i] = lambda_overlap(kSpinLabelPairs[i], T_g, sample, input, method);
  return cz_coefficients_from_overlaps(sample.n, lambda);
}

double cz_fidelity(const BlochQubit& c1, const BlochQubit& c2, const CzCoefficients& k) {
  double a1 = std::norm(c1.alpha), b1 = std::norm(c1.beta);
  double a2 = std::norm(c2.alpha), b2 = std::norm(c2.beta);
  return std::norm(k.a * (a1 * a2) + k.b * (a2 * b1) + k.c * (a1 * b2) + k.d * (b1 * b2));
}

double cz_fidelity_bloch(const CzCoefficients& k) {
  auto re = [](cplx x, cplx y) { return std::real(x * std::conj(y)); };
  double r = (std::norm(k.a) + std::norm(k.b) + std::norm(k.c) + std::norm(k.d)) / 9.0;
  r += 2.0 * (re(k.a, k.b) + re(k.a, k.c) + re(k.b, k.d) + re(k.c, k.d)) / 18.0;
  r += 2.0 * (re(k.a, k.d) + re(k.b, k.c)) / 36.0;
  return r;
}

AverageResult cz_fidelity_averaged(const PhysicalConfig& config, const AverageMode& mode, unsigned workers) {
  config.validate();
  if (std::abs(config.omega_e - config.omega_g_bar) > 1e-12 * std::max(1.0, config.omega_e))
    throw ConfigError("the gate sweep requires omega_e == omega_g_bar");
  const double T_g = cz_gate_time(config.omega_g_bar);
  const Wavepacket input = Wavepacket::exponential(config.big_gamma);
  if (!scattering_window_ok(T_g, input)) warn("gate window too short for the photon and trion to decay");
  AverageSpec spec{mode, {config.w, {config.omega_g_bar, 0.0, 0.0}}};
  return gaussian_average(
      [&](const MagneticSample& s) { return cz_fidelity_bloch(cz_coefficients(s, input, T_g)); }, spec,
      config.omega_e, workers);
}

LrOverlapSet LrOverlapSet::mirrored() const {
  LrOverlapSet m;
  auto flip = [](Spin s) { return s == Spin::Up ? Spin::Down : Spin::Up; };
  for (Polarization p : kPolarizations)
    for (Spin z : kSpins)
      for (Spin u : kSpins) {
        Polarization q = p == Polarization::R ? Polarization::L : Polarization::R;
        m(p, z, u) = (*this)(q, flip(z), flip(u));
      }
  return m;
}

double lr_step_time(double omega_g_bar) { return cz_gate_time(omega_g_bar); }

LrOverlapSet lr_overlaps(const MagneticSample& sample, double T1, Method method) {
  LrOverlapSet o;
  for (Polarization p : kPolarizations)
    for (const SpinLabelPair& l : kSpinLabelPairs) o(p, l.zeta, l.mu) = o_overlap(p, l, T1, sample, method);
  return o;
}

double lr_error_probability(double x) {
  if (x < 0) throw std::domain_error("require omega_e >= 0");
  return x * x / (2.0 * (1.0 + x * x));
}

double lr_fidelity_1(const LrOverlapSet& o) {
  using P = Polarization;
  const Spin U = Spin::Up, D = Spin::Down;
  cplx s = o(P::R, U, U) + o(P::L, U, U) + kI * o(P::R, U, D) - kI * o(P::L, U, D) + kI * o(P::R, D, U) +
           kI * o(P::L, D, U) - o(P::R, D, D) + o(P::L, D, D);
  return std::norm(s / (2.0 * std::sqrt(2.0)));
}

double lr_fidelity_2(const LrOverlapSet& o) {
  using P = Polarization;
  const Spin U = Spin::Up, D = Spin::Down;
  cplx s = 0.0;
  for (Spin m : kSpins) {
    s += (o(P::R, U, m) + kI * o(P::R, D, m)) *
         (o(P::R, m, U) - o(P::L, m, U) + kI * o(P::R, m, D) + kI * o(P::L, m, D));
    s += (o(P::L, U, m) + kI * o(P::L, D, m)) *
         (o(P::R, m, U) + o(P::L, m, U) + kI * o(P::R, m, D) - kI * o(P::L, m, D));
  }
  return std::norm(s / 4.0);
}

double lr_fidelity_sequence(const std::vector<LrOverlapSet>& steps) {
  if (steps.empty()) throw std::domain_error("require at least one step");
  // Ideal single-step map a and initial spin c; the photon emitted from spin z has
  // polarization R for up and L for down.
  const cplx a[2][2] = {{1.0, -kI}, {-kI, 1.0}};
  const cplx c[2] = {1.0 / std::sqrt(2.0), kI / std::sqrt(2.0)};
  Eigen::RowVector4cd v;
  for (int z = 0; z < 2; ++z)
    for (int zp = 0; zp < 2; ++zp) v(2 * z + zp) = std::conj(c[z]) * c[zp];
  for (const LrOverlapSet& o : steps) {
    Eigen::Matrix4cd m;
    for (int z = 0; z < 2; ++z)
      for (int zp = 0; zp < 2; ++zp)
        for (int u = 0; u < 2; ++u)
          for (int up = 0; up < 2; ++up) {
            Polarization pol = z == 0 ? Polarization::R : Polarization::L;
            m(2 * z + zp, 2 * u + up) =
                std::conj(a[z][u]) / std::sqrt(2.0) * o(pol, static_cast<Spin>(zp), static_cast<Spin>(up));
          }
    v = v * m;
  }
  return std::norm(v(0) + v(3));
}

double lr_fidelity_n(const LrOverlapSet& o, int n_steps) {
  if (n_steps < 1) throw std::domain_error("require n_steps >= 1");
  return lr_fidelity_sequence(std::vector<LrOverlapSet>(static_cast<std::size_t>(n_steps), o));
}

double lr_fidelity_ideal_n(int n_steps, double k, double x) {
  if (n_steps < 1) throw std::domain_error("require n_steps >= 1");
  double p = lr_error_probability(x);
  double first = square(1.0 - 0.5 * (1.0 + k * k) * p);
  double ratio = square(1.0 - 0.5 * (1.0 - k + k * k) * p);
  return first * std::pow(ratio, n_steps - 1);
}

AverageResult lr_fidelity_averaged(const PhysicalConfig& config, int n_steps, const AverageMode& mode,
                                   unsigned workers) {
  config.validate();
  if (n_steps < 1) throw ConfigError("require n_steps >= 1");
  if (!config.k_ratio) throw ConfigError("the cluster-state sweep requires a Lande ratio");
  const double T1 = lr_step_time(config.omega_g_bar);
  if (std::exp(-0.5 * kGamma * T1) > 1e-3) warn("pulse spacing is not long compared with the trion lifetime");
  AverageSpec spec{mode, {config.w, {config.omega_g_bar, 0.0, 0.0}}};
  return gaussian_average(
      [&](const MagneticSample& s) {
        LrOverlapSet o = lr_overlaps(s, T1);
        if (n_steps == 1) return lr_fidelity_1(o);
        if (n_steps == 2) return lr_fidelity_2(o);
        return lr_fidelity_n(o, n_steps);
      },
      spec, config.omega_e, workers);
}

}  // namespace qdspi
