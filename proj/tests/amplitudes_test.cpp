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

#include "qdspi/amplitudes.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qdspi/quadrature.hpp"

namespace qdspi {
namespace {

const cplx kI(0, 1);
constexpr Polarization R = Polarization::R;
constexpr Polarization L = Polarization::L;
constexpr SpinLabelPair UU{Spin::Up, Spin::Up}, UD{Spin::Up, Spin::Down}, DU{Spin::Down, Spin::Up},
    DD{Spin::Down, Spin::Down};

MagneticSample noisy() { return MagneticSample::from_angles(0.31, 0.23, 0.9, -1.3); }

MagneticSample still() {
  MagneticSample s;
  s.omega_g = 0;
  s.omega_e = 0;
  return s;
}

// Composite Simpson on [0, b]; independent of the library quadrature.
cplx simpson(const std::function<cplx(double)>& f, double b, int n = 4000) {
  if (b <= 0) return 0.0;
  double h = b / n;
  cplx s = f(0) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

// Direct transcription of the written coefficient formulas (gamma = 1).
struct Written {
  MagneticSample s;
  std::function<cplx(double)> xi;

  double c(double x) const { return std::cos(0.5 * s.omega_g * x); }
  double sn(double x) const { return std::sin(0.5 * s.omega_g * x); }
  double ce(double x) const { return std::cos(0.5 * s.omega_e * x); }
  double se(double x) const { return std::sin(0.5 * s.omega_e * x); }
  double nx() const { return s.n[0]; }
  double ny() const { return s.n[1]; }
  double nz() const { return s.n[2]; }
  cplx gm(double x) const { return c(x) - kI * nz() * sn(x); }
  cplx gp(double x) const { return c(x) + kI * nz() * sn(x); }

  cplx f(Polarization p, SpinLabelPair l, double t, double tp) const {
    double e = std::exp(-0.5 * tp);
    cplx fruu = e * ce(tp) * gm(t - tp);
    cplx frud = -kI * cplx(nx(), ny()) * e * ce(tp) * sn(t - tp);
    cplx fluu = kI * cplx(ny(), nx()) * e * se(tp) * sn(t - tp);
    cplx flud = -kI * e * se(tp) * gp(t - tp);
    bool up = l.zeta == Spin::Up;
    bool same = l.zeta == l.mu;
    if (p == R) {
      if (up) return same ? fruu : frud;
      return same ? std::conj(fluu) : -std::conj(flud);
    }
    if (up) return same ? fluu : flud;
    return same ? std::conj(fruu) : -std::conj(frud);
  }

  cplx inner(double tp, bool trion_cos, const std::function<cplx(double)>& g) const {
    return simpson(
        [&](double u) { return xi(u) * std::exp(-0.5 * (tp - u)) * (trion_cos ? ce(tp - u) : se(tp - u)) * g(u); }, tp);
  }

  cplx lambda(Polarization p, SpinLabelPair l, double t, double tp) const {
    double sp = sn(t - tp);
    cplx nm(nx(), -ny()), np(nx(), ny());
    auto gmu = [&](double u) { return gm(u); };
    auto snu = [&](double u) { return cplx(sn(u)); };
    if (p == R) {
      if (l.zeta == Spin::Up && l.mu == Spin::Up) return xi(tp) * gm(t) - gm(t - tp) * inner(tp, true, gmu);
      if (l.zeta == Spin::Down && l.mu == Spin::Up)
        return -kI * xi(tp) * nm * sn(t) + kI * gm(t - tp) * inner(tp, true, [&](double u) { return nm * sn(u); });
      if (l.zeta == Spin::Up && l.mu == Spin::Down)
        return -kI * xi(tp) * np * sn(t) + kI * np * sp * inner(tp, true, gmu);
      // Direct term carries G_dd(t) and the tail a real prefactor.
      return xi(tp) * gp(t) + (nx() * nx() + ny() * ny()) * sp * inner(tp, true, snu);
    }
    if (l.zeta == Spin::Up && l.mu == Spin::Up) return nm * sp * inner(tp, false, gmu);
    if (l.zeta == Spin::Down && l.mu == Spin::Up) return -kI * nm * nm * sp * inner(tp, false, snu);
    if (l.zeta == Spin::Up && l.mu == Spin::Down) return kI * gp(t - tp) * inner(tp, false, gmu);
    return nm * gp(t - tp) * inner(tp, false, snu);
  }
};

struct GridPoint {
  MagneticSample s;
  double t, tp;
};

std::vector<GridPoint> random_grid(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<GridPoint> out;
  for (int i = 0; i < n; ++i) {
    double t = 12 * u(rng);
    out.push_back({MagneticSample::from_angles(2 * u(rng), 2 * u(rng), std::numbers::pi * u(rng),
                                               2 * std::numbers::pi * u(rng)),
                   t, t * u(rng)});
  }
  return out;
}

TEST(Emission, SymmetryIdentities) {
  for (const auto& g : random_grid(500, 11)) {
    auto f = [&](Polarization p, SpinLabelPair l) { return f_coefficient(p, l, g.t, g.tp, g.s); };
    EXPECT_LT(std::abs(f(R, UU) - std::conj(f(L, DD))), 1e-12);
    EXPECT_LT(std::abs(f(R, UD) + std::conj(f(L, DU))), 1e-12);
    EXPECT_LT(std::abs(f(L, UU) - std::conj(f(R, DD))), 1e-12);
    EXPECT_LT(std::abs(f(L, UD) + std::conj(f(R, DU))), 1e-12);
  }
}

TEST(Emission, MatchesWrittenFormulas) {
  for (const auto& g : random_grid(200, 12)) {
    Written w{g.s, nullptr};
    for (Polarization p : kPolarizations)
      for (SpinLabelPair l : kSpinLabelPairs)
        EXPECT_LT(std::abs(f_coefficient(p, l, g.t, g.tp, g.s) - w.f(p, l, g.t, g.tp)), 1e-14);
  }
}

TEST(Emission, StillEmitterIsPureDecay) {
  for (double tp : {0.0, 0.5, 3.0})
    EXPECT_LT(std::abs(f_coefficient(R, UU, 5.0, tp, still()) - std::exp(-0.5 * tp)), 1e-15);
}

TEST(Emission, AxisAlongZBlocksSpinFlip) {
  MagneticSample s = MagneticSample::from_angles(0.7, 0.3, 0.0, 0.0);
  for (double t : {0.3, 2.0, 9.0})
    for (double tp : {0.0, 0.1 * t, t}) EXPECT_EQ(f_coefficient(R, UD, t, tp, s), cplx(0.0));
}

TEST(Emission, DomainErrors) {
  EXPECT_THROW(f_coefficient(R, UU, 1.0, 2.0, noisy()), std::domain_error);
  EXPECT_THROW(f_coefficient(R, UU, 1.0, -0.1, noisy()), std::domain_error);
  EXPECT_THROW(f0_coefficient(UU, -1.0, noisy()), std::domain_error);
}

TEST(Emission, NoEmissionAmplitude) {
  EXPECT_EQ(f0_coefficient(UU, 0.0, noisy()), cplx(1.0));
  EXPECT_EQ(f0_coefficient(UD, 0.0, noisy()), cplx(0.0));
  MagneticSample s = noisy();
  double t = 1.7;
  EXPECT_LT(std::abs(f0_coefficient(UD, t, s) - std::exp(-t / 2) * -kI * std::sin(s.omega_e * t / 2)), 1e-15);
}

TEST(Emission, NormConservation) {
  std::vector<MagneticSample> samples = {still(), noisy(), MagneticSample::from_angles(1.5, 0.8, 2.0, 0.4)};
  for (const auto& s : samples) {
    for (Spin zeta : kSpins) {
      for (double t : {0.5, 3.0, 10.0}) {
        double total = 0;
        for (Spin mu : kSpins) {
          SpinLabelPair l{zeta, mu};
          total += std::norm(f0_coefficient(l, t, s));
          for (Polarization p : kPolarizations)
            total += integrate_real([&](double tp) { return std::norm(f_coefficient(p, l, t, tp, s)); }, 0, t,
                                    {1e-13, 0, 4000});
        }
        EXPECT_NEAR(total, 1.0, 1e-11) << t;
      }
    }
  }
}

TEST(Scattering, MatchesWrittenFormulas) {
  Wavepacket in = Wavepacket::exponential(0.6);
  for (const auto& g : random_grid(30, 13)) {
    Written w{g.s, [&](double u) { return in(u); }};
    for (Polarization p : kPolarizations)
      for (SpinLabelPair l : kSpinLabelPairs) {
        cplx got = lambda_coefficient(p, l, g.t, g.tp, g.s, in);
        EXPECT_LT(std::abs(got - w.lambda(p, l, g.t, g.tp)), 1e-10)
            << static_cast<int>(p) << static_cast<int>(l.zeta) << static_cast<int>(l.mu);
      }
  }
}

TEST(Scattering, ClosedFormMatchesQuadrature) {
  for (double gam : {0.05, 0.6, 3.0}) {
    Wavepacket in = Wavepacket::exponential(gam);
    for (const auto& g : random_grid(25, 14)) {
      for (Polarization p : kPolarizations)
        for (SpinLabelPair l : kSpinLabelPairs) {
          cplx a = lambda_coefficient(p, l, g.t, g.tp, g.s, in, Method::ClosedForm);
          cplx b = lambda_coefficient(p, l, g.t, g.tp, g.s, in, Method::Quadrature);
          EXPECT_LT(std::abs(a - b), 1e-9);
        }
    }
  }
}

TEST(Scattering, NoCrossPolarizationWithoutTrionPrecession) {
  MagneticSample s = MagneticSample::from_angles(0.4, 0.0, 1.0, 0.5);
  Wavepacket in = Wavepacket::exponential(0.5);
  for (double tp : {0.0, 1.0, 4.0, 9.0})
    for (SpinLabelPair l : kSpinLabelPairs) {
      EXPECT_LT(std::abs(lambda_coefficient(L, l, 10.0, tp, s, in)), 1e-15);
      EXPECT_EQ(lambda_coefficient(L, l, 10.0, tp, s, in, Method::Quadrature), cplx(0.0));
    }
}

TEST(Scattering, TwoLevelResponseAtRest) {
  // Output of a resonant two-level scatterer: xi(t) - int xi e^{-(t-u)/2} du.
  double gam = 0.4;
  Wavepacket in = Wavepacket::exponential(gam);
  for (double tp : {0.0, 0.7, 5.0}) {
    cplx want = in(tp) - std::sqrt(gam) * (std::exp(-gam * tp / 2) - std::exp(-tp / 2)) / (0.5 - gam / 2);
    EXPECT_LT(std::abs(lambda_coefficient(R, UU, 6.0, tp, still(), in) - want), 1e-13);
  }
}

double scattering_norm(const MagneticSample& s, const Wavepacket& in, Spin zeta) {
  double total = 0;
  for (Polarization p : kPolarizations)
    for (Spin mu : kSpins)
      total += integrate_real(
          [&](double tp) { return std::norm(lambda_coefficient(p, {zeta, mu}, kTInfinity, tp, s, in)); }, 0,
          kTInfinity, {1e-10, 0, 4000}, {0.5, 1, 2, 4, 8, 16, 24, 32});
  return total;
}

TEST(Scattering, Unitarity) {
  for (const auto& s : {noisy(), MagneticSample::from_angles(0.9, 1.2, 2.1, 2.5)})
    for (Spin zeta : kSpins) {
      EXPECT_NEAR(scattering_norm(s, Wavepacket::exponential(0.8), zeta), 1.0, 1e-6);
      EXPECT_NEAR(scattering_norm(s, Wavepacket::truncated_exponential(1.5, 6.0), zeta), 1.0, 1e-6);
    }
}

TEST(Scattering, ClosedFormNeedsExponential) {
  Wavepacket in = Wavepacket::truncated_exponential(1.0, 5.0);
  EXPECT_THROW(lambda_coefficient(R, UU, 6.0, 1.0, noisy(), in, Method::ClosedForm), std::invalid_argument);
  EXPECT_THROW(lambda_coefficient(R, UU, 1.0, 2.0, noisy(), in), std::domain_error);
}

TEST(Overlap, EmissionClosedFormMatchesQuadrature) {
  for (const auto& g : random_grid(20, 15)) {
    double T1 = 0.5 + g.t;
    for (Polarization p : kPolarizations)
      for (SpinLabelPair l : kSpinLabelPairs) {
        cplx a = o_overlap(p, l, T1, g.s, Method::ClosedForm);
        cplx b = o_overlap(p, l, T1, g.s, Method::Quadrature);
        EXPECT_LT(std::abs(a - b), 1e-10);
      }
  }
}

TEST(Overlap, EmissionAtRest) {
  for (double T1 : {1.0, 4.0, 30.0}) {
    EXPECT_NEAR(o_overlap(R, UU, T1, still()).real(), std::sqrt(-std::expm1(-T1)), 1e-14);
    EXPECT_EQ(o_overlap(L, UU, T1, still()), cplx(0.0));
    EXPECT_EQ(o_overlap(L, UD, T1, still()), cplx(0.0));
  }
  EXPECT_NEAR(o_overlap(R, UU, 40.0, still()).real(), 1.0, 1e-12);
  EXPECT_THROW(o_overlap(R, UU, 0.0, still()), std::domain_error);
}

TEST(Overlap, EmissionMatchesWrittenQuadrature) {
  MagneticSample s = MagneticSample::from_angles(0.2, 0.1, std::numbers::pi / 2, 0.0);
  double T1 = std::numbers::pi / 0.4;
  Written w{s, nullptr};
  for (Polarization p : kPolarizations)
    for (SpinLabelPair l : kSpinLabelPairs) {
      cplx want = simpson([&](double t) { return std::exp(-0.5 * t) * w.f(p, l, T1, t); }, T1) /
                  std::sqrt(-std::expm1(-T1));
      EXPECT_LT(std::abs(o_overlap(p, l, T1, s) - want), 1e-11);
    }
}

TEST(Overlap, ScatteringClosedFormMatchesQuadrature) {
  for (double gam : {0.05, 0.5, 2.0}) {
    Wavepacket in = Wavepacket::exponential(gam);
    for (const auto& s : {noisy(), MagneticSample::from_angles(0.05, 0.04, 1.3, 0.2)}) {
      double T = 40.0 / std::min(gam, 1.0);
      for (SpinLabelPair l : kSpinLabelPairs) {
        cplx a = lambda_overlap(l, T, s, in, Method::ClosedForm);
        cplx b = lambda_overlap(l, T, s, in, Method::Quadrature);
        EXPECT_LT(std::abs(a - b), 1e-9) << gam;
      }
    }
  }
}

double reference_lambda(double gam) { return (-1 + gam * gam) / (std::sqrt(2.0) * (1 + gam) * (1 + gam)); }

MagneticSample slow(double omega) {
  MagneticSample s;
  s.omega_g = omega;
  s.omega_e = omega;
  return s;
}

TEST(Overlap, SlowPrecessionLimit) {
  const double omega = 1e-9;
  double T = std::numbers::pi / (2 * omega);
  for (double gam : {0.01, 0.1, 0.5, 1.0, 2.0}) {
    cplx v = lambda_overlap(UU, T, slow(omega), Wavepacket::exponential(gam));
    EXPECT_NEAR(v.real(), reference_lambda(gam), 1e-6) << gam;
  }
  // The approach to the limit is linear in the precession frequency.
  for (double gam : {0.1, 0.5, 2.0}) {
    auto offset = [&](double om) {
      return lambda_overlap(UU, std::numbers::pi / (2 * om), slow(om), Wavepacket::exponential(gam)).real() -
             reference_lambda(gam);
    };
    EXPECT_NEAR(offset(2e-5) / offset(1e-5), 2.0, 0.01) << gam;
  }
  cplx at_one = lambda_overlap(UU, T, slow(omega), Wavepacket::exponential(1.0));
  EXPECT_LT(std::abs(at_one), 1e-6);
  cplx narrow = lambda_overlap(UU, T, slow(omega), Wavepacket::exponential(0.01));
  EXPECT_NEAR(narrow.real(), -1 / std::sqrt(2.0), 0.03);
}

TEST(Overlap, SampledInputConvergesToAnalytic) {
  // Linear interpolation of a truncated exponential: at least second order in the grid spacing.
  const double rate = 0.8, end = 20.0;
  auto sampled = [&](int n) {
    std::vector<double> t;
    std::vector<cplx> v;
    for (int i = 0; i <= n; ++i) {
      t.push_back(end * i / n);
      v.push_back(std::exp(-0.5 * rate * t.back()));
    }
    return Wavepacket::sampled_normalized(t, v);
  };
  cplx exact = lambda_overlap(UU, 60.0, noisy(), Wavepacket::truncated_exponential(rate, end));
  double e1 = std::abs(lambda_overlap(UU, 60.0, noisy(), sampled(40)) - exact);
  double e2 = std::abs(lambda_overlap(UU, 60.0, noisy(), sampled(80)) - exact);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e2, 1e-4);
}

TEST(Wavepackets, Normalization) {
  Wavepacket e = Wavepacket::exponential(0.3);
  EXPECT_NEAR(integrate_real([&](double x) { return std::norm(e(x)); }, 0, 200, {1e-13, 0, 4000}), 1.0, 1e-12);
  EXPECT_EQ(e(-1.0), cplx(0.0));
  Wavepacket tr = Wavepacket::truncated_exponential(1.0, 2.0);
  EXPECT_NEAR(integrate_real([&](double x) { return std::norm(tr(x)); }, 0, 2, {1e-14, 0, 4000}), 1.0, 1e-13);
  EXPECT_NEAR(tr.norm_squared(), 1.0, 1e-15);
  EXPECT_EQ(tr(2.5), cplx(0.0));
}

TEST(Wavepackets, SampledValidation) {
  EXPECT_THROW(Wavepacket::sampled({0, 1}, {1.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(Wavepacket::sampled({0, 0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(Wavepacket::sampled({0, 2}, {1.0, 1.0}), std::invalid_argument);
  Wavepacket w = Wavepacket::sampled({0, 1}, {1.0, 1.0});
  EXPECT_EQ(w(0.5), cplx(1.0));
  EXPECT_EQ(w(1.5), cplx(0.0));
  EXPECT_THROW(Wavepacket::exponential(0.0), std::invalid_argument);
}

TEST(Window, WarnsWhenTooShort) {
  std::vector<std::string> seen;
  set_warning_handler([&](const std::string& m) { seen.push_back(m); });
  lambda_overlap(UU, 5.0, noisy(), Wavepacket::exponential(0.5));
  set_warning_handler(nullptr);
  EXPECT_EQ(seen.size(), 1u);
  EXPECT_FALSE(scattering_window_ok(5.0, Wavepacket::exponential(0.5)));
  EXPECT_TRUE(scattering_window_ok(60.0, Wavepacket::exponential(0.5)));
}

}  // namespace
}  // namespace qdspi
