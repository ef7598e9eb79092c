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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qdspi/expsum.hpp"
#include "qdspi/kraus.hpp"
#include "qdspi/quadrature.hpp"

namespace qdspi {

namespace {

const cplx kI(0.0, 1.0);

int idx(Spin s) { return static_cast<int>(s); }

// Ground spin coupled to the trion emitting polarization pol.
int spin_of(Polarization pol) { return pol == Polarization::R ? 0 : 1; }

// Two-term exponential sum c0 e^{r0 t} + c1 e^{r1 t}.
struct Exp2 {
  std::array<cplx, 2> c;
  std::array<cplx, 2> r;
};

// G_{mu zeta}(t) = P+ e^{-i w t} + P- e^{i w t}, P+- = (1 +- n.sigma) / 2.
Exp2 ground_terms(const MagneticSample& s, int mu, int zeta) {
  const Vec3& n = s.n;
  cplx nsig;
  if (mu == 0 && zeta == 0) nsig = n[2];
  if (mu == 0 && zeta == 1) nsig = cplx(n[0], -n[1]);
  if (mu == 1 && zeta == 0) nsig = cplx(n[0], n[1]);
  if (mu == 1 && zeta == 1) nsig = -n[2];
  double delta = mu == zeta ? 1.0 : 0.0;
  double w = 0.5 * s.omega_g;
  return {{0.5 * (delta + nsig), 0.5 * (delta - nsig)}, {-kI * w, kI * w}};
}

// Entries of exp(-i Omega_e t sigma_x / 2).
Exp2 rotation_terms(double omega_e, int row, int col) {
  double v = 0.5 * omega_e;
  if (row == col) return {{0.5, 0.5}, {kI * v, -kI * v}};
  return {{-0.5, 0.5}, {kI * v, -kI * v}};
}

// Trion propagation from |up e> into the trion decaying into polarization pol.
Exp2 trion_terms(double omega_e, Polarization pol) {
  Exp2 x = rotation_terms(omega_e, spin_of(pol), 0);
  for (auto& r : x.r) r += -0.5 * kGamma;
  return x;
}

void check_times(double t, double t_prime) {
  if (!(t_prime >= 0.0) || !(t_prime <= t)) throw std::domain_error("require 0 <= t_prime <= t");
}

std::vector<double> breakpoints(double t, double omega, double support_end,
                                const std::vector<double>& kinks = {}) {
  std::vector<double> pts;
  for (double k : kinks)
    if (k < t) pts.push_back(k);
  for (double d = 0.25; d < t; d *= 2) {
    pts.push_back(d);
    pts.push_back(t - d);
  }
  if (omega > 0) {
    double half = std::numbers::pi / omega;
    int n = static_cast<int>(std::min(200.0, std::floor(t / half)));
    for (int i = 1; i <= n; ++i) pts.push_back(i * half);
  }
  if (support_end > 0 && support_end < t) pts.push_back(support_end);
  return pts;
}

cplx inner_closed_form(Polarization pol, Spin zeta, double t_prime, const MagneticSample& s, double big_gamma) {
  Exp2 e = trion_terms(s.omega_e, pol);
  Exp2 v = ground_terms(s, 0, idx(zeta));
  cplx sum = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      sum += e.c[a] * v.c[b] * shifted_exp_integral(e.r[a], -0.5 * big_gamma - e.r[a] + v.r[b], t_prime);
  return std::sqrt(big_gamma) * sum;
}

cplx inner_quadrature(Polarization pol, Spin zeta, double t_prime, const MagneticSample& s, const Wavepacket& input) {
  int sj = spin_of(pol);
  auto integrand = [&](double u) {
    double tau = t_prime - u;
    cplx trion = std::exp(-0.5 * kGamma * tau) * excited_rotation(tau, s.omega_e)(sj, 0);
    return input(u) * trion * ground_propagator(u, s)(0, idx(zeta));
  };
  double upper = std::min(t_prime, input.support_end());
  double lower = std::min(upper, input.support_begin());
  QuadratureOptions opts{1e-12, 1e-12, 8000};
  return integrate(integrand, lower, upper, opts,
                   breakpoints(t_prime, std::max(s.omega_g, s.omega_e), input.support_end(), input.kinks()))
      .value;
}

bool use_closed_form(Method m, const Wavepacket& input) {
  if (m == Method::ClosedForm && input.kind() != Wavepacket::Kind::Exponential)
    throw std::invalid_argument("closed-form path requires an exponential wavepacket");
  return m != Method::Quadrature && input.kind() == Wavepacket::Kind::Exponential;
}

}  // namespace

Wavepacket Wavepacket::exponential(double big_gamma) {
  if (!(big_gamma > 0) || !std::isfinite(big_gamma)) throw std::invalid_argument("bandwidth must be positive");
  Wavepacket w;
  w.kind_ = Kind::Exponential;
  w.rate_ = big_gamma;
  w.scale_ = std::sqrt(big_gamma);
  return w;
}

Wavepacket Wavepacket::truncated_exponential(double rate, double t_end) {
  if (!(rate > 0) || !(t_end > 0)) throw std::invalid_argument("rate and support must be positive");
  Wavepacket w;
  w.kind_ = Kind::TruncatedExponential;
  w.rate_ = rate;
  w.t_end_ = t_end;
  w.scale_ = std::sqrt(rate / -std::expm1(-rate * t_end));
  return w;
}

Wavepacket Wavepacket::sampled(std::vector<double> t, std::vector<cplx> values) {
  if (t.size() < 2 || t.size() != values.size()) throw std::invalid_argument("sampled wavepacket needs >= 2 points");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("sample grid must be strictly increasing");
  if (!(t.front() >= 0)) throw std::invalid_argument("sample grid must start at t >= 0");
  Wavepacket w;
  w.kind_ = Kind::Sampled;
  w.grid_ = std::move(t);
  w.values_ = std::move(values);
  w.t_end_ = w.grid_.back();
  if (std::abs(w.norm_squared() - 1.0) > 1e-10) throw std::invalid_argument("sampled wavepacket is not normalized");
  return w;
}

Wavepacket Wavepacket::sampled_normalized(std::vector<double> t, std::vector<cplx> values) {
  Wavepacket probe;
  probe.kind_ = Kind::Sampled;
  probe.grid_ = t;
  probe.values_ = values;
  double n = probe.norm_squared();
  if (!(n > 0)) throw std::invalid_argument("sampled wavepacket has zero norm");
  for (auto& v : values) v /= std::sqrt(n);
  return sampled(std::move(t), std::move(values));
}

double Wavepacket::support_begin() const { return kind_ == Kind::Sampled ? grid_.front() : 0.0; }

double Wavepacket::support_end() const { return t_end_; }

cplx Wavepacket::operator()(double t) const {
  switch (kind_) {
    case Kind::Exponential:
      return t < 0 ? 0.0 : scale_ * std::exp(-0.5 * rate_ * t);
    case Kind::TruncatedExponential:
      return (t < 0 || t > t_end_) ? 0.0 : scale_ * std::exp(-0.5 * rate_ * t);
    case Kind::Sampled: {
      if (t < grid_.front() || t > grid_.back()) return 0.0;
      auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
      std::size_t i = it == grid_.end() ? grid_.size() - 2 : static_cast<std::size_t>(it - grid_.begin()) - 1;
      double x = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
      return (1.0 - x) * values_[i] + x * values_[i + 1];
    }
  }
  return 0.0;
}

double Wavepacket::norm_squared() const {
  switch (kind_) {
    case Kind::Exponential:
      return 1.0;
    case Kind::TruncatedExponential:
      return scale_ * scale_ * -std::expm1(-rate_ * t_end_) / rate_;
    case Kind::Sampled: {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        const cplx& a = values_[i];
        const cplx& b = values_[i + 1];
        s += (grid_[i + 1] - grid_[i]) * (std::norm(a) + std::real(a * std::conj(b)) + std::norm(b)) / 3.0;
      }
      return s;
    }
  }
  return 0.0;
}

cplx f_coefficient(Polarization pol, SpinLabelPair labels, double t, double t_prime, const MagneticSample& sample) {
  check_times(t, t_prime);
  int sj = spin_of(pol);
  return std::sqrt(kGamma) * ground_propagator(t - t_prime, sample)(idx(labels.mu), sj) *
         std::exp(-0.5 * kGamma * t_prime) * excited_rotation(t_prime, sample.omega_e)(sj, idx(labels.zeta));
}

cplx f0_coefficient(SpinLabelPair labels, double t, const MagneticSample& sample) {
  if (!(t >= 0)) throw std::domain_error("require t >= 0");
  return std::exp(-0.5 * kGamma * t) * excited_rotation(t, sample.omega_e)(idx(labels.mu), idx(labels.zeta));
}

cplx lambda_coefficient(Polarization pol, SpinLabelPair labels, double t, double t_prime,
                        const MagneticSample& sample, const Wavepacket& input, Method method) {
  check_times(t, t_prime);
  cplx direct = 0.0;
  if (pol == Polarization::R) direct = input(t_prime) * ground_propagator(t, sample)(idx(labels.mu), idx(labels.zeta));
  cplx inner = use_closed_form(method, input) ? inner_closed_form(pol, labels.zeta, t_prime, sample, input.rate())
                                              : inner_quadrature(pol, labels.zeta, t_prime, sample, input);
  return direct - kGamma * ground_propagator(t - t_prime, sample)(idx(labels.mu), spin_of(pol)) * inner;
}

cplx o_overlap(Polarization pol, SpinLabelPair labels, double T1, const MagneticSample& sample, Method method) {
  if (!(T1 > 0)) throw std::domain_error("require T1 > 0");
  double norm = std::sqrt(-std::expm1(-kGamma * T1));
  if (method == Method::Quadrature) {
    auto integrand = [&](double t) {
      return std::sqrt(kGamma) * std::exp(-0.5 * kGamma * t) * f_coefficient(pol, labels, T1, t, sample);
    };
    QuadratureOptions opts{1e-11, 0.0, 8000};
    return integrate(integrand, 0.0, T1, opts, breakpoints(T1, std::max(sample.omega_g, sample.omega_e), 0.0)).value /
           norm;
  }
  int sj = spin_of(pol);
  Exp2 g = ground_terms(sample, idx(labels.mu), sj);
  Exp2 x = rotation_terms(sample.omega_e, sj, idx(labels.zeta));
  cplx sum = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      sum += g.c[a] * x.c[b] * std::exp(g.r[a] * T1) * exp_integral(-g.r[a] - kGamma + x.r[b], T1);
  return kGamma * sum / norm;
}

bool scattering_window_ok(double T_g, const Wavepacket& input) {
  double slow = std::min(kGamma, input.kind() == Wavepacket::Kind::Sampled ? kGamma : input.rate());
  bool truncated = input.support_end() <= T_g;
  return std::exp(-0.5 * kGamma * T_g) < 1e-6 && (truncated || std::exp(-0.5 * slow * T_g) < 1e-6);
}

cplx lambda_overlap(SpinLabelPair labels, double T_g, const MagneticSample& sample, const Wavepacket& input,
                    Method method) {
  if (!(T_g > 0)) throw std::domain_error("require T_g > 0");
  if (!scattering_window_ok(T_g, input)) warn("gate window too short for the photon and trion to decay");
  if (use_closed_form(method, input)) {
    double big_gamma = input.rate();
    Exp2 q = ground_terms(sample, idx(labels.mu), 0);
    Exp2 e = trion_terms(sample.omega_e, Polarization::R);
    Exp2 v = ground_terms(sample, 0, idx(labels.zeta));
    cplx sum = 0.0;
    for (int l = 0; l < 2; ++l)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          cplx a = -0.5 * big_gamma - q.r[l] + e.r[j];
          cplx c = -0.5 * big_gamma - e.r[j] + v.r[k];
          sum += q.c[l] * e.c[j] * v.c[k] * std::exp(q.r[l] * T_g) * nested_exp_integral(a, c, T_g);
        }
    cplx direct = ground_propagator(T_g, sample)(idx(labels.mu), idx(labels.zeta)) * -std::expm1(-big_gamma * T_g);
    return direct - kGamma * big_gamma * sum;
  }
  auto integrand = [&](double s) {
    return std::conj(input(s)) * lambda_coefficient(Polarization::R, labels, T_g, s, sample, input, Method::Quadrature);
  };
  double upper = std::min(T_g, input.support_end());
  double lower = std::min(upper, input.support_begin());
  QuadratureOptions opts{1e-9, 0.0, 8000};
  return integrate(integrand, lower, upper, opts,
                   breakpoints(upper, std::max(sample.omega_g, sample.omega_e), input.support_end(), input.kinks()))
      .value;
}

}  // namespace qdspi
