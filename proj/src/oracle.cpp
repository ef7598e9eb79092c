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

#include "qdspi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include "qdspi/kraus.hpp"

namespace qdspi {

namespace {

const cplx kI(0.0, 1.0);

bool has_excited(const Eigen::Vector4cd& v) { return v(kUpE) != 0.0 || v(kDownE) != 0.0; }

void check_key(const PhotonKey& key, const LatticeState& s) {
  if (static_cast<int>(key.size()) > s.n_max()) throw std::invalid_argument("photon number exceeds n_max");
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i].bin >= s.n_bins()) throw std::invalid_argument("photon bin outside the lattice");
    if (i > 0 && key[i] == key[i - 1]) throw std::invalid_argument("bin occupation is truncated at one photon");
  }
}

std::size_t segment_bins(double t, double dt) {
  if (!(t > 0) || !(dt > 0)) throw std::invalid_argument("durations must be positive");
  auto n = static_cast<std::size_t>(std::llround(t / dt));
  return std::max<std::size_t>(n, 1);
}

// Normalized lattice version of the ideal photon mode on [0, n dt].
std::vector<double> ideal_mode(std::size_t n, double dt) {
  double norm = std::sqrt(-std::expm1(-kGamma * n * dt));
  std::vector<double> phi(n);
  for (std::size_t m = 0; m < n; ++m)
    phi[m] = std::sqrt(dt * kGamma) * std::exp(-0.5 * kGamma * (m + 0.5) * dt) / norm;
  return phi;
}

}  // namespace

LatticeState::LatticeState(double delta_t, std::size_t n_bins, int n_max, std::size_t start_step)
    : delta_t_(delta_t), n_bins_(n_bins), n_max_(n_max), step_(start_step) {
  if (!(delta_t > 0)) throw std::invalid_argument("delta_t must be positive");
  if (n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  if (start_step > n_bins) throw std::invalid_argument("start step beyond the lattice");
}

void LatticeState::set(PhotonKey key, const Eigen::Vector4cd& amp) {
  std::sort(key.begin(), key.end());
  check_key(key, *this);
  if (amp.squaredNorm() == 0.0)
    entries_.erase(key);
  else
    entries_[key] = amp;
}

Eigen::Vector4cd LatticeState::get(PhotonKey key) const {
  std::sort(key.begin(), key.end());
  auto it = entries_.find(key);
  return it == entries_.end() ? Eigen::Vector4cd::Zero() : it->second;
}

double LatticeState::norm_squared() const {
  std::vector<double> parts;
  parts.reserve(entries_.size());
  for (const auto& [k, v] : entries_) parts.push_back(v.squaredNorm());
  double s = 0.0;
  for (double p : parts) s += p;
  return s;
}

void LatticeState::write_text(std::ostream& os) const {
  static const char* kNames[] = {"up_g", "down_g", "up_e", "down_e"};
  auto old = os.precision(17);
  os << "# lattice delta_t=" << delta_t_ << " n_bins=" << n_bins_ << " n_max=" << n_max_ << " step=" << step_
     << " leakage=" << leakage_ << "\n";
  for (const auto& [key, amp] : entries_) {
    std::string k;
    for (const Photon& p : key) {
      if (!k.empty()) k += ",";
      k += std::to_string(p.bin) + (p.pol == Polarization::R ? ":R" : ":L");
    }
    if (k.empty()) k = "-";
    for (int e = 0; e < 4; ++e)
      if (amp(e) != 0.0) os << k << " " << kNames[e] << " " << amp(e).real() << " " << amp(e).imag() << "\n";
  }
  os.precision(old);
}

LatticeState evolve(const LatticeState& initial, const MagneticSample& sample, std::size_t n_steps) {
  if (initial.step() + n_steps > initial.n_bins()) throw std::invalid_argument("evolution runs past the lattice");
  const double dt = initial.delta_t();
  const CollisionUnitary u = collision_unitary(dt, sample);
  std::array<EmitterOperator, 16> blocks;
  for (int orr = 0; orr < 2; ++orr)
    for (int ol = 0; ol < 2; ++ol)
      for (int ir = 0; ir < 2; ++ir)
        for (int il = 0; il < 2; ++il) blocks[orr * 8 + ol * 4 + ir * 2 + il] = u.block(orr, ol, ir, il);

  struct Entry {
    Eigen::Vector4cd amp;
    std::size_t clock;
  };
  std::map<PhotonKey, Entry> live;
  std::set<PhotonKey> excited;
  std::map<std::size_t, std::set<PhotonKey>> pending;
  auto enroll = [&](const PhotonKey& key, std::size_t now) {
    for (const Photon& p : key)
      if (p.bin >= now) pending[p.bin].insert(key);
  };
  // Ground entries with an empty current bin only precess, so their evolution is deferred.
  auto sync = [&](Entry& e, std::size_t to) {
    if (e.clock == to) return;
    e.amp.head<2>() = ground_propagator(static_cast<double>(to - e.clock) * dt, sample) * e.amp.head<2>();
    e.clock = to;
  };

  const std::size_t n0 = initial.step();
  const double norm0 = initial.norm_squared();
  for (const auto& [key, amp] : initial.entries()) {
    live.emplace(key, Entry{amp, n0});
    if (has_excited(amp)) excited.insert(key);
    enroll(key, n0);
  }

  double leakage = 0.0;
  for (std::size_t n = n0; n < n0 + n_steps; ++n) {
    std::set<PhotonKey> active = excited;
    if (auto it = pending.find(n); it != pending.end()) active.insert(it->second.begin(), it->second.end());
    std::map<PhotonKey, Eigen::Vector4cd> produced;
    for (const PhotonKey& key : active) {
      auto it = live.find(key);
      if (it == live.end()) continue;
      Entry e = it->second;
      live.erase(it);
      excited.erase(key);
      sync(e, n);
      int nr = 0, nl = 0;
      PhotonKey rest;
      for (const Photon& p : key) {
        if (p.bin == n)
          (p.pol == Polarization::R ? nr : nl) = 1;
        else
          rest.push_back(p);
      }
      for (int orr = 0; orr < 2; ++orr)
        for (int ol = 0; ol < 2; ++ol) {
          Eigen::Vector4cd v = blocks[orr * 8 + ol * 4 + nr * 2 + nl] * e.amp;
          if (v.squaredNorm() == 0.0) continue;
          PhotonKey out = rest;
          if (orr) out.push_back({static_cast<std::uint32_t>(n), Polarization::R});
          if (ol) out.push_back({static_cast<std::uint32_t>(n), Polarization::L});
          std::sort(out.begin(), out.end());
          auto [pos, fresh] = produced.try_emplace(out, Eigen::Vector4cd::Zero());
          pos->second += v;
        }
    }
    for (auto& [key, v] : produced) {
      if (static_cast<int>(key.size()) > initial.n_max()) {
        leakage += v.squaredNorm();
        continue;
      }
      auto it = live.find(key);
      if (it != live.end()) {
        sync(it->second, n + 1);
        it->second.amp += v;
      } else {
        it = live.emplace(key, Entry{v, n + 1}).first;
        enroll(key, n + 1);
      }
      if (has_excited(it->second.amp)) excited.insert(key);
    }
    pending.erase(n);
  }

  LatticeState out(dt, initial.n_bins(), initial.n_max(), n0 + n_steps);
  out.leakage_ = initial.leakage() + leakage;
  for (auto& [key, e] : live) {
    sync(e, n0 + n_steps);
    if (e.amp.squaredNorm() != 0.0) out.entries_.emplace(key, e.amp);
  }
  if (n_steps > 0) {
    double drift = std::abs(out.norm_squared() + leakage - norm0);
    if (drift > 1e-8 * static_cast<double>(n_steps))
      throw OracleError("norm drift " + std::to_string(drift) + " exceeds the allowed budget");
  }
  return out;
}

void apply_excitation_pulse(LatticeState& state) {
  for (const auto& [key, amp] : state.entries_)
    if (std::norm(amp(kUpE)) + std::norm(amp(kDownE)) > 0.0)
      throw OracleError("excitation pulse requires the emitter in the ground manifold");
  for (auto& [key, amp] : state.entries_) {
    amp(kUpE) = amp(kUpG);
    amp(kDownE) = amp(kDownG);
    amp(kUpG) = 0.0;
    amp(kDownG) = 0.0;
  }
}

cplx OnePhotonField::at(Polarization pol, std::size_t bin, Spin mu) const {
  if (bin >= n_bins) throw std::out_of_range("bin outside the field window");
  return data[(static_cast<std::size_t>(pol) * n_bins + bin) * 2 + static_cast<std::size_t>(mu)];
}

double OnePhotonField::norm_squared() const {
  double s = 0.0;
  for (const cplx& c : data) s += std::norm(c);
  return s;
}

OnePhotonField one_photon_field(const LatticeState& state, std::size_t first_bin, std::size_t n_bins) {
  OnePhotonField f;
  f.delta_t = state.delta_t();
  f.first_bin = first_bin;
  f.n_bins = n_bins;
  f.data.assign(4 * n_bins, 0.0);
  f.leakage = state.leakage();
  for (const auto& [key, amp] : state.entries()) {
    if (key.empty()) {
      f.no_photon = amp;
      continue;
    }
    if (key.size() != 1) continue;
    const Photon& p = key[0];
    if (p.bin < first_bin || p.bin >= first_bin + n_bins) continue;
    if (has_excited(amp)) throw OracleError("one-photon sector has an excited emitter");
    for (int mu = 0; mu < 2; ++mu)
      f.data[(static_cast<std::size_t>(p.pol) * n_bins + (p.bin - first_bin)) * 2 + mu] = amp(mu);
  }
  return f;
}

OnePhotonField simulate_emission(const MagneticSample& sample, double t_final, double delta_t, Spin zeta) {
  std::size_t n = segment_bins(t_final, delta_t);
  LatticeState s(delta_t, n);
  Eigen::Vector4cd e = Eigen::Vector4cd::Zero();
  e(emitter_index(zeta, true)) = 1.0;
  s.set({}, e);
  return one_photon_field(evolve(s, sample, n), 0, n);
}

OnePhotonField simulate_scattering(const MagneticSample& sample, const Wavepacket& input, double t_final,
                                   double delta_t, Spin zeta) {
  std::size_t n = segment_bins(t_final, delta_t);
  std::vector<cplx> c(n);
  double norm = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    c[m] = std::sqrt(delta_t) * input((m + 0.5) * delta_t);
    norm += std::norm(c[m]);
  }
  if (!(norm > 0)) throw std::invalid_argument("input photon has no weight on the lattice");
  LatticeState s(delta_t, n);
  for (std::size_t m = 0; m < n; ++m) {
    Eigen::Vector4cd g = Eigen::Vector4cd::Zero();
    g(emitter_index(zeta, false)) = c[m] / std::sqrt(norm);
    s.set({{static_cast<std::uint32_t>(m), Polarization::R}}, g);
  }
  return one_photon_field(evolve(s, sample, n), 0, n);
}

cplx LrLatticeResult::amplitude(Polarization p1, std::size_t m1, Spin nu) const {
  const cplx c[2] = {1.0 / std::sqrt(2.0), kI / std::sqrt(2.0)};
  return c[0] * segments[0][0].at(p1, m1, nu) + c[1] * segments[0][1].at(p1, m1, nu);
}

cplx LrLatticeResult::amplitude(Polarization p1, std::size_t m1, Polarization p2, std::size_t m2, Spin nu) const {
  if (segments.size() < 2) throw std::logic_error("two-photon amplitude needs two segments");
  cplx s = 0.0;
  for (Spin mu : kSpins) s += amplitude(p1, m1, mu) * segments[1][static_cast<int>(mu)].at(p2, m2, nu);
  return s;
}

LrLatticeResult simulate_lr(const MagneticSample& sample, int n_steps, double T1, double delta_t) {
  if (n_steps != 1 && n_steps != 2) throw std::invalid_argument("n_steps must be 1 or 2");
  LrLatticeResult r;
  r.n_steps = n_steps;
  r.delta_t = delta_t;
  r.bins_per_segment = segment_bins(T1, delta_t);
  r.t1 = static_cast<double>(r.bins_per_segment) * delta_t;
  const std::size_t nb = r.bins_per_segment;
  const std::size_t total = nb * static_cast<std::size_t>(n_steps);
  const std::vector<double> phi = ideal_mode(nb, delta_t);
  const cplx c[2] = {1.0 / std::sqrt(2.0), kI / std::sqrt(2.0)};

  // Each segment is linear in the spin at its start, so it is run once per spin basis
  // state; the photons of earlier segments are spectators.
  Eigen::Vector2cd carried(c[0], c[1]);
  for (int seg = 0; seg < n_steps; ++seg) {
    std::array<OnePhotonField, 2> fields;
    Eigen::Matrix2cd remainder = Eigen::Matrix2cd::Zero();
    for (Spin z : kSpins) {
      LatticeState s(delta_t, total, 2, nb * seg);
      Eigen::Vector4cd g = Eigen::Vector4cd::Zero();
      g(emitter_index(z, false)) = 1.0;
      s.set({}, g);
      apply_excitation_pulse(s);
      LatticeState out = evolve(s, sample, nb);
      fields[static_cast<int>(z)] = one_photon_field(out, nb * seg, nb);
      remainder.col(static_cast<int>(z)) = fields[static_cast<int>(z)].no_photon.tail<2>();
      r.leakage += out.leakage();
    }
    if (seg == 0) {
      r.undelivered_weight += (remainder * carried).squaredNorm();
    } else {
      // Spin amplitudes entering this segment are those of the emitted first photon.
      double w = 0.0;
      for (Polarization p : kPolarizations)
        for (std::size_t m = 0; m < nb; ++m) {
          Eigen::Vector2cd in(r.amplitude(p, m, Spin::Up), r.amplitude(p, m, Spin::Down));
          w += (remainder * in).squaredNorm();
        }
      r.undelivered_weight += w;
    }
    LrOverlapSet o;
    for (Polarization p : kPolarizations)
      for (Spin z : kSpins)
        for (Spin mu : kSpins) {
          cplx acc = 0.0;
          for (std::size_t m = 0; m < nb; ++m) acc += phi[m] * fields[static_cast<int>(z)].at(p, m, mu);
          o(p, z, mu) = acc;
        }
    r.segments.push_back(fields);
    r.overlaps.push_back(o);
  }
  r.fidelity = lr_fidelity_sequence(r.overlaps);
  return r;
}

ConvergenceReport convergence_study(const std::function<double(double)>& runner, const std::vector<double>& delta_ts) {
  if (delta_ts.size() < 3) throw std::invalid_argument("convergence study needs at least three step sizes");
  double ratio = delta_ts[1] / delta_ts[0];
  if (!(ratio > 0) || ratio == 1.0) throw std::invalid_argument("step sizes must form a geometric progression");
  for (std::size_t i = 1; i < delta_ts.size(); ++i)
    if (std::abs(delta_ts[i] / delta_ts[i - 1] - ratio) > 1e-9 * ratio)
      throw std::invalid_argument("step sizes must form a geometric progression");
  ConvergenceReport rep;
  rep.delta_t = delta_ts;
  for (double dt : delta_ts) rep.discrepancy.push_back(runner(dt));
  const auto& e = rep.discrepancy;
  bool constant = std::all_of(e.begin(), e.end(), [&](double x) { return x == e.front(); });
  bool positive = std::all_of(e.begin(), e.end(), [](double x) { return x > 0 && std::isfinite(x); });
  if (constant || !positive) {
    rep.defined = false;
    rep.monotone = false;
    rep.order = std::numeric_limits<double>::quiet_NaN();
    return rep;
  }
  // Discrepancy should shrink together with the step size.
  for (std::size_t i = 1; i < e.size(); ++i) {
    bool shrinking_step = delta_ts[i] < delta_ts[i - 1];
    if (shrinking_step ? !(e[i] < e[i - 1]) : !(e[i] > e[i - 1])) rep.monotone = false;
  }
  double mx = 0, my = 0;
  const double n = static_cast<double>(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    mx += std::log(delta_ts[i]) / n;
    my += std::log(e[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    double dx = std::log(delta_ts[i]) - mx;
    sxy += dx * (std::log(e[i]) - my);
    sxx += dx * dx;
  }
  rep.order = sxy / sxx;
  return rep;
}

double oracle_discrepancy(OracleScenario scenario, const OracleSetup& setup, double dt) {
  const MagneticSample& s = setup.sample;
  const double sdt = std::sqrt(dt);
  double worst = 0.0;
  switch (scenario) {
    case OracleScenario::Vacuum: {
      std::size_t n = segment_bins(setup.t_emission, dt);
      LatticeState st(dt, n);
      Eigen::Vector4cd g = Eigen::Vector4cd::Zero();
      g(emitter_index(setup.zeta, false)) = 1.0;
      st.set({}, g);
      LatticeState out = evolve(st, s, n);
      Eigen::Vector2cd expect = ground_propagator(n * dt, s).col(static_cast<int>(setup.zeta));
      for (const auto& [key, amp] : out.entries()) {
        if (key.empty())
          worst = std::max(worst, (amp.head<2>() - expect).cwiseAbs().maxCoeff());
        else
          worst = std::max(worst, amp.cwiseAbs().maxCoeff());
      }
      return worst;
    }
    case OracleScenario::Emission: {
      OnePhotonField f = simulate_emission(s, setup.t_emission, dt, setup.zeta);
      double t = f.n_bins * dt;
      for (Polarization p : kPolarizations)
        for (Spin mu : kSpins)
          for (std::size_t m = 0; m < f.n_bins; ++m)
            worst = std::max(worst, std::abs(f.at(p, m, mu) / sdt -
                                             f_coefficient(p, {setup.zeta, mu}, t, f.bin_center(m), s)));
      return worst;
    }
    case OracleScenario::Scattering: {
      Wavepacket in = Wavepacket::exponential(setup.big_gamma);
      OnePhotonField f = simulate_scattering(s, in, setup.t_scattering, dt, setup.zeta);
      double t = f.n_bins * dt;
      for (Polarization p : kPolarizations)
        for (Spin mu : kSpins)
          for (std::size_t m = 0; m < f.n_bins; ++m)
            worst = std::max(worst, std::abs(f.at(p, m, mu) / sdt -
                                             lambda_coefficient(p, {setup.zeta, mu}, t, f.bin_center(m), s, in)));
      return worst;
    }
    case OracleScenario::Lr1:
    case OracleScenario::Lr2: {
      const int steps = scenario == OracleScenario::Lr1 ? 1 : 2;
      LrLatticeResult r = simulate_lr(s, steps, setup.t1, dt);
      const std::size_t nb = r.bins_per_segment;
      const cplx c[2] = {1.0 / std::sqrt(2.0), kI / std::sqrt(2.0)};
      // Analytic tables: f[p][m][zeta][mu] at the local emission time of each segment.
      std::vector<cplx> f(2 * nb * 4);
      auto fi = [&](int p, std::size_t m, int z, int mu) -> cplx& { return f[((p * nb + m) * 2 + z) * 2 + mu]; };
      for (int p = 0; p < 2; ++p)
        for (std::size_t m = 0; m < nb; ++m)
          for (int z = 0; z < 2; ++z)
            for (int mu = 0; mu < 2; ++mu)
              fi(p, m, z, mu) = f_coefficient(static_cast<Polarization>(p), {static_cast<Spin>(z), static_cast<Spin>(mu)},
                                              r.t1, (m + 0.5) * dt, s);
      // First photon amplitudes with the initial spin contracted, lattice and analytic.
      std::vector<cplx> x1(2 * nb * 2), y1(2 * nb * 2);
      for (int p = 0; p < 2; ++p)
        for (std::size_t m = 0; m < nb; ++m)
          for (int mu = 0; mu < 2; ++mu) {
            x1[(p * nb + m) * 2 + mu] = r.amplitude(static_cast<Polarization>(p), m, static_cast<Spin>(mu)) / sdt;
            y1[(p * nb + m) * 2 + mu] = c[0] * fi(p, m, 0, mu) + c[1] * fi(p, m, 1, mu);
            if (steps == 1)
              worst = std::max(worst, std::abs(x1[(p * nb + m) * 2 + mu] - y1[(p * nb + m) * 2 + mu]));
          }
      if (steps == 1) return worst;
      // Second photon tables indexed [mu][p2][m2][nu].
      std::vector<cplx> x2(2 * 2 * nb * 2), y2(2 * 2 * nb * 2);
      for (int mu = 0; mu < 2; ++mu)
        for (int p = 0; p < 2; ++p)
          for (std::size_t m = 0; m < nb; ++m)
            for (int nu = 0; nu < 2; ++nu) {
              std::size_t k = ((mu * 2 + p) * nb + m) * 2 + nu;
              x2[k] = r.segments[1][mu].at(static_cast<Polarization>(p), m, static_cast<Spin>(nu)) / sdt;
              y2[k] = fi(p, m, mu, nu);
            }
      const std::size_t stride = 2 * nb * 2;
      for (std::size_t a = 0; a < 2 * nb; ++a) {
        const cplx xu = x1[a * 2], xd = x1[a * 2 + 1];
        const cplx yu = y1[a * 2], yd = y1[a * 2 + 1];
        for (std::size_t b = 0; b < stride; ++b) {
          cplx diff = xu * x2[b] + xd * x2[stride + b] - yu * y2[b] - yd * y2[stride + b];
          worst = std::max(worst, std::norm(diff));
        }
      }
      return std::sqrt(worst);
    }
  }
  return worst;
}

OracleScenario parse_oracle_scenario(const std::string& name) {
  if (name == "vacuum") return OracleScenario::Vacuum;
  if (name == "emission") return OracleScenario::Emission;
  if (name == "scattering") return OracleScenario::Scattering;
  if (name == "lr1") return OracleScenario::Lr1;
  if (name == "lr2") return OracleScenario::Lr2;
  throw std::invalid_argument("unknown oracle scenario: " + name);
}

std::string to_string(OracleScenario scenario) {
  switch (scenario) {
    case OracleScenario::Vacuum:
      return "vacuum";
    case OracleScenario::Emission:
      return "emission";
    case OracleScenario::Scattering:
      return "scattering";
    case OracleScenario::Lr1:
      return "lr1";
    case OracleScenario::Lr2:
      return "lr2";
  }
  return "unknown";
}

}  // namespace qdspi
