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

#include "qdspi/sweep.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qdspi/protocols.hpp"
#include "qdspi/quadrature.hpp"

namespace qdspi {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ";";
    s += format_double(x);
  }
  return s;
}

void require_sorted_grid(std::vector<double>& grid, const std::string& name) {
  if (grid.empty()) throw UsageError(name + " grid is empty");
  for (double x : grid)
    if (!std::isfinite(x)) throw UsageError(name + " grid has a non-finite value");
  std::sort(grid.begin(), grid.end());
}

SweepResult start(const std::string& command) {
  SweepResult r;
  r.command = command;
  return r;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

bool SweepResult::has_failures() const {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.failure.empty(); });
}

std::string SweepResult::config_hash() const {
  std::string canon = command + "\n";
  for (const auto& [k, v] : parameters) canon += k + "=" + v + "\n";
  canon += "seed=" + (seed ? std::to_string(*seed) : std::string("none")) + "\n";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::string SweepResult::body() const {
  std::ostringstream os;
  os << "# command: " << command << "\n";
  os << "# config_hash: " << config_hash() << "\n";
  os << "# seed: " << (seed ? std::to_string(*seed) : std::string("none")) << "\n";
  for (const auto& [k, v] : parameters) os << "# param " << k << "=" << v << "\n";
  for (const auto& n : notes) os << "# note " << n << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << ",status\n";
  for (const SweepRow& row : rows) {
    for (std::size_t i = 0; i < row.values.size(); ++i) os << (i ? "," : "") << format_double(row.values[i]);
    os << "," << (row.failure.empty() ? "ok" : "failed: " + row.failure) << "\n";
  }
  return os.str();
}

void SweepResult::write_csv(std::ostream& os) const {
  std::string b = body();
  // The timestamp goes right after the seed line and is not part of the hashed body.
  std::size_t pos = b.find("# seed:");
  pos = b.find('\n', pos) + 1;
  os << b.substr(0, pos) << "# timestamp: " << timestamp << "\n" << b.substr(pos);
}

AverageMode parse_average_mode(const std::string& text, std::uint64_t seed) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("averaging mode must look like gh:<nodes> or mc:<samples>");
  std::string kind = text.substr(0, colon);
  std::string num = text.substr(colon + 1);
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(num, &used);
  } catch (const std::exception&) {
    throw UsageError("bad averaging count: " + num);
  }
  if (used != num.size() || n <= 0) throw UsageError("bad averaging count: " + num);
  AverageMode mode;
  if (kind == "gh")
    mode = GaussHermiteMode{static_cast<int>(n)};
  else if (kind == "mc")
    mode = MonteCarloMode{static_cast<std::size_t>(n), seed};
  else
    throw UsageError("unknown averaging mode: " + kind);
  try {
    AverageSpec{mode, {}}.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return mode;
}

std::string to_string(const AverageMode& mode) {
  if (auto* gh = std::get_if<GaussHermiteMode>(&mode)) return "gh:" + std::to_string(gh->nodes_per_axis);
  return "mc:" + std::to_string(std::get<MonteCarloMode>(mode).n_samples);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

SweepResult cmd_pns_sweep(const std::vector<double>& w_grid) {
  std::vector<double> grid = w_grid;
  require_sorted_grid(grid, "w");
  for (double w : grid)
    if (w < 1e-3 || w > 1e3) throw UsageError("w grid must lie within [1e-3, 1e3]");
  SweepResult r = start("pns-sweep");
  r.parameters = {{"w", join(grid)}};
  r.columns = {"w_over_gamma", "fidelity"};
  for (double w : grid) r.rows.push_back({{w, pns_fidelity_averaged(w)}, ""});
  return r;
}

SweepResult cmd_cz_sweep(const std::vector<double>& big_gamma_grid, double omega, double w, const AverageMode& mode,
                         unsigned workers) {
  std::vector<double> grid = big_gamma_grid;
  require_sorted_grid(grid, "big-gamma");
  if (!(omega > 0)) throw UsageError("omega must be positive");
  if (!(w >= 0)) throw UsageError("w must be nonnegative");
  for (double g : grid)
    if (!(g > 0)) throw UsageError("big-gamma values must be positive");
  SweepResult r = start("cz-sweep");
  r.parameters = {{"big-gamma", join(grid)}, {"omega", format_double(omega)}, {"w", format_double(w)},
                  {"avg", to_string(mode)}};
  if (auto* mc = std::get_if<MonteCarloMode>(&mode)) r.seed = mc->seed;
  r.columns = {"big_gamma_over_gamma", "fidelity", "error_estimate"};
  r.rows.resize(grid.size());
  if (workers == 0) workers = default_workers();
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    try {
      AverageResult a = cz_fidelity_averaged(PhysicalConfig::for_cz(omega, w, grid[i]), mode, 1);
      r.rows[i] = {{grid[i], a.mean, a.error_estimate}, ""};
    } catch (const QuadratureError& e) {
      r.rows[i] = {{grid[i], std::nan(""), std::nan("")}, e.what()};
    } catch (const NonFiniteSampleError& e) {
      r.rows[i] = {{grid[i], std::nan(""), std::nan("")}, e.what()};
    }
  });
  r.passed = !r.has_failures();
  return r;
}

SweepResult cmd_lr_sweep(const std::vector<double>& omega_e_grid, double k, double w, int n_steps,
                         const AverageMode& mode, unsigned workers) {
  std::vector<double> grid = omega_e_grid;
  require_sorted_grid(grid, "omega-e");
  if (n_steps != 1 && n_steps != 2) throw UsageError("n-steps must be 1 or 2");
  if (!(k > 0)) throw UsageError("k must be positive");
  if (!(w >= 0)) throw UsageError("w must be nonnegative");
  for (double x : grid)
    if (!(x > 0)) throw UsageError("omega-e values must be positive");
  SweepResult r = start("lr-sweep");
  r.parameters = {{"omega-e", join(grid)}, {"k", format_double(k)}, {"w", format_double(w)},
                  {"n-steps", std::to_string(n_steps)}, {"avg", to_string(mode)}};
  if (auto* mc = std::get_if<MonteCarloMode>(&mode)) r.seed = mc->seed;
  r.columns = {"omega_e_over_gamma", "fidelity", "error_estimate"};
  r.rows.resize(grid.size());
  if (workers == 0) workers = default_workers();
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    try {
      AverageResult a = lr_fidelity_averaged(PhysicalConfig::with_lande_ratio(grid[i], k, w), n_steps, mode, 1);
      r.rows[i] = {{grid[i], a.mean, a.error_estimate}, ""};
    } catch (const QuadratureError& e) {
      r.rows[i] = {{grid[i], std::nan(""), std::nan("")}, e.what()};
    } catch (const NonFiniteSampleError& e) {
      r.rows[i] = {{grid[i], std::nan(""), std::nan("")}, e.what()};
    }
  });
  r.passed = !r.has_failures();
  return r;
}

SweepResult cmd_merkulov(const std::vector<double>& t_grid, double w, int gh_nodes, std::size_t mc_samples,
                         std::uint64_t seed, unsigned workers) {
  std::vector<double> grid = t_grid;
  require_sorted_grid(grid, "t");
  for (double t : grid)
    if (t < 0) throw UsageError("t values must be nonnegative");
  if (!(w > 0)) throw UsageError("w must be positive");
  AverageSpec gh{GaussHermiteMode{gh_nodes}, {w, {0.0, 0.0, 0.0}}};
  AverageSpec mc{MonteCarloMode{mc_samples, seed}, {w, {0.0, 0.0, 0.0}}};
  try {
    gh.validate();
    mc.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  SweepResult r = start("merkulov");
  r.parameters = {{"t", join(grid)}, {"w", format_double(w)}, {"gh-nodes", std::to_string(gh_nodes)},
                  {"mc-samples", std::to_string(mc_samples)}};
  r.seed = seed;
  r.columns = {"t", "closed_form", "quadrature", "monte_carlo", "monte_carlo_error"};
  r.rows.resize(grid.size());
  if (workers == 0) workers = default_workers();
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    double t = grid[i];
    auto fn = [t](const MagneticSample& s) { return sz_single_sample(t, s); };
    AverageResult q = gaussian_average(fn, gh, 0.0, 1);
    AverageResult m = gaussian_average(fn, mc, 0.0, 1);
    r.rows[i] = {{t, merkulov_sz(t, w), q.mean, m.mean, m.error_estimate}, ""};
  });
  return r;
}

SweepResult cmd_oracle_check(OracleScenario scenario, const std::vector<double>& delta_t_ladder,
                             const OracleSetup& setup, double threshold) {
  if (delta_t_ladder.empty()) throw UsageError("empty delta-t ladder");
  SweepResult r = start("oracle-check");
  const MagneticSample& s = setup.sample;
  r.parameters = {{"scenario", to_string(scenario)},
                  {"delta-t", join(delta_t_ladder)},
                  {"omega-g", format_double(s.omega_g)},
                  {"omega-e", format_double(s.omega_e)},
                  {"n", format_double(s.n[0]) + ";" + format_double(s.n[1]) + ";" + format_double(s.n[2])},
                  {"t1", format_double(setup.t1)},
                  {"big-gamma", format_double(setup.big_gamma)},
                  {"threshold", format_double(threshold)}};
  r.columns = {"delta_t", "max_discrepancy"};
  auto runner = [&](double dt) { return oracle_discrepancy(scenario, setup, dt); };
  std::vector<double> disc;
  if (scenario == OracleScenario::Vacuum) {
    for (double dt : delta_t_ladder) disc.push_back(runner(dt));
    r.passed = std::all_of(disc.begin(), disc.end(), [&](double d) { return d < threshold; });
    r.notes.push_back("order not applicable");
  } else {
    ConvergenceReport rep;
    try {
      rep = convergence_study(runner, delta_t_ladder);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    disc = rep.discrepancy;
    r.notes.push_back("order=" + format_double(rep.order));
    if (!rep.defined) r.notes.push_back("order undefined");
    if (!rep.monotone) r.notes.push_back("non-monotone discrepancy sequence");
    r.passed = rep.defined && rep.order >= 0.9 && disc.back() < threshold;
  }
  for (std::size_t i = 0; i < disc.size(); ++i) r.rows.push_back({{delta_t_ladder[i], disc[i]}, ""});
  r.notes.push_back(std::string("verdict=") + (r.passed ? "pass" : "fail"));
  return r;
}

}  // namespace qdspi
