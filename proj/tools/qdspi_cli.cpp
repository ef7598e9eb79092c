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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdspi/protocols.hpp"
#include "qdspi/sweep.hpp"

namespace {

using qdspi::UsageError;

constexpr int kExitOk = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitUsage = 2;

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

std::vector<double> logspace(const std::vector<double>& spec) {
  if (spec.size() != 3 || !(spec[0] > 0) || !(spec[1] > 0) || spec[2] < 2 || spec[2] != std::floor(spec[2]))
    throw UsageError("log grids are given as lo,hi,count with count >= 2");
  std::vector<double> out;
  int n = static_cast<int>(spec[2]);
  for (int i = 0; i < n; ++i)
    out.push_back(std::exp(std::log(spec[0]) + (std::log(spec[1]) - std::log(spec[0])) * i / (n - 1)));
  return out;
}

std::vector<double> pick_grid(const std::vector<double>& list, const std::vector<double>& log_spec,
                              const std::string& name) {
  if (!list.empty() && !log_spec.empty()) throw UsageError("give either --" + name + " or --" + name + "-log");
  if (!log_spec.empty()) return logspace(log_spec);
  if (list.empty()) throw UsageError("missing --" + name + " grid");
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fidelity sweeps and oracle checks for quantum-dot spin-photon interfaces"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string avg_text = "gh:15";
  app.add_option("--config", config_path, "key=value file; command-line flags take precedence");
  app.add_option("--seed", seed, "seed for Monte Carlo modes");
  app.add_option("--out", out_path, "output CSV path (default stdout)");
  app.add_option("--avg", avg_text, "averaging mode gh:<nodes> or mc:<samples>");

  auto* pns = app.add_subcommand("pns-sweep", "averaged photon-number-superposition fidelity vs w");
  std::vector<double> pns_w, pns_w_log;
  pns->add_option("--w", pns_w, "w/gamma values")->delimiter(',');
  pns->add_option("--w-log", pns_w_log, "lo,hi,count")->delimiter(',');

  auto* cz = app.add_subcommand("cz-sweep", "averaged controlled-Z fidelity vs input bandwidth");
  std::vector<double> cz_g, cz_g_log;
  double cz_omega = 1e-3, cz_w = 0.0;
  cz->add_option("--big-gamma", cz_g, "bandwidth values")->delimiter(',');
  cz->add_option("--big-gamma-log", cz_g_log, "lo,hi,count")->delimiter(',');
  cz->add_option("--omega", cz_omega, "omega_e = nominal omega_g");
  cz->add_option("--w", cz_w, "Overhauser width");

  auto* lr = app.add_subcommand("lr-sweep", "averaged cluster-state fidelity vs trion precession");
  std::vector<double> lr_om, lr_om_log;
  double lr_k = 2.0, lr_w = 0.0;
  int lr_n = 1;
  lr->add_option("--omega-e", lr_om, "omega_e values")->delimiter(',');
  lr->add_option("--omega-e-log", lr_om_log, "lo,hi,count")->delimiter(',');
  lr->add_option("--k", lr_k, "Lande ratio");
  lr->add_option("--w", lr_w, "Overhauser width");
  lr->add_option("--n-steps", lr_n, "number of photons (1 or 2)");

  auto* mk = app.add_subcommand("merkulov", "frozen-field spin polarization: closed form, quadrature, Monte Carlo");
  std::vector<double> mk_t, mk_t_log;
  double mk_w = 1.0;
  int mk_nodes = 31;
  std::size_t mk_samples = 100000;
  mk->add_option("--t", mk_t, "times")->delimiter(',');
  mk->add_option("--t-log", mk_t_log, "lo,hi,count")->delimiter(',');
  mk->add_option("--w", mk_w, "Overhauser width");
  mk->add_option("--gh-nodes", mk_nodes, "Gauss-Hermite nodes per axis");
  mk->add_option("--mc-samples", mk_samples, "Monte Carlo samples");

  auto* oc = app.add_subcommand("oracle-check", "collision-model convergence against the analytic amplitudes");
  std::string oc_scenario = "emission";
  std::vector<double> oc_dt = {4e-3, 2e-3, 1e-3, 5e-4};
  double oc_omega_e = 0.2, oc_k = 2.0, oc_w = 0.1, oc_gamma = 1.0, oc_threshold = 5e-3;
  std::uint64_t oc_index = 0;
  oc->add_option("--scenario", oc_scenario, "vacuum, emission, scattering, lr1 or lr2");
  oc->add_option("--delta-t", oc_dt, "step ladder")->delimiter(',');
  oc->add_option("--omega-e", oc_omega_e, "trion precession");
  oc->add_option("--k", oc_k, "Lande ratio");
  oc->add_option("--w", oc_w, "Overhauser width of the sampled field");
  oc->add_option("--sample-index", oc_index, "index of the sampled field in the seeded stream");
  oc->add_option("--big-gamma", oc_gamma, "input bandwidth for scattering");
  oc->add_option("--threshold", oc_threshold, "maximum final discrepancy");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // Fold config-file keys into the argument list unless the flag was given explicitly.
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      CLI::App* chosen = nullptr;
      for (const auto& a : args)
        for (CLI::App* sub : app.get_subcommands({}))
          if (sub->get_name() == a) chosen = sub;
      for (const auto& [key, value] : qdspi::read_config_file(config_path)) {
        std::string flag = "--" + key;
        if (key == "config" || flag_present(args, flag)) continue;
        bool known = app.get_option_no_throw(flag) != nullptr ||
                     (chosen != nullptr && chosen->get_option_no_throw(flag) != nullptr);
        if (!known) throw UsageError("unknown config key: " + key);
        args.push_back(flag);
        args.push_back(value);
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  qdspi::SweepResult result;
  try {
    auto mode_with_seed = [&]() {
      qdspi::AverageMode mode = qdspi::parse_average_mode(avg_text, seed.value_or(0));
      if (std::holds_alternative<qdspi::MonteCarloMode>(mode) && !seed)
        throw UsageError("--seed is required for Monte Carlo averaging");
      return mode;
    };
    if (pns->parsed()) {
      result = qdspi::cmd_pns_sweep(pick_grid(pns_w, pns_w_log, "w"));
    } else if (cz->parsed()) {
      result = qdspi::cmd_cz_sweep(pick_grid(cz_g, cz_g_log, "big-gamma"), cz_omega, cz_w, mode_with_seed());
    } else if (lr->parsed()) {
      result = qdspi::cmd_lr_sweep(pick_grid(lr_om, lr_om_log, "omega-e"), lr_k, lr_w, lr_n, mode_with_seed());
    } else if (mk->parsed()) {
      if (!seed) throw UsageError("--seed is required (the Monte Carlo column is always computed)");
      result = qdspi::cmd_merkulov(pick_grid(mk_t, mk_t_log, "t"), mk_w, mk_nodes, mk_samples, *seed);
    } else if (oc->parsed()) {
      qdspi::OracleScenario scenario;
      try {
        scenario = qdspi::parse_oracle_scenario(oc_scenario);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (!(oc_omega_e > 0) || !(oc_k > 0) || !(oc_w >= 0)) throw UsageError("bad oracle sample parameters");
      qdspi::OverhauserDistribution dist{oc_w, {oc_k * oc_omega_e, 0.0, 0.0}};
      qdspi::OracleSetup setup;
      setup.sample = qdspi::sample_magnetic(dist, oc_omega_e, seed.value_or(0), oc_index);
      setup.t1 = qdspi::lr_step_time(oc_k * oc_omega_e);
      setup.big_gamma = oc_gamma;
      result = qdspi::cmd_oracle_check(scenario, oc_dt, setup, oc_threshold);
      result.seed = seed.value_or(0);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qdspi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitThreshold;
  }

  result.timestamp = utc_timestamp();
  if (out_path.empty()) {
    result.write_csv(std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kExitUsage;
    }
    result.write_csv(out);
  }
  return result.passed && !result.has_failures() ? kExitOk : kExitThreshold;
}
