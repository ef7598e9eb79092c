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

#ifndef QDSPI_SWEEP_HPP_
#define QDSPI_SWEEP_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qdspi/averaging.hpp"
#include "qdspi/oracle.hpp"

namespace qdspi {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SweepRow {
  std::vector<double> values;
  /// Empty when the row succeeded.
  std::string failure;
};

struct SweepResult {
  std::string command;
  /// Effective parameters as (name, canonical value) pairs.
  std::vector<std::pair<std::string, std::string>> parameters;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> columns;
  std::vector<SweepRow> rows;
  std::vector<std::string> notes;
  std::string timestamp;
  /// Set by commands with a pass/fail verdict.
  bool passed = true;

  bool has_failures() const;
  /// FNV-1a of the command, parameters and seed.
  std::string config_hash() const;
  /// Everything written by write_csv except the timestamp line.
  std::string body() const;
  void write_csv(std::ostream& os) const;
};

/// Formats a double with 17 significant digits.
std::string format_double(double x);

/// Parses "gh:<nodes>" or "mc:<samples>"; the seed is attached to Monte Carlo modes.
AverageMode parse_average_mode(const std::string& text, std::uint64_t seed);
std::string to_string(const AverageMode& mode);

/// Reads a key=value file; blank lines and lines starting with '#' are ignored.
std::map<std::string, std::string> read_config_file(const std::string& path);

SweepResult cmd_pns_sweep(const std::vector<double>& w_grid);

SweepResult cmd_cz_sweep(const std::vector<double>& big_gamma_grid, double omega, double w, const AverageMode& mode,
                         unsigned workers = 0);

SweepResult cmd_lr_sweep(const std::vector<double>& omega_e_grid, double k, double w, int n_steps,
                         const AverageMode& mode, unsigned workers = 0);

SweepResult cmd_merkulov(const std::vector<double>& t_grid, double w, int gh_nodes, std::size_t mc_samples,
                         std::uint64_t seed, unsigned workers = 0);

SweepResult cmd_oracle_check(OracleScenario scenario, const std::vector<double>& delta_t_ladder,
                             const OracleSetup& setup, double threshold);

}  // namespace qdspi

#endif  // QDSPI_SWEEP_HPP_
