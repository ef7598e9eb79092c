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

#ifndef QDSPI_AVERAGING_HPP_
#define QDSPI_AVERAGING_HPP_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <variant>

#include "qdspi/params.hpp"

namespace qdspi {

struct GaussHermiteMode {
  int nodes_per_axis = 15;
};

struct MonteCarloMode {
  std::size_t n_samples = 10000;
  std::uint64_t seed = 0;
};

using AverageMode = std::variant<GaussHermiteMode, MonteCarloMode>;

struct AverageSpec {
  AverageMode mode = GaussHermiteMode{};
  OverhauserDistribution distribution;

  void validate() const;
};

struct AverageResult {
  double mean = 0.0;
  /// Node-refinement difference for quadrature, standard error for Monte Carlo.
  double error_estimate = 0.0;
};

class NonFiniteSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using SampleFunction = std::function<double(const MagneticSample&)>;

/// Worker count from QDSPI_THREADS, defaulting to 1.
unsigned default_workers();

/// Calls fn(i) for i in [0, n) over contiguous chunks on up to `workers` threads and
/// rethrows the first failure in index order.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

/// Average of fn over the Gaussian Overhauser distribution.  Gauss-Hermite mode uses a
/// Cartesian tensor rule and estimates the error from the rule with two fewer nodes per
/// axis.  The result is bit-identical for any worker count.
AverageResult gaussian_average(const SampleFunction& fn, const AverageSpec& spec, double omega_e,
                               unsigned workers = 0);

/// Frozen-field electron polarization averaged over an isotropic distribution.
double merkulov_sz(double t, double w);

/// Polarization of a spin starting along z after precessing for time t.
double sz_single_sample(double t, const MagneticSample& sample);

/// The same average as merkulov_sz by quadrature in spherical coordinates.
double merkulov_sz_spherical(double t, double w);

}  // namespace qdspi

#endif  // QDSPI_AVERAGING_HPP_
