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

#ifndef QDSPI_KRAUS_HPP_
#define QDSPI_KRAUS_HPP_

#include <stdexcept>

#include <Eigen/Core>

#include "qdspi/params.hpp"

namespace qdspi {

/// 4x4 operator in the basis (up g, down g, up e, down e).
using EmitterOperator = Eigen::Matrix4cd;
using SpinOperator = Eigen::Matrix2cd;

inline constexpr int kUpG = 0;
inline constexpr int kDownG = 1;
inline constexpr int kUpE = 2;
inline constexpr int kDownE = 3;

inline int emitter_index(Spin s, bool excited) { return (excited ? 2 : 0) + static_cast<int>(s); }

class TruncationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

EmitterOperator magnetic_hamiltonian(const MagneticSample& sample);

/// exp(-i Omega_g t n.sigma / 2).
SpinOperator ground_propagator(double t, const MagneticSample& sample);

/// exp(-i Omega_e t sigma_x / 2).
SpinOperator excited_rotation(double t, double omega_e);

EmitterOperator no_jump(double t, const MagneticSample& sample);
EmitterOperator jump_minus(Polarization pol);
EmitterOperator jump_plus(Polarization pol);

/// One collision on emitter x bin_R x bin_L with bin occupations truncated to {0, 1}.
class CollisionUnitary {
 public:
  using Matrix = Eigen::Matrix<cplx, 16, 16>;

  CollisionUnitary(double delta_t, const Matrix& m) : delta_t_(delta_t), m_(m) {}

  static int index(int emitter, int n_r, int n_l) { return emitter * 4 + n_r * 2 + n_l; }

  double delta_t() const { return delta_t_; }
  const Matrix& matrix() const { return m_; }

  /// Emitter operator taking bin occupation (in_r, in_l) to (out_r, out_l).
  EmitterOperator block(int out_r, int out_l, int in_r, int in_l) const;

 private:
  double delta_t_;
  Matrix m_;
};

/// Exact exponential of -i dt (H_s + V_n) with coupling sqrt(gamma / dt).  Requires
/// 0 < gamma dt <= 0.01, otherwise throws TruncationError.
CollisionUnitary collision_unitary(double delta_t, const MagneticSample& sample);

}  // namespace qdspi

#endif  // QDSPI_KRAUS_HPP_
