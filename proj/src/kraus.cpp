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

#include "qdspi/kraus.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace qdspi {

namespace {

const cplx kI(0.0, 1.0);

SpinOperator n_dot_sigma(const Vec3& n) {
  SpinOperator m;
  m << n[2], cplx(n[0], -n[1]), cplx(n[0], n[1]), -n[2];
  return m;
}

}  // namespace

EmitterOperator magnetic_hamiltonian(const MagneticSample& sample) {
  EmitterOperator h = EmitterOperator::Zero();
  h.block<2, 2>(0, 0) = 0.5 * sample.omega_g * n_dot_sigma(sample.n);
  h(kUpE, kDownE) = h(kDownE, kUpE) = 0.5 * sample.omega_e;
  return h;
}

SpinOperator ground_propagator(double t, const MagneticSample& sample) {
  double a = 0.5 * sample.omega_g * t;
  return std::cos(a) * SpinOperator::Identity() - kI * std::sin(a) * n_dot_sigma(sample.n);
}

SpinOperator excited_rotation(double t, double omega_e) {
  double a = 0.5 * omega_e * t;
  SpinOperator m;
  m << std::cos(a), -kI * std::sin(a), -kI * std::sin(a), std::cos(a);
  return m;
}

EmitterOperator no_jump(double t, const MagneticSample& sample) {
  if (t < 0) throw std::domain_error("no_jump requires t >= 0");
  EmitterOperator k = EmitterOperator::Zero();
  k.block<2, 2>(0, 0) = ground_propagator(t, sample);
  k.block<2, 2>(2, 2) = std::exp(-0.5 * kGamma * t) * excited_rotation(t, sample.omega_e);
  return k;
}

EmitterOperator jump_minus(Polarization pol) {
  EmitterOperator j = EmitterOperator::Zero();
  if (pol == Polarization::R)
    j(kUpG, kUpE) = std::sqrt(kGamma);
  else
    j(kDownG, kDownE) = std::sqrt(kGamma);
  return j;
}

EmitterOperator jump_plus(Polarization pol) { return -jump_minus(pol).adjoint(); }

EmitterOperator CollisionUnitary::block(int out_r, int out_l, int in_r, int in_l) const {
  EmitterOperator b;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) b(i, j) = m_(index(i, out_r, out_l), index(j, in_r, in_l));
  return b;
}

CollisionUnitary collision_unitary(double delta_t, const MagneticSample& sample) {
  if (!(delta_t > 0) || kGamma * delta_t > 0.01)
    throw TruncationError("collision step must satisfy 0 < gamma*dt <= 0.01");
  using Matrix = CollisionUnitary::Matrix;
  const double kappa = std::sqrt(kGamma / delta_t);

  Matrix h = Matrix::Zero();
  EmitterOperator hs = magnetic_hamiltonian(sample);
  for (int nr = 0; nr < 2; ++nr)
    for (int nl = 0; nl < 2; ++nl)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h(CollisionUnitary::index(i, nr, nl), CollisionUnitary::index(j, nr, nl)) = hs(i, j);
  // i kappa (|up g><up e| b_R^dag + |down g><down e| b_L^dag) + h.c.
  for (int other = 0; other < 2; ++other) {
    int from = CollisionUnitary::index(kUpE, 0, other);
    int to = CollisionUnitary::index(kUpG, 1, other);
    h(to, from) += kI * kappa;
    h(from, to) += -kI * kappa;
    from = CollisionUnitary::index(kDownE, other, 0);
    to = CollisionUnitary::index(kDownG, other, 1);
    h(to, from) += kI * kappa;
    h(from, to) += -kI * kappa;
  }

  // The excitation number is conserved, so exponentiate block by block.
  Matrix u = Matrix::Zero();
  for (int nexc = 0; nexc <= 3; ++nexc) {
    std::vector<int> idx;
    for (int k = 0; k < 16; ++k) {
      int e = k / 4 >= 2 ? 1 : 0;
      int nr = (k / 2) % 2;
      int nl = k % 2;
      if (e + nr + nl == nexc) idx.push_back(k);
    }
    int d = static_cast<int>(idx.size());
    Eigen::MatrixXcd sub(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) sub(a, b) = h(idx[a], idx[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
    Eigen::VectorXcd phase = (-kI * delta_t * es.eigenvalues().cast<cplx>()).array().exp();
    Eigen::MatrixXcd expo = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) u(idx[a], idx[b]) = expo(a, b);
  }
  return CollisionUnitary(delta_t, u);
}

}  // namespace qdspi
