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

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

namespace qdspi {
namespace {

const cplx kI(0, 1);

MagneticSample noisy() { return MagneticSample::from_angles(0.37, 0.21, 1.1, 0.6); }

double spectral_norm(const EmitterOperator& m) {
  Eigen::JacobiSVD<EmitterOperator> svd(m);
  return svd.singularValues()(0);
}

// Swaps up and down in both manifolds.
EmitterOperator flip() {
  EmitterOperator p = EmitterOperator::Zero();
  p(kUpG, kDownG) = p(kDownG, kUpG) = p(kUpE, kDownE) = p(kDownE, kUpE) = 1;
  return p;
}

TEST(Hamiltonian, ZeroField) {
  MagneticSample s;
  s.omega_g = 0;
  s.omega_e = 0;
  EXPECT_EQ(magnetic_hamiltonian(s), EmitterOperator::Zero());
}

TEST(Hamiltonian, PauliZ) {
  MagneticSample s = MagneticSample::from_angles(2.0, 0.3, 0.0, 0.0);
  EmitterOperator h = magnetic_hamiltonian(s);
  EmitterOperator want = EmitterOperator::Zero();
  want(0, 0) = 1;
  want(1, 1) = -1;
  want(2, 3) = want(3, 2) = 0.15;
  EXPECT_LT((h - want).norm(), 1e-15);
}

TEST(Hamiltonian, HermitianWithGroundEigenvalues) {
  for (int i = 0; i < 20; ++i) {
    MagneticSample s = MagneticSample::from_angles(0.1 * (i + 1), 0.05 * i, 0.31 * i, 0.7 * i - 3);
    EmitterOperator h = magnetic_hamiltonian(s);
    EXPECT_LT((h - h.adjoint()).norm(), 1e-15);
    Eigen::SelfAdjointEigenSolver<SpinOperator> es(h.block<2, 2>(0, 0));
    EXPECT_NEAR(es.eigenvalues()(0), -s.omega_g / 2, 1e-14);
    EXPECT_NEAR(es.eigenvalues()(1), s.omega_g / 2, 1e-14);
  }
}

TEST(NoJump, IdentityAtZero) { EXPECT_LT((no_jump(0.0, noisy()) - EmitterOperator::Identity()).norm(), 1e-15); }

TEST(NoJump, PureDecay) {
  MagneticSample s;
  s.omega_g = 0;
  s.omega_e = 0;
  EmitterOperator k = no_jump(2.0, s);
  EmitterOperator want = EmitterOperator::Identity();
  want(2, 2) = want(3, 3) = std::exp(-1.0);
  EXPECT_LT((k - want).norm(), 1e-15);
}

TEST(NoJump, SpectralNormOne) {
  for (double t = 0; t <= 30; t += 0.75) EXPECT_NEAR(spectral_norm(no_jump(t, noisy())), 1.0, 1e-13) << t;
}

TEST(NoJump, MatchesNonHermitianExponential) {
  MagneticSample s = noisy();
  EmitterOperator gen = -kI * magnetic_hamiltonian(s);
  gen(2, 2) -= 0.5;
  gen(3, 3) -= 0.5;
  for (double t : {0.1, 1.0, 5.0}) {
    EmitterOperator e = (gen * t).exp();
    EXPECT_LT((no_jump(t, s) - e).norm(), 1e-13) << t;
  }
}

TEST(NoJump, NegativeTimeRejected) { EXPECT_THROW(no_jump(-1.0, noisy()), std::domain_error); }

TEST(Jumps, SelectionRules) {
  Eigen::Vector4cd up_e = Eigen::Vector4cd::Zero();
  up_e(kUpE) = 1;
  Eigen::Vector4cd out = jump_minus(Polarization::R) * up_e;
  EXPECT_EQ(out(kUpG), cplx(std::sqrt(kGamma)));
  EXPECT_EQ(out.norm(), 1.0);
  EXPECT_EQ((jump_minus(Polarization::L) * up_e).norm(), 0.0);
  Eigen::Vector4cd up_g = Eigen::Vector4cd::Zero();
  up_g(kUpG) = 1;
  EXPECT_EQ((jump_plus(Polarization::R) * up_g)(kUpE), cplx(-1.0));
}

TEST(Jumps, AlgebraAndAdjoint) {
  EmitterOperator s = jump_minus(Polarization::R).adjoint() * jump_minus(Polarization::R) +
                      jump_minus(Polarization::L).adjoint() * jump_minus(Polarization::L);
  EmitterOperator proj = EmitterOperator::Zero();
  proj(2, 2) = proj(3, 3) = kGamma;
  EXPECT_EQ(s, proj);
  for (Polarization p : kPolarizations) {
    EXPECT_EQ(jump_plus(p), EmitterOperator(-jump_minus(p).adjoint()));
    // Support only between the manifolds.
    EXPECT_EQ((jump_minus(p).block<2, 2>(0, 0).norm()), 0.0);
    EXPECT_EQ((jump_minus(p).block<2, 2>(2, 2).norm()), 0.0);
    EXPECT_EQ((jump_minus(p).block<2, 2>(2, 0).norm()), 0.0);
  }
}

TEST(Jumps, UpDownMirrorSymmetry) {
  EmitterOperator p = flip();
  EXPECT_EQ(EmitterOperator(p * jump_minus(Polarization::R) * p), jump_minus(Polarization::L));
  EXPECT_EQ(EmitterOperator(p * jump_plus(Polarization::L) * p), jump_plus(Polarization::R));
}

TEST(Collision, Unitary) {
  for (double dt : {1e-2, 1e-3, 1e-4}) {
    CollisionUnitary u = collision_unitary(dt, noisy());
    CollisionUnitary::Matrix id = CollisionUnitary::Matrix::Identity();
    EXPECT_LT((u.matrix().adjoint() * u.matrix() - id).cwiseAbs().maxCoeff(), 1e-12) << dt;
  }
}

TEST(Collision, MatchesDenseExponential) {
  const double dt = 4e-3;
  MagneticSample s = noisy();
  const double kappa = std::sqrt(1.0 / dt);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(16, 16);
  EmitterOperator hs = magnetic_hamiltonian(s);
  for (int r = 0; r < 2; ++r)
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) h(CollisionUnitary::index(i, r, l), CollisionUnitary::index(j, r, l)) = hs(i, j);
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(16, 16);
  for (int o = 0; o < 2; ++o) {
    c(CollisionUnitary::index(kUpG, 1, o), CollisionUnitary::index(kUpE, 0, o)) = kI * kappa;
    c(CollisionUnitary::index(kDownG, o, 1), CollisionUnitary::index(kDownE, o, 0)) = kI * kappa;
  }
  h += c + c.adjoint();
  Eigen::MatrixXcd want = (-kI * dt * h).exp();
  EXPECT_LT((collision_unitary(dt, s).matrix() - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Collision, ApproachesIdentity) {
  double prev = 1e9;
  for (double dt : {8e-3, 2e-3, 5e-4, 1.25e-4}) {
    double d = (collision_unitary(dt, noisy()).matrix() - CollisionUnitary::Matrix::Identity()).cwiseAbs().maxCoeff();
    EXPECT_LT(d, 1.1 * std::sqrt(dt));
    EXPECT_LT(d, prev / 1.9);
    prev = d;
  }
}

TEST(Collision, EmissionAndAbsorptionLimits) {
  MagneticSample s = noisy();
  for (Polarization p : kPolarizations) {
    int r = p == Polarization::R, l = 1 - r;
    double prev_abs = 1e9, prev_emit = 1e9;
    for (double dt : {4e-3, 2e-3, 1e-3, 5e-4}) {
      CollisionUnitary u = collision_unitary(dt, s);
      double e_abs = (u.block(0, 0, r, l) / std::sqrt(dt) - jump_plus(p)).norm();
      double e_emit = (u.block(r, l, 0, 0) / std::sqrt(dt) - jump_minus(p)).norm();
      EXPECT_LT(e_abs, prev_abs * 0.55);
      EXPECT_LT(e_emit, prev_emit * 0.55);
      prev_abs = e_abs;
      prev_emit = e_emit;
    }
    EXPECT_LT(prev_abs, 1e-3);
    EXPECT_LT(prev_emit, 1e-3);
  }
}

TEST(Collision, VacuumBlockIsNoJumpToSecondOrder) {
  MagneticSample s = noisy();
  std::vector<double> err;
  for (double dt : {8e-3, 4e-3, 2e-3, 1e-3}) err.push_back((collision_unitary(dt, s).block(0, 0, 0, 0) - no_jump(dt, s)).norm());
  for (std::size_t i = 1; i < err.size(); ++i) {
    double ratio = err[i - 1] / err[i];
    EXPECT_NEAR(ratio, 4.0, 0.3) << i;
  }
}

TEST(Kraus, CompletenessResidualIsSecondOrder) {
  MagneticSample s = noisy();
  std::vector<double> res;
  for (double dt : {8e-3, 4e-3, 2e-3, 1e-3}) {
    EmitterOperator k = no_jump(dt, s);
    EmitterOperator sum = k.adjoint() * k;
    for (Polarization p : kPolarizations) sum += dt * jump_minus(p).adjoint() * jump_minus(p);
    res.push_back((sum - EmitterOperator::Identity()).norm());
  }
  for (std::size_t i = 1; i < res.size(); ++i) EXPECT_NEAR(res[i - 1] / res[i], 4.0, 0.2);
  EXPECT_LT(res.back(), 1e-6);
}

TEST(Collision, MirrorSymmetry) {
  // Flipping the spin together with R and L maps the unitary onto the one for the mirrored field.
  MagneticSample s = noisy();
  MagneticSample m = s;
  m.n = {s.n[0], -s.n[1], -s.n[2]};
  const double dt = 2e-3;
  CollisionUnitary u = collision_unitary(dt, s), v = collision_unitary(dt, m);
  EmitterOperator p = flip();
  for (int orr = 0; orr < 2; ++orr)
    for (int ol = 0; ol < 2; ++ol)
      for (int ir = 0; ir < 2; ++ir)
        for (int il = 0; il < 2; ++il)
          EXPECT_LT((p * u.block(orr, ol, ir, il) * p - v.block(ol, orr, il, ir)).norm(), 1e-13);
}

TEST(Collision, RejectsInvalidStep) {
  EXPECT_THROW(collision_unitary(0.02, noisy()), TruncationError);
  EXPECT_THROW(collision_unitary(0.0, noisy()), TruncationError);
  EXPECT_THROW(collision_unitary(-1e-3, noisy()), TruncationError);
  EXPECT_NO_THROW(collision_unitary(0.01, noisy()));
}

}  // namespace
}  // namespace qdspi
