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

#ifndef QDSPI_EXPSUM_HPP_
#define QDSPI_EXPSUM_HPP_

// Exact integrals of complex exponentials, written to stay finite and accurate for
// small and large arguments.

#include "qdspi/params.hpp"

namespace qdspi {

/// (e^z - 1) / z, continuous at z = 0.
cplx phi1(cplx z);

/// Integral of e^{z s} over [0, T].
cplx exp_integral(cplx z, double T);

/// e^{eps T} times the integral of e^{c s} over [0, T].  Finite whenever Re(eps) <= 0
/// and Re(eps + c) <= 0, even if Re(c) > 0.
cplx shifted_exp_integral(cplx eps, cplx c, double T);

/// Integral over 0 <= u <= s <= T of e^{a s + c u}.  Requires Re(a) <= 0 and Re(a + c) <= 0.
cplx nested_exp_integral(cplx a, cplx c, double T);

}  // namespace qdspi

#endif  // QDSPI_EXPSUM_HPP_
