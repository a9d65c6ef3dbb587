// Copyright 2026 The crsim Authors
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

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace crsim {

using cplx = std::complex<double>;

/// Energies are carried in GHz (cycles per ns); multiply by this before
/// exponentiating against a time in ns.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Malformed or inconsistent input: bad device/pulse specs, bad indices.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown: eigensolver failure, NaN propagation, guard trips.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Largest entry of |A - A^dagger|.
inline double hermiticity_defect(const Eigen::MatrixXcd& a)
{
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace crsim
