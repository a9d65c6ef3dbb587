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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "crsim/device.hpp"
#include "crsim/propagation.hpp"

namespace crsim {

/// Target unitary on the computational subspace, ordered by bitstring with
/// transmon 0 as the most significant bit.
struct IdealGate {
    Eigen::MatrixXcd unitary;
    std::string label;
    std::size_t control = 0;
    std::size_t target = 0;
    std::size_t num_qubits = 0;
};

IdealGate ideal_cnot(std::size_t control, std::size_t target, std::size_t num_qubits);
IdealGate ideal_identity(std::size_t num_qubits);

/// R_Z(theta_i) on every transmon: phase e^{i theta_i m_i} for m_i in {0, 1}.
struct VzGate {
    std::vector<double> angles;

    /// Diagonal on the computational subspace.
    Eigen::VectorXcd diagonal() const;
};

struct ComposedGate {
    Eigen::MatrixXcd matrix; // Z * U_pulse restricted to the computational block
    std::vector<std::string> warnings;
};

/// Computational rows and columns of a propagator.
Eigen::MatrixXcd computational_block(const Propagator& prop, const BasisIndexer& idx);

ComposedGate apply_vz(const VzGate& vz, const Propagator& prop, const BasisIndexer& idx);
Eigen::MatrixXcd apply_vz(const VzGate& vz, const Eigen::MatrixXcd& computational);

/// Counter-based Haar-random pure states: sample j depends only on (seed, j).
class HaarSampler {
public:
    explicit HaarSampler(std::uint64_t seed) : seed_(seed) {}
    Eigen::VectorXcd sample(std::uint64_t j, std::size_t dim) const;

private:
    std::uint64_t seed_;
};

struct FidelityReport {
    double fidelity = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> basis_labels;
    std::vector<double> success_probs;
    double leakage = 0.0;
    double resonator_excitation = 0.0;

    double mean_success() const;
};

/// F = (1/M) sum_j |<psi_j| U^dagger composed |psi_j>| over Haar states.
FidelityReport average_fidelity(const Eigen::MatrixXcd& composed, const IdealGate& ideal, std::size_t samples,
                                std::uint64_t seed);

/// The textbook (|Tr(U^dagger V)|^2 + Tr(V^dagger V)) / (d (d + 1)). A
/// separate diagnostic; not the quantity reported as F.
double standard_average_gate_fidelity(const Eigen::MatrixXcd& composed, const IdealGate& ideal);

/// p_b = |<U b| U_pulse |b>|^2 for each computational basis state b.
std::vector<double> success_probabilities(const Propagator& prop, const IdealGate& ideal, const BasisIndexer& idx);

struct LeakageDiagnostics {
    std::vector<double> leakage;    // per propagated column
    std::vector<double> resonator;  // per propagated column
    double mean_leakage() const;
    double mean_resonator() const;
};

LeakageDiagnostics leakage_diagnostics(const Propagator& prop, const BasisIndexer& idx);

/// Full report: VZ, Monte-Carlo F, success probabilities and diagnostics.
FidelityReport gate_report(const Propagator& prop, const VzGate& vz, const IdealGate& ideal,
                           const BasisIndexer& idx, std::size_t samples, std::uint64_t seed);

/// Sum with Neumaier compensation, fixed order.
double compensated_sum(const std::vector<double>& values);

} // namespace crsim
