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

// Transmon / resonator device model.
//
// Each transmon is diagonalized in the charge basis at zero gate offset and
// truncated to its lowest `kept_levels` eigenstates; the resonator is a
// truncated Fock ladder. The coupled system lives on the tensor product
// (resonator, T0, T1, ...) in that order, and every flat index is produced by
// BasisIndexer.
//
// All energies are in GHz (E/2pi convention); nothing in this module carries
// the 2pi factor.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crsim/common.hpp"

namespace crsim {

struct TransmonSpec {
    double charging_energy_ghz = 0.0;  // E_C
    double josephson_energy_ghz = 0.0; // E_J
    int charge_cutoff = 15;            // charge basis n in [-N_c, N_c]
    int kept_levels = 4;

    void validate() const;
};

struct ResonatorSpec {
    double frequency_ghz = 0.0;
    int kept_levels = 4;

    void validate() const;
};

struct DeviceSpec {
    std::string name;
    std::vector<TransmonSpec> transmons;
    ResonatorSpec resonator;
    std::vector<double> couplings_ghz; // G_i, one per transmon

    void validate() const;
    std::size_t num_transmons() const { return transmons.size(); }
};

enum class Gauge {
    /// Each eigenvector's largest-magnitude charge component is real positive.
    LargestComponentPositive,
};

struct EigenSolution {
    Eigen::VectorXd energies;      // ascending, energies(0) == 0
    Eigen::MatrixXd charge_matrix; // <m|n|m'> in the kept eigenbasis
    Gauge gauge = Gauge::LargestComponentPositive;

    int levels() const { return static_cast<int>(energies.size()); }
};

EigenSolution diagonalize_transmon(const TransmonSpec& spec);

double qubit_frequency(const EigenSolution& sol);
double anharmonicity(const EigenSolution& sol);

struct ConvergenceStep {
    int from_cutoff = 0;
    int to_cutoff = 0;
    double max_level_shift_ghz = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceStep> steps;
    double worst() const;
};

/// Max |dE_m| over kept levels between successive cutoffs (ascending list).
ConvergenceReport convergence_check(const TransmonSpec& spec, const std::vector<int>& cutoffs);

/// Bijection between flat indices and slot labels (k, m_0, m_1, ...).
/// Slot 0 is the resonator; slot i + 1 is transmon i. The last slot varies
/// fastest.
class BasisIndexer {
public:
    BasisIndexer() = default;
    explicit BasisIndexer(std::vector<int> slot_dims);

    std::size_t dimension() const { return dimension_; }
    std::size_t num_slots() const { return dims_.size(); }
    std::size_t num_transmons() const { return dims_.empty() ? 0 : dims_.size() - 1; }
    int slot_dim(std::size_t slot) const { return dims_.at(slot); }
    std::size_t stride(std::size_t slot) const { return strides_.at(slot); }

    std::size_t flat(const std::vector<int>& labels) const;
    std::vector<int> labels(std::size_t flat) const;
    int label(std::size_t flat, std::size_t slot) const
    {
        return static_cast<int>((flat / strides_[slot]) % static_cast<std::size_t>(dims_[slot]));
    }

    bool is_computational(std::size_t flat) const;

    /// Flat indices of the computational subspace ordered by bitstring, with
    /// transmon 0 as the most significant bit.
    const std::vector<std::size_t>& computational() const { return computational_; }

    /// Flat index of a computational bitstring such as "101".
    std::size_t from_bitstring(const std::string& bits) const;
    std::string bitstring(std::size_t computational_position) const;

private:
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::size_t dimension_ = 0;
    std::vector<std::size_t> computational_;
};

struct SystemOperators {
    DeviceSpec device;
    BasisIndexer indexer;

    std::vector<EigenSolution> transmons; // per-transmon eigenbasis data
    Eigen::VectorXd resonator_energies;   // k * omega_R
    Eigen::MatrixXd resonator_quadrature; // a + a^dagger, truncated

    Eigen::VectorXd static_diagonal;           // H_0
    std::vector<Eigen::MatrixXcd> drive_ops;   // n_i embedded
    Eigen::MatrixXcd interaction;              // sum_i G_i (a + a^dagger) n_i

    std::size_t dimension() const { return indexer.dimension(); }
    std::size_t num_transmons() const { return transmons.size(); }

    /// Dense H_0 + H_int.
    Eigen::MatrixXcd static_hamiltonian() const;
};

inline constexpr std::size_t kDefaultDimensionCap = 1024;

SystemOperators build_system(const DeviceSpec& device, std::size_t dimension_cap = kDefaultDimensionCap);

/// Truncated a + a^dagger on `levels` Fock states.
Eigen::MatrixXd truncated_quadrature(int levels);

} // namespace crsim
