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

#include "crsim/device.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crsim {

void TransmonSpec::validate() const
{
    if (!(charging_energy_ghz > 0.0))
        throw InputError("transmon: charging energy must be positive");
    // E_J == 0 is accepted: it is the pure charging limit used for checks.
    if (!(josephson_energy_ghz >= 0.0))
        throw InputError("transmon: Josephson energy must be non-negative");
    if (charge_cutoff < 5)
        throw InputError("transmon: charge cutoff must be at least 5");
    if (kept_levels < 1 || kept_levels > 2 * charge_cutoff + 1 - 2) {
        std::ostringstream msg;
        msg << "transmon: kept_levels=" << kept_levels << " needs headroom below the "
            << 2 * charge_cutoff + 1 << "-dimensional charge basis";
        throw InputError(msg.str());
    }
}

void ResonatorSpec::validate() const
{
    if (!(frequency_ghz > 0.0))
        throw InputError("resonator: frequency must be positive");
    if (kept_levels < 2)
        throw InputError("resonator: at least two Fock levels are required");
}

void DeviceSpec::validate() const
{
    if (transmons.empty())
        throw InputError("device: no transmons");
    for (const auto& t : transmons)
        t.validate();
    resonator.validate();
    if (couplings_ghz.size() != transmons.size())
        throw InputError("device: couplings_GHz length must equal the transmon count");
    for (double g : couplings_ghz)
        if (!std::isfinite(g))
            throw InputError("device: non-finite coupling");
}

EigenSolution diagonalize_transmon(const TransmonSpec& spec)
{
    spec.validate();
    const int nc = spec.charge_cutoff;
    const int dim = 2 * nc + 1;

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd charge(dim);
    for (int i = 0; i < dim; ++i) {
        const double n = i - nc;
        charge(i) = n;
        h(i, i) = 4.0 * spec.charging_energy_ghz * n * n;
        if (i + 1 < dim) {
            h(i, i + 1) = -0.5 * spec.josephson_energy_ghz;
            h(i + 1, i) = -0.5 * spec.josephson_energy_ghz;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericalError("transmon eigensolve did not converge");

    const int kept = spec.kept_levels;
    Eigen::MatrixXd vecs = solver.eigenvectors().leftCols(kept);
    for (int m = 0; m < kept; ++m) {
        Eigen::Index arg = 0;
        vecs.col(m).cwiseAbs().maxCoeff(&arg);
        if (vecs(arg, m) < 0.0)
            vecs.col(m) *= -1.0;
    }

    EigenSolution sol;
    sol.energies = solver.eigenvalues().head(kept).array() - solver.eigenvalues()(0);
    sol.charge_matrix = vecs.transpose() * charge.asDiagonal() * vecs;
    sol.gauge = Gauge::LargestComponentPositive;
    return sol;
}

double qubit_frequency(const EigenSolution& sol)
{
    if (sol.levels() < 2)
        throw InputError("qubit_frequency needs at least two levels");
    return sol.energies(1) - sol.energies(0);
}

double anharmonicity(const EigenSolution& sol)
{
    if (sol.levels() < 3)
        throw InputError("anharmonicity needs at least three levels");
    return (sol.energies(2) - sol.energies(1)) - (sol.energies(1) - sol.energies(0));
}

double ConvergenceReport::worst() const
{
    double w = 0.0;
    for (const auto& s : steps)
        w = std::max(w, s.max_level_shift_ghz);
    return w;
}

ConvergenceReport convergence_check(const TransmonSpec& spec, const std::vector<int>& cutoffs)
{
    if (!std::is_sorted(cutoffs.begin(), cutoffs.end()))
        throw InputError("convergence_check: cutoffs must be ascending");
    ConvergenceReport report;
    EigenSolution prev;
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        TransmonSpec s = spec;
        s.charge_cutoff = cutoffs[i];
        EigenSolution cur = diagonalize_transmon(s);
        if (i > 0) {
            report.steps.push_back({cutoffs[i - 1], cutoffs[i],
                                    (cur.energies - prev.energies).cwiseAbs().maxCoeff()});
        }
        prev = std::move(cur);
    }
    return report;
}

BasisIndexer::BasisIndexer(std::vector<int> slot_dims) : dims_(std::move(slot_dims))
{
    if (dims_.empty())
        throw InputError("BasisIndexer: no slots");
    strides_.assign(dims_.size(), 1);
    dimension_ = 1;
    for (std::size_t s = dims_.size(); s-- > 0;) {
        if (dims_[s] < 1)
            throw InputError("BasisIndexer: slot dimension must be positive");
        strides_[s] = dimension_;
        dimension_ *= static_cast<std::size_t>(dims_[s]);
    }
    for (std::size_t j = 0; j < dimension_; ++j)
        if (is_computational(j))
            computational_.push_back(j);
}

std::size_t BasisIndexer::flat(const std::vector<int>& labels) const
{
    if (labels.size() != dims_.size())
        throw InputError("BasisIndexer: label count mismatch");
    std::size_t j = 0;
    for (std::size_t s = 0; s < dims_.size(); ++s) {
        if (labels[s] < 0 || labels[s] >= dims_[s])
            throw InputError("BasisIndexer: label out of range");
        j += strides_[s] * static_cast<std::size_t>(labels[s]);
    }
    return j;
}

std::vector<int> BasisIndexer::labels(std::size_t flat) const
{
    if (flat >= dimension_)
        throw InputError("BasisIndexer: flat index out of range");
    std::vector<int> out(dims_.size());
    for (std::size_t s = 0; s < dims_.size(); ++s)
        out[s] = label(flat, s);
    return out;
}

bool BasisIndexer::is_computational(std::size_t flat) const
{
    if (label(flat, 0) != 0)
        return false;
    for (std::size_t s = 1; s < dims_.size(); ++s)
        if (label(flat, s) > 1)
            return false;
    return true;
}

std::size_t BasisIndexer::from_bitstring(const std::string& bits) const
{
    if (bits.size() != num_transmons())
        throw InputError("bitstring '" + bits + "' does not match the transmon count");
    std::vector<int> labels(dims_.size(), 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1')
            throw InputError("bitstring '" + bits + "' must contain only 0/1");
        labels[i + 1] = bits[i] - '0';
    }
    return flat(labels);
}

std::string BasisIndexer::bitstring(std::size_t computational_position) const
{
    const std::size_t n = num_transmons();
    std::string out(n, '0');
    for (std::size_t i = 0; i < n; ++i)
        if ((computational_position >> (n - 1 - i)) & 1U)
            out[i] = '1';
    return out;
}

Eigen::MatrixXd truncated_quadrature(int levels)
{
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(levels, levels);
    for (int k = 0; k + 1 < levels; ++k) {
        x(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
        x(k + 1, k) = x(k, k + 1);
    }
    return x;
}

namespace {

// Embed a slot-local operator into the full product space.
Eigen::MatrixXcd embed(const BasisIndexer& idx, const std::vector<const Eigen::MatrixXd*>& factors)
{
    const std::size_t dim = idx.dimension();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            double v = 1.0;
            for (std::size_t s = 0; s < idx.num_slots() && v != 0.0; ++s) {
                const int lr = idx.label(r, s);
                const int lc = idx.label(c, s);
                if (factors[s] == nullptr)
                    v = (lr == lc) ? v : 0.0;
                else
                    v *= (*factors[s])(lr, lc);
            }
            out(r, c) = v;
        }
    }
    return out;
}

} // namespace

SystemOperators build_system(const DeviceSpec& device, std::size_t dimension_cap)
{
    device.validate();

    std::vector<int> dims{device.resonator.kept_levels};
    for (const auto& t : device.transmons)
        dims.push_back(t.kept_levels);

    std::size_t dim = 1;
    for (int d : dims)
        dim *= static_cast<std::size_t>(d);
    if (dim > dimension_cap) {
        std::ostringstream msg;
        msg << "build_system: dimension " << dim << " exceeds cap " << dimension_cap;
        throw InputError(msg.str());
    }

    SystemOperators ops;
    ops.device = device;
    ops.indexer = BasisIndexer(dims);
    for (const auto& t : device.transmons)
        ops.transmons.push_back(diagonalize_transmon(t));

    const int res_levels = device.resonator.kept_levels;
    ops.resonator_energies = Eigen::VectorXd::LinSpaced(res_levels, 0.0, res_levels - 1.0) *
                             device.resonator.frequency_ghz;
    ops.resonator_quadrature = truncated_quadrature(res_levels);

    const auto& idx = ops.indexer;
    ops.static_diagonal.resize(static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        double e = ops.resonator_energies(idx.label(j, 0));
        for (std::size_t i = 0; i < ops.transmons.size(); ++i)
            e += ops.transmons[i].energies(idx.label(j, i + 1));
        ops.static_diagonal(static_cast<Eigen::Index>(j)) = e;
    }

    const std::size_t nt = ops.transmons.size();
    ops.interaction = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < nt; ++i) {
        std::vector<const Eigen::MatrixXd*> factors(idx.num_slots(), nullptr);
        factors[i + 1] = &ops.transmons[i].charge_matrix;
        ops.drive_ops.push_back(embed(idx, factors));

        if (device.couplings_ghz[i] != 0.0) {
            factors[0] = &ops.resonator_quadrature;
            ops.interaction += device.couplings_ghz[i] * embed(idx, factors);
        }
    }
    return ops;
}

Eigen::MatrixXcd SystemOperators::static_hamiltonian() const
{
    Eigen::MatrixXcd h = interaction;
    h.diagonal() += static_diagonal.cast<cplx>();
    return h;
}

} // namespace crsim
