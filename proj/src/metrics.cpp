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

#include "crsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace crsim {

IdealGate ideal_cnot(std::size_t control, std::size_t target, std::size_t num_qubits)
{
    if (control >= num_qubits || target >= num_qubits || control == target)
        throw InputError("ideal_cnot: invalid control/target pair");
    const std::size_t dim = std::size_t{1} << num_qubits;
    const std::size_t cbit = std::size_t{1} << (num_qubits - 1 - control);
    const std::size_t tbit = std::size_t{1} << (num_qubits - 1 - target);

    IdealGate g;
    g.unitary = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        const std::size_t out = (b & cbit) ? (b ^ tbit) : b;
        g.unitary(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(b)) = 1.0;
    }
    g.label = "CNOT_" + std::to_string(control) + std::to_string(target);
    g.control = control;
    g.target = target;
    g.num_qubits = num_qubits;
    return g;
}

IdealGate ideal_identity(std::size_t num_qubits)
{
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
    IdealGate g;
    g.unitary = Eigen::MatrixXcd::Identity(dim, dim);
    g.label = "I";
    g.num_qubits = num_qubits;
    return g;
}

Eigen::VectorXcd VzGate::diagonal() const
{
    const std::size_t n = angles.size();
    const std::size_t dim = std::size_t{1} << n;
    Eigen::VectorXcd d(static_cast<Eigen::Index>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
        double phase = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if ((b >> (n - 1 - i)) & 1U)
                phase += angles[i];
        d(static_cast<Eigen::Index>(b)) = std::polar(1.0, phase);
    }
    return d;
}

Eigen::MatrixXcd computational_block(const Propagator& prop, const BasisIndexer& idx)
{
    const auto& comp = idx.computational();
    return prop.block(comp, comp);
}

Eigen::MatrixXcd apply_vz(const VzGate& vz, const Eigen::MatrixXcd& computational)
{
    const Eigen::VectorXcd d = vz.diagonal();
    if (d.size() != computational.rows())
        throw InputError("apply_vz: VZ angle count does not match the computational block");
    return d.asDiagonal() * computational;
}

ComposedGate apply_vz(const VzGate& vz, const Propagator& prop, const BasisIndexer& idx)
{
    if (vz.angles.size() != idx.num_transmons())
        throw InputError("apply_vz: one angle per transmon is required");
    ComposedGate g;
    g.matrix = apply_vz(vz, computational_block(prop, idx));
    if (prop.frame == Frame::Lab)
        g.warnings.push_back("VZ angles applied to a lab-frame propagator; angles absorb free precession");
    return g;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform_open(std::uint64_t& state)
{
    // 53-bit mantissa in (0, 1).
    return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace

Eigen::VectorXcd HaarSampler::sample(std::uint64_t j, std::size_t dim) const
{
    std::uint64_t key = seed_;
    std::uint64_t state = splitmix64(key) ^ (j * 0xD1B54A32D192ED03ULL);
    splitmix64(state);

    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        // Box-Muller: one complex Gaussian from two uniforms.
        const double u1 = uniform_open(state);
        const double u2 = uniform_open(state);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        v(static_cast<Eigen::Index>(k)) = {r * std::cos(a), r * std::sin(a)};
    }
    return v / v.norm();
}

double compensated_sum(const std::vector<double>& values)
{
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double FidelityReport::mean_success() const
{
    return success_probs.empty() ? 0.0 : compensated_sum(success_probs) / static_cast<double>(success_probs.size());
}

FidelityReport average_fidelity(const Eigen::MatrixXcd& composed, const IdealGate& ideal, std::size_t samples,
                                std::uint64_t seed)
{
    if (samples < 1)
        throw InputError("average_fidelity: at least one sample is required");
    if (composed.rows() != ideal.unitary.rows() || composed.cols() != ideal.unitary.cols())
        throw InputError("average_fidelity: gate dimensions differ");

    const Eigen::MatrixXcd w = ideal.unitary.adjoint() * composed;
    const auto dim = static_cast<std::size_t>(w.rows());
    HaarSampler sampler(seed);

    std::vector<double> f(samples);
    for (std::size_t j = 0; j < samples; ++j) {
        const Eigen::VectorXcd psi = sampler.sample(j, dim);
        f[j] = std::abs(psi.dot(w * psi));
    }

    const double mean = compensated_sum(f) / static_cast<double>(samples);
    std::vector<double> dev(samples);
    for (std::size_t j = 0; j < samples; ++j)
        dev[j] = (f[j] - mean) * (f[j] - mean);
    const double var = samples > 1 ? compensated_sum(dev) / static_cast<double>(samples - 1) : 0.0;

    FidelityReport r;
    r.fidelity = std::clamp(mean, 0.0, 1.0);
    r.std_error = std::sqrt(var / static_cast<double>(samples));
    r.samples = samples;
    r.seed = seed;
    return r;
}

double standard_average_gate_fidelity(const Eigen::MatrixXcd& composed, const IdealGate& ideal)
{
    const double d = static_cast<double>(composed.rows());
    const cplx tr = (ideal.unitary.adjoint() * composed).trace();
    const double norm = (composed.adjoint() * composed).trace().real();
    return (std::norm(tr) + norm) / (d * (d + 1.0));
}

std::vector<double> success_probabilities(const Propagator& prop, const IdealGate& ideal, const BasisIndexer& idx)
{
    const Eigen::MatrixXcd block = computational_block(prop, idx);
    if (block.rows() != ideal.unitary.rows())
        throw InputError("success_probabilities: ideal gate does not match the device");
    std::vector<double> p(static_cast<std::size_t>(block.cols()));
    for (Eigen::Index b = 0; b < block.cols(); ++b)
        p[static_cast<std::size_t>(b)] = std::norm(ideal.unitary.col(b).dot(block.col(b)));
    return p;
}

double LeakageDiagnostics::mean_leakage() const
{
    return leakage.empty() ? 0.0 : compensated_sum(leakage) / static_cast<double>(leakage.size());
}

double LeakageDiagnostics::mean_resonator() const
{
    return resonator.empty() ? 0.0 : compensated_sum(resonator) / static_cast<double>(resonator.size());
}

LeakageDiagnostics leakage_diagnostics(const Propagator& prop, const BasisIndexer& idx)
{
    LeakageDiagnostics diag;
    const auto& comp = idx.computational();
    for (Eigen::Index c = 0; c < prop.matrix.cols(); ++c) {
        const auto col = prop.matrix.col(c);
        double in_comp = 0.0;
        double excited = 0.0;
        for (std::size_t j = 0; j < idx.dimension(); ++j) {
            const double p = std::norm(col(static_cast<Eigen::Index>(j)));
            if (idx.label(j, 0) >= 1)
                excited += p;
        }
        for (auto j : comp)
            in_comp += std::norm(col(static_cast<Eigen::Index>(j)));
        diag.leakage.push_back(std::max(0.0, col.squaredNorm() - in_comp));
        diag.resonator.push_back(excited);
    }
    return diag;
}

FidelityReport gate_report(const Propagator& prop, const VzGate& vz, const IdealGate& ideal,
                           const BasisIndexer& idx, std::size_t samples, std::uint64_t seed)
{
    const ComposedGate g = apply_vz(vz, prop, idx);
    FidelityReport r = average_fidelity(g.matrix, ideal, samples, seed);
    r.success_probs = success_probabilities(prop, ideal, idx);
    for (std::size_t b = 0; b < r.success_probs.size(); ++b)
        r.basis_labels.push_back(idx.bitstring(b));

    std::vector<std::size_t> comp_cols;
    for (auto j : idx.computational())
        if (prop.column_position(j) >= 0)
            comp_cols.push_back(j);
    Propagator sub = prop;
    sub.columns = comp_cols;
    sub.matrix.resize(prop.matrix.rows(), static_cast<Eigen::Index>(comp_cols.size()));
    for (std::size_t c = 0; c < comp_cols.size(); ++c)
        sub.matrix.col(static_cast<Eigen::Index>(c)) = prop.matrix.col(prop.column_position(comp_cols[c]));
    const auto diag = leakage_diagnostics(sub, idx);
    r.leakage = diag.mean_leakage();
    r.resonator_excitation = diag.mean_resonator();
    return r;
}

} // namespace crsim
