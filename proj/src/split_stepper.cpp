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

#include <cmath>
#include <vector>

#include "crsim/propagation.hpp"
#include "state_block.hpp"

namespace crsim {
namespace detail {

Eigen::MatrixXcd StateBlock::to_matrix() const
{
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(width_));
    for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t c = 0; c < width_; ++c)
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = get(j, c);
    return m;
}

Eigen::VectorXcd StateBlock::column(std::size_t c) const
{
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim_));
    for (std::size_t j = 0; j < dim_; ++j)
        v(static_cast<Eigen::Index>(j)) = get(j, c);
    return v;
}

bool StateBlock::all_finite() const
{
    for (std::size_t i = 0; i < re_.size(); ++i)
        if (!std::isfinite(re_[i]) || !std::isfinite(im_[i]))
            return false;
    return true;
}

void StateBlock::scale(double s)
{
    for (std::size_t i = 0; i < re_.size(); ++i) {
        re_[i] *= s;
        im_[i] *= s;
    }
}

SlotOperator SlotOperator::from(const Eigen::MatrixXcd& m)
{
    SlotOperator op;
    op.d = static_cast<int>(m.rows());
    op.re.resize(static_cast<std::size_t>(op.d * op.d));
    op.im.resize(op.re.size());
    for (int r = 0; r < op.d; ++r)
        for (int c = 0; c < op.d; ++c) {
            op.re[static_cast<std::size_t>(r * op.d + c)] = m(r, c).real();
            op.im[static_cast<std::size_t>(r * op.d + c)] = m(r, c).imag();
        }
    return op;
}

namespace {

using v4d = double __attribute__((vector_size(32)));

inline v4d load4(const double* p)
{
    v4d v;
    __builtin_memcpy(&v, p, sizeof(v));
    return v;
}

inline void store4(double* p, v4d v) { __builtin_memcpy(p, &v, sizeof(v)); }

// Register-blocked: four lanes of every level are loaded once, all D outputs
// accumulated, then stored back in place.
template <int D>
void apply_slot_fixed(double* re, double* im, std::size_t total, std::size_t block, const double* mr,
                      const double* mi)
{
    const std::size_t outer = total / (D * block);
    const std::size_t vec_end = block - block % 4;
    for (std::size_t o = 0; o < outer; ++o) {
        double* r = re + o * D * block;
        double* m = im + o * D * block;
        std::size_t i = 0;
        for (; i < vec_end; i += 4) {
            v4d xr[D];
            v4d xi[D];
            for (int l = 0; l < D; ++l) {
                xr[l] = load4(r + l * block + i);
                xi[l] = load4(m + l * block + i);
            }
            for (int l = 0; l < D; ++l) {
                v4d yr = mr[l * D] * xr[0] - mi[l * D] * xi[0];
                v4d yi = mr[l * D] * xi[0] + mi[l * D] * xr[0];
                for (int k = 1; k < D; ++k) {
                    yr += mr[l * D + k] * xr[k] - mi[l * D + k] * xi[k];
                    yi += mr[l * D + k] * xi[k] + mi[l * D + k] * xr[k];
                }
                store4(r + l * block + i, yr);
                store4(m + l * block + i, yi);
            }
        }
        for (; i < block; ++i) {
            double xr[D];
            double xi[D];
            for (int l = 0; l < D; ++l) {
                xr[l] = r[l * block + i];
                xi[l] = m[l * block + i];
            }
            for (int l = 0; l < D; ++l) {
                double yr = 0.0;
                double yi = 0.0;
                for (int k = 0; k < D; ++k) {
                    yr += mr[l * D + k] * xr[k] - mi[l * D + k] * xi[k];
                    yi += mr[l * D + k] * xi[k] + mi[l * D + k] * xr[k];
                }
                r[l * block + i] = yr;
                m[l * block + i] = yi;
            }
        }
    }
}

void apply_slot_generic(double* re, double* im, std::size_t total, std::size_t block, int d, const double* mr,
                        const double* mi)
{
    const std::size_t dd = static_cast<std::size_t>(d);
    const std::size_t outer = total / (dd * block);
    std::vector<double> xr(dd);
    std::vector<double> xi(dd);
    for (std::size_t o = 0; o < outer; ++o) {
        double* r = re + o * dd * block;
        double* m = im + o * dd * block;
        for (std::size_t i = 0; i < block; ++i) {
            for (std::size_t l = 0; l < dd; ++l) {
                xr[l] = r[l * block + i];
                xi[l] = m[l * block + i];
            }
            for (std::size_t l = 0; l < dd; ++l) {
                double yr = 0.0;
                double yi = 0.0;
                for (std::size_t k = 0; k < dd; ++k) {
                    yr += mr[l * dd + k] * xr[k] - mi[l * dd + k] * xi[k];
                    yi += mr[l * dd + k] * xi[k] + mi[l * dd + k] * xr[k];
                }
                r[l * block + i] = yr;
                m[l * block + i] = yi;
            }
        }
    }
}

} // namespace

void apply_slot(StateBlock& psi, const SlotOperator& op, std::size_t stride)
{
    const std::size_t total = psi.dim() * psi.width();
    const std::size_t block = stride * psi.width();
    switch (op.d) {
    case 2:
        apply_slot_fixed<2>(psi.re(), psi.im(), total, block, op.re.data(), op.im.data());
        break;
    case 3:
        apply_slot_fixed<3>(psi.re(), psi.im(), total, block, op.re.data(), op.im.data());
        break;
    case 4:
        apply_slot_fixed<4>(psi.re(), psi.im(), total, block, op.re.data(), op.im.data());
        break;
    case 5:
        apply_slot_fixed<5>(psi.re(), psi.im(), total, block, op.re.data(), op.im.data());
        break;
    default:
        apply_slot_generic(psi.re(), psi.im(), total, block, op.d, op.re.data(), op.im.data());
    }
}

void apply_diagonal(StateBlock& psi, const std::vector<double>& phase_re, const std::vector<double>& phase_im)
{
    const std::size_t w = psi.width();
    double* __restrict re = psi.re();
    double* __restrict im = psi.im();
    for (std::size_t j = 0; j < psi.dim(); ++j) {
        const double pr = phase_re[j];
        const double pi = phase_im[j];
        double* r = re + j * w;
        double* m = im + j * w;
        for (std::size_t c = 0; c < w; ++c) {
            const double a = r[c];
            const double b = m[c];
            r[c] = pr * a - pi * b;
            m[c] = pr * b + pi * a;
        }
    }
}

} // namespace detail

TrotterSplit TrotterSplit::make(const SystemOperators& ops)
{
    TrotterSplit split;
    const auto& idx = ops.indexer;

    auto add_slot = [&split](const Eigen::MatrixXd& generator, const Eigen::VectorXd& energies) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(generator);
        if (es.info() != Eigen::Success)
            throw NumericalError("TrotterSplit: slot generator eigensolve failed");
        split.slot_basis.push_back(es.eigenvectors());
        split.slot_generator_eigs.push_back(es.eigenvalues());
        split.slot_energies.push_back(energies);
    };

    add_slot(ops.resonator_quadrature, ops.resonator_energies);
    for (const auto& t : ops.transmons)
        add_slot(t.charge_matrix, t.energies);
    for (const auto& t : ops.device.transmons)
        split.drive_scale.push_back(-8.0 * t.charging_energy_ghz);

    const std::size_t dim = idx.dimension();
    split.interaction_diagonal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        double coupled = 0.0;
        for (std::size_t i = 0; i < ops.num_transmons(); ++i)
            coupled += ops.device.couplings_ghz[i] * split.slot_generator_eigs[i + 1](idx.label(j, i + 1));
        split.interaction_diagonal(static_cast<Eigen::Index>(j)) = split.slot_generator_eigs[0](idx.label(j, 0)) * coupled;
    }
    return split;
}

Eigen::MatrixXcd TrotterSplit::reassemble_interaction(const BasisIndexer& idx) const
{
    Eigen::MatrixXd v = Eigen::MatrixXd::Ones(1, 1);
    for (const auto& vs : slot_basis) {
        Eigen::MatrixXd next(v.rows() * vs.rows(), v.cols() * vs.cols());
        for (Eigen::Index a = 0; a < v.rows(); ++a)
            for (Eigen::Index b = 0; b < v.cols(); ++b)
                next.block(a * vs.rows(), b * vs.cols(), vs.rows(), vs.cols()) = v(a, b) * vs;
        v = std::move(next);
    }
    if (static_cast<std::size_t>(v.rows()) != idx.dimension())
        throw InputError("TrotterSplit: indexer does not match the split");
    return (v * interaction_diagonal.asDiagonal() * v.transpose()).cast<cplx>();
}

} // namespace crsim
