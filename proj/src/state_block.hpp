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

// Internal: a bundle of state columns stored split-complex with the column
// index fastest, so slot contractions run over contiguous runs of doubles.

#pragma once

#include <cstddef>
#include <vector>

#include "crsim/device.hpp"

namespace crsim::detail {

class StateBlock {
public:
    StateBlock(std::size_t dim, std::size_t width) : dim_(dim), width_(width), re_(dim * width), im_(dim * width) {}

    std::size_t dim() const { return dim_; }
    std::size_t width() const { return width_; }
    double* re() { return re_.data(); }
    double* im() { return im_.data(); }
    const double* re() const { return re_.data(); }
    const double* im() const { return im_.data(); }

    cplx get(std::size_t j, std::size_t c) const { return {re_[j * width_ + c], im_[j * width_ + c]}; }
    void set(std::size_t j, std::size_t c, cplx v)
    {
        re_[j * width_ + c] = v.real();
        im_[j * width_ + c] = v.imag();
    }

    Eigen::MatrixXcd to_matrix() const;
    Eigen::VectorXcd column(std::size_t c) const;
    bool all_finite() const;
    void scale(double s);

private:
    std::size_t dim_;
    std::size_t width_;
    std::vector<double> re_;
    std::vector<double> im_;
};

/// Dense complex d x d operator on one slot, row-major split storage.
struct SlotOperator {
    int d = 0;
    std::vector<double> re;
    std::vector<double> im;

    static SlotOperator from(const Eigen::MatrixXcd& m);
};

/// psi <- (1 (x) op (x) 1) psi on the slot with the given stride.
void apply_slot(StateBlock& psi, const SlotOperator& op, std::size_t stride);

/// psi_j <- phase_j psi_j for every column.
void apply_diagonal(StateBlock& psi, const std::vector<double>& phase_re, const std::vector<double>& phase_im);

} // namespace crsim::detail
