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

// Derivative-free Nelder-Mead minimization over a masked, scaled parameter
// vector with soft box bounds.

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace crsim {

struct ParamSpace {
    std::vector<std::string> names;
    std::vector<bool> free;     // false: coordinate is frozen at x0
    Eigen::VectorXd lower;      // soft bounds (quadratic penalty outside)
    Eigen::VectorXd upper;
    Eigen::VectorXd scale;      // unit of the scaled search coordinates
    double penalty_weight = 1.0;

    /// All-free, unbounded, unit scale.
    static ParamSpace unbounded(std::size_t dim);

    std::size_t dimension() const { return names.size(); }
    std::size_t free_count() const;
    void validate() const;
    double penalty(const Eigen::VectorXd& x) const;
};

struct NmConfig {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double initial_step = 0.05; // simplex vertex k = x0 + initial_step * scale_k e_k
    double x_tolerance = 1e-6; // simplex diameter, scaled coordinates, inf-norm
    double f_tolerance = 1e-7; // spread of vertex values
    std::size_t max_evaluations = 2000;

    void validate() const;
};

struct TraceRow {
    std::size_t iteration = 0;
    double best_f = 0.0;
    double diameter = 0.0;
    std::size_t evaluations = 0;
    double wall_seconds = 0.0;
};

struct OptimizationTrace {
    std::vector<TraceRow> rows;
};

struct NmResult {
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    bool exhausted = false; // hit max_evaluations before converging
    OptimizationTrace trace;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Terminates when both the scaled simplex diameter and the vertex value
/// spread are within tolerance, or when the evaluation budget runs out.
NmResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0, const ParamSpace& space,
                     const NmConfig& cfg = {});

} // namespace crsim
