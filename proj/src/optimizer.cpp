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

#include "crsim/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "crsim/common.hpp"

namespace crsim {

ParamSpace ParamSpace::unbounded(std::size_t dim)
{
    ParamSpace s;
    for (std::size_t i = 0; i < dim; ++i)
        s.names.push_back("x" + std::to_string(i));
    s.free.assign(dim, true);
    const auto n = static_cast<Eigen::Index>(dim);
    s.lower = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
    s.upper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    s.scale = Eigen::VectorXd::Ones(n);
    return s;
}

std::size_t ParamSpace::free_count() const
{
    return static_cast<std::size_t>(std::count(free.begin(), free.end(), true));
}

void ParamSpace::validate() const
{
    const auto n = static_cast<Eigen::Index>(names.size());
    if (free.size() != names.size() || lower.size() != n || upper.size() != n || scale.size() != n)
        throw InputError("ParamSpace: names, mask, bounds and scales must have equal length");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(scale(i) > 0.0))
            throw InputError("ParamSpace: scales must be positive");
        if (lower(i) > upper(i))
            throw InputError("ParamSpace: lower bound above upper bound");
    }
}

double ParamSpace::penalty(const Eigen::VectorXd& x) const
{
    double p = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double below = std::max(0.0, lower(i) - x(i)) / scale(i);
        const double above = std::max(0.0, x(i) - upper(i)) / scale(i);
        p += below * below + above * above;
    }
    return penalty_weight * p;
}

void NmConfig::validate() const
{
    if (!(reflection > 0.0 && expansion > 1.0 && expansion > reflection && contraction > 0.0 &&
          contraction < 1.0 && shrink > 0.0 && shrink < 1.0))
        throw InputError("NmConfig: coefficients must satisfy expansion > 1 > contraction > 0");
    if (!(initial_step > 0.0))
        throw InputError("NmConfig: initial_step must be positive");
    if (max_evaluations < 1)
        throw InputError("NmConfig: max_evaluations must be positive");
}

NmResult nelder_mead(const Objective& objective, const Eigen::VectorXd& x0, const ParamSpace& space,
                     const NmConfig& cfg)
{
    space.validate();
    cfg.validate();
    if (static_cast<std::size_t>(x0.size()) != space.dimension())
        throw InputError("nelder_mead: x0 does not match the parameter space");

    const auto start = std::chrono::steady_clock::now();
    std::vector<Eigen::Index> free_idx;
    for (std::size_t i = 0; i < space.free.size(); ++i)
        if (space.free[i])
            free_idx.push_back(static_cast<Eigen::Index>(i));
    const std::size_t n = free_idx.size();

    NmResult res;
    auto to_full = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd x = x0;
        for (std::size_t k = 0; k < n; ++k)
            x(free_idx[k]) += space.scale(free_idx[k]) * y(static_cast<Eigen::Index>(k));
        return x;
    };
    auto eval = [&](const Eigen::VectorXd& y) {
        const Eigen::VectorXd x = to_full(y);
        ++res.evaluations;
        double f = objective(x);
        if (!std::isfinite(f))
            return std::numeric_limits<double>::infinity();
        return f + space.penalty(x);
    };
    auto elapsed = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const double f0 = eval(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
    if (!std::isfinite(f0))
        throw InputError("nelder_mead: objective is not finite at x0");
    if (n == 0) {
        res.x = x0;
        res.f = f0;
        res.trace.rows.push_back({0, f0, 0.0, res.evaluations, elapsed()});
        return res;
    }

    // Vertex 0 is x0; vertex k moves free coordinate k by initial_step scale units.
    std::vector<Eigen::VectorXd> simplex(n + 1, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
    std::vector<double> fv(n + 1);
    fv[0] = f0;
    for (std::size_t k = 0; k < n; ++k) {
        simplex[k + 1](static_cast<Eigen::Index>(k)) = cfg.initial_step;
        fv[k + 1] = eval(simplex[k + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<Eigen::VectorXd> s2;
        std::vector<double> f2;
        for (auto i : order) {
            s2.push_back(simplex[i]);
            f2.push_back(fv[i]);
        }
        simplex = std::move(s2);
        fv = std::move(f2);
    };
    auto diameter = [&]() {
        double d = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            d = std::max(d, (simplex[k] - simplex[0]).cwiseAbs().maxCoeff());
        return d;
    };

    sort_simplex();
    std::size_t iteration = 0;
    res.trace.rows.push_back({iteration, fv[0], diameter(), res.evaluations, elapsed()});

    while (true) {
        const double diam = diameter();
        const double spread = fv[n] - fv[0];
        if (diam <= cfg.x_tolerance && spread <= cfg.f_tolerance)
            break;
        if (res.evaluations >= cfg.max_evaluations) {
            res.exhausted = true;
            break;
        }
        ++iteration;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k)
            centroid += simplex[k];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd xr = centroid + cfg.reflection * (centroid - simplex[n]);
        const double fr = eval(xr);

        bool do_shrink = false;
        if (fr < fv[0]) {
            const Eigen::VectorXd xe = centroid + cfg.expansion * (xr - centroid);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            simplex[n] = xr;
            fv[n] = fr;
        } else if (fr < fv[n]) {
            const Eigen::VectorXd xc = centroid + cfg.contraction * (xr - centroid);
            const double fc = eval(xc);
            if (fc <= fr) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                do_shrink = true;
            }
        } else {
            const Eigen::VectorXd xc = centroid + cfg.contraction * (simplex[n] - centroid);
            const double fc = eval(xc);
            if (fc < fv[n]) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                do_shrink = true;
            }
        }

        if (do_shrink) {
            for (std::size_t k = 1; k <= n; ++k) {
                simplex[k] = simplex[0] + cfg.shrink * (simplex[k] - simplex[0]);
                fv[k] = eval(simplex[k]);
            }
        }
        sort_simplex();
        res.trace.rows.push_back({iteration, fv[0], diameter(), res.evaluations, elapsed()});
    }

    res.x = to_full(simplex[0]);
    res.f = fv[0];
    return res;
}

} // namespace crsim
