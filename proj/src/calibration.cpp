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

#include "crsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace crsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> cr_key(const CnotAsymParams& p)
{
    return {p.f1_ghz, p.ts_ns, p.omega_s, p.rho, p.gamma1, static_cast<double>(p.q),
            static_cast<double>(p.layout), static_cast<double>(p.control)};
}

std::vector<double> full_key(const CnotAsymParams& p)
{
    std::vector<double> k = cr_key(p);
    for (double v : {p.f2_ghz, p.tx_ns, p.omega_x, p.gamma2, static_cast<double>(p.target)})
        k.push_back(v);
    return k;
}

double wrap_angle(double a)
{
    a = std::remainder(a, kTwoPi);
    return a <= -std::numbers::pi ? a + kTwoPi : a;
}

IdealGate ideal_for(const CnotAsymParams& p, std::size_t n) { return ideal_cnot(p.control, p.target, n); }

} // namespace

AsymCnotSimulator::AsymCnotSimulator(const SystemOperators& ops, EvolutionConfig cfg) : ops_(ops), cfg_(std::move(cfg))
{
    if (cfg_.method != Method::Trotter2)
        throw InputError("AsymCnotSimulator: only the trotter2 method is supported");
    cfg_.validate(ops.dimension());
    columns_ = cfg_.columns.empty() ? ops.indexer.computational() : cfg_.columns;
}

double AsymCnotSimulator::cr_duration(const CnotAsymParams& p) const
{
    return FlatTopEnvelope{p.omega_s, p.ts_ns, p.rho, p.q, p.layout}.duration();
}

const Eigen::MatrixXcd& AsymCnotSimulator::cr_block(const CnotAsymParams& p)
{
    const std::size_t nq = ops_.num_transmons();
    p.validate(nq);
    const auto key = cr_key(p);
    if (cr_key_ && *cr_key_ == key)
        return cr_state_;

    PulseProgram prog = build_asym_cnot(p, nq, 0.0);
    prog.channels[p.target].clear();
    prog.total_time_ns = cr_duration(p);

    Eigen::MatrixXcd init = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ops_.dimension()),
                                                   static_cast<Eigen::Index>(columns_.size()));
    for (std::size_t c = 0; c < columns_.size(); ++c)
        init(static_cast<Eigen::Index>(columns_[c]), static_cast<Eigen::Index>(c)) = 1.0;

    cr_key_.reset();
    cr_state_ = evolve_block(DriveSource::from_program(prog), ops_, cfg_, init);
    cr_key_ = key;
    ++cr_runs_;
    return cr_state_;
}

const Propagator& AsymCnotSimulator::simulate(const CnotAsymParams& p)
{
    const std::size_t nq = ops_.num_transmons();
    p.validate(nq);
    const auto key = full_key(p);
    if (full_key_ && *full_key_ == key)
        return full_;

    const Eigen::MatrixXcd& start = cr_block(p);

    PulseProgram aux;
    aux.channels.resize(nq);
    const double drag = drag_coefficient_ns(ops_.device.transmons[p.target].charging_energy_ghz);
    aux.channels[p.target].push_back(Tone{GaussianEnvelope{p.omega_x, p.tx_ns}, drag, p.f2_ghz, p.gamma2, 0.0});
    aux.total_time_ns = p.tx_ns;
    aux.vz_angles.assign(nq, 0.0);

    full_key_.reset();
    full_.matrix = evolve_block(DriveSource::from_program(aux), ops_, cfg_, start);
    ++aux_runs_;
    full_.columns = columns_;
    full_.frame = cfg_.frame;
    full_.total_time_ns = cr_duration(p) + p.tx_ns;
    full_.schedule = StepSchedule::make(full_.total_time_ns, cfg_.step_ns);
    if (cfg_.frame == Frame::Eigen)
        rotate_to_eigenframe(full_.matrix, ops_, full_.total_time_ns);
    full_key_ = key;
    return full_;
}

ParamSpace default_param_space(const CnotAsymParams& p)
{
    ParamSpace s;
    s.names = p.vector_names();
    const auto n = static_cast<Eigen::Index>(s.names.size());
    s.free.assign(s.names.size(), true);
    s.lower = Eigen::VectorXd::Constant(n, -kInf);
    s.upper = Eigen::VectorXd::Constant(n, kInf);
    s.scale = Eigen::VectorXd::Constant(n, 0.05);
    s.scale.head(9) << 1e-3, 1e-3, 1.0, 1.0, 1e-3, 1e-3, 0.01, 0.05, 0.05;
    s.lower.head(7) << 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.01;
    s.upper(6) = 0.49;
    s.penalty_weight = 1.0;
    return s;
}

std::vector<bool> mask_from_names(const ParamSpace& space, const std::vector<std::string>& names)
{
    std::vector<bool> mask(space.dimension(), false);
    for (const auto& name : names) {
        auto it = std::find(space.names.begin(), space.names.end(), name);
        if (it == space.names.end())
            throw InputError("unknown parameter name: " + name);
        mask[static_cast<std::size_t>(it - space.names.begin())] = true;
    }
    return mask;
}

std::vector<double> estimate_vz_angles(const Eigen::MatrixXcd& pulse_block, const IdealGate& ideal)
{
    const std::size_t n = ideal.num_qubits;
    if (pulse_block.rows() != ideal.unitary.rows() || pulse_block.cols() != ideal.unitary.cols())
        throw InputError("estimate_vz_angles: block does not match the ideal gate");
    // Z U_pulse ~ e^{i phi} U  =>  U_pulse U^dagger ~ e^{i phi} Z^dagger.
    const Eigen::MatrixXcd d = pulse_block * ideal.unitary.adjoint();
    std::vector<double> theta(n, 0.0);
    const cplx ref = d(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto b = static_cast<Eigen::Index>(std::size_t{1} << (n - 1 - i));
        theta[i] = wrap_angle(-std::arg(d(b, b) * std::conj(ref)));
    }
    return theta;
}

VzFit fit_vz_angles(const Eigen::MatrixXcd& pulse_block, const IdealGate& ideal, std::vector<double> initial,
                    std::size_t samples, std::uint64_t seed, const NmConfig& nm)
{
    const std::size_t n = ideal.num_qubits;
    if (initial.empty())
        initial = estimate_vz_angles(pulse_block, ideal);
    if (initial.size() != n)
        throw InputError("fit_vz_angles: one angle per transmon is required");

    ParamSpace space = ParamSpace::unbounded(n);
    space.scale.setConstant(0.05);
    auto objective = [&](const Eigen::VectorXd& x) {
        VzGate vz{std::vector<double>(x.data(), x.data() + x.size())};
        return 1.0 - average_fidelity(apply_vz(vz, pulse_block), ideal, samples, seed).fidelity;
    };
    VzFit fit;
    const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(initial.data(), static_cast<Eigen::Index>(n));
    fit.nm = nelder_mead(objective, x0, space, nm);
    fit.angles.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        fit.angles[i] = wrap_angle(fit.nm.x(static_cast<Eigen::Index>(i)));
    fit.fidelity = 1.0 - fit.nm.f;
    return fit;
}

FidelityReport evaluate_gate(AsymCnotSimulator& sim, const CnotAsymParams& p, std::size_t samples,
                             std::uint64_t seed)
{
    const Propagator& prop = sim.simulate(p);
    const std::size_t nq = sim.ops().num_transmons();
    return gate_report(prop, VzGate{p.theta}, ideal_for(p, nq), sim.ops().indexer, samples, seed);
}

namespace {

// Inner objective: only the Monte-Carlo fidelity, no diagnostics.
double inner_fidelity(AsymCnotSimulator& sim, const CnotAsymParams& p, std::size_t samples, std::uint64_t seed)
{
    const Propagator& prop = sim.simulate(p);
    const std::size_t nq = sim.ops().num_transmons();
    const Eigen::MatrixXcd block = computational_block(prop, sim.ops().indexer);
    return average_fidelity(apply_vz(VzGate{p.theta}, block), ideal_for(p, nq), samples, seed).fidelity;
}

} // namespace

CalibrationResult optimize_gate(AsymCnotSimulator& sim, const CnotAsymParams& seed, const std::vector<bool>& free,
                                const CalibrationOptions& opts)
{
    const std::size_t nq = sim.ops().num_transmons();
    seed.validate(nq);
    ParamSpace space = default_param_space(seed);
    if (free.size() != space.dimension())
        throw InputError("optimize_gate: mask length does not match the parameter vector");
    space.free = free;

    CalibrationResult res;
    res.seed = seed;
    res.seed_inner_fidelity = inner_fidelity(sim, seed, opts.inner_samples, opts.inner_seed);

    CnotAsymParams start = seed;
    bool all_theta_free = true;
    for (std::size_t i = 0; i < nq; ++i)
        all_theta_free = all_theta_free && free[CnotAsymParams::kPulseDims + i];
    if (opts.reseed_vz && all_theta_free) {
        const Propagator& prop = sim.simulate(seed);
        CnotAsymParams candidate = seed;
        candidate.theta = estimate_vz_angles(computational_block(prop, sim.ops().indexer), ideal_for(seed, nq));
        if (inner_fidelity(sim, candidate, opts.inner_samples, opts.inner_seed) > res.seed_inner_fidelity) {
            start = candidate;
            res.vz_reseeded = true;
        }
    }
    res.start_inner_fidelity =
        res.vz_reseeded ? inner_fidelity(sim, start, opts.inner_samples, opts.inner_seed) : res.seed_inner_fidelity;

    auto objective = [&](const Eigen::VectorXd& x) {
        CnotAsymParams p = start;
        try {
            p.assign(x);
            return 1.0 - inner_fidelity(sim, p, opts.inner_samples, opts.inner_seed);
        } catch (const InputError&) {
            return kInf;
        } catch (const NumericalError&) {
            return kInf;
        }
    };

    NmConfig nm = opts.nm;
    res.nm = nelder_mead(objective, start.to_vector(), space, nm);
    if (opts.progress)
        for (const auto& row : res.nm.trace.rows)
            opts.progress(row);

    res.params = start;
    res.params.assign(res.nm.x);
    for (auto& t : res.params.theta)
        t = wrap_angle(t);
    res.inner_fidelity = inner_fidelity(sim, res.params, opts.inner_samples, opts.inner_seed);
    res.report = evaluate_gate(sim, res.params, opts.final_samples, opts.final_seed);
    return res;
}

namespace {

void set_axis(CnotAsymParams& p, const std::string& name, double v)
{
    if (name == "f1_GHz" || name == "f1")
        p.f1_ghz = v;
    else if (name == "TS_ns" || name == "TS")
        p.ts_ns = v;
    else if (name == "OmegaS")
        p.omega_s = v;
    else if (name == "rho")
        p.rho = v;
    else if (name == "gamma1")
        p.gamma1 = v;
    else
        throw InputError("sweet_spot_search: unsupported axis " + name);
}

} // namespace

SweepPoint score_cr_point(AsymCnotSimulator& sim, const CnotAsymParams& p)
{
    const auto& ops = sim.ops();
    const auto& idx = ops.indexer;
    const std::size_t nq = ops.num_transmons();
    Eigen::MatrixXcd u = sim.cr_block(p);
    const std::vector<std::size_t>& cols = sim.config().columns.empty() ? idx.computational() : sim.config().columns;
    if (sim.config().frame == Frame::Eigen)
        rotate_to_eigenframe(u, ops, sim.cr_duration(p));

    const IdealGate ideal = ideal_for(p, nq);
    const auto& comp = idx.computational();
    auto position = [&](std::size_t flat) -> Eigen::Index {
        auto it = std::find(cols.begin(), cols.end(), flat);
        if (it == cols.end())
            throw InputError("sweet_spot_search: computational columns are required");
        return static_cast<Eigen::Index>(it - cols.begin());
    };

    SweepPoint pt;
    for (std::size_t b = 0; b < comp.size(); ++b) {
        const Eigen::VectorXcd col = u.col(position(comp[b]));
        cplx amp = 0.0;
        for (std::size_t r = 0; r < comp.size(); ++r)
            amp += std::conj(ideal.unitary(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(b))) *
                   col(static_cast<Eigen::Index>(comp[r]));
        pt.success_probs.push_back(std::norm(amp));
    }

    // Target Bloch vectors for control 0 and 1, other transmons in |0>.
    const std::size_t cbit = std::size_t{1} << (nq - 1 - p.control);
    Eigen::Vector3d r[2];
    for (int c = 0; c < 2; ++c) {
        const std::size_t b = c ? cbit : 0;
        const BlochSample s = reduced_bloch(u.col(position(comp[b])), idx, p.target);
        r[c] = {s.x, s.y, s.z};
    }
    pt.orthogonality = 0.5 * (1.0 - r[0].dot(r[1]));

    const double mean = compensated_sum(pt.success_probs) / static_cast<double>(pt.success_probs.size());
    std::vector<double> dev;
    for (double v : pt.success_probs)
        dev.push_back((v - mean) * (v - mean));
    const double var = compensated_sum(dev) / static_cast<double>(dev.size());
    pt.score = var + (1.0 - pt.orthogonality);
    return pt;
}

SeedSearchReport sweet_spot_search(AsymCnotSimulator& sim, const CnotAsymParams& base,
                                   const std::vector<SweepAxis>& axes)
{
    SeedSearchReport rep;
    rep.axes = axes;
    std::size_t total = 1;
    for (const auto& a : axes) {
        if (a.values.empty())
            throw InputError("sweet_spot_search: empty axis " + a.name);
        total *= a.values.size();
    }

    for (std::size_t k = 0; k < total; ++k) {
        CnotAsymParams p = base;
        std::vector<double> coords(axes.size());
        std::size_t rem = k;
        for (std::size_t a = axes.size(); a-- > 0;) {
            const std::size_t n = axes[a].values.size();
            coords[a] = axes[a].values[rem % n];
            rem /= n;
            set_axis(p, axes[a].name, coords[a]);
        }
        SweepPoint pt = score_cr_point(sim, p);
        pt.coordinates = std::move(coords);
        rep.points.push_back(std::move(pt));
    }

    rep.ranked.resize(rep.points.size());
    std::iota(rep.ranked.begin(), rep.ranked.end(), 0);
    std::stable_sort(rep.ranked.begin(), rep.ranked.end(),
                     [&](std::size_t a, std::size_t b) { return rep.points[a].score < rep.points[b].score; });
    for (std::size_t r = 0; r < rep.ranked.size(); ++r)
        rep.points[rep.ranked[r]].rank = r;
    return rep;
}

AuxFitResult aux_and_vz_fit(AsymCnotSimulator& sim, const CnotAsymParams& cr_point, const AuxFitOptions& opts)
{
    const std::size_t nq = sim.ops().num_transmons();
    cr_point.validate(nq);
    const IdealGate ideal = ideal_for(cr_point, nq);

    ParamSpace space = default_param_space(cr_point);
    space.free = mask_from_names(space, {"f2_GHz", "TX_ns", "OmegaX", "gamma2"});

    auto mean_success = [&](const CnotAsymParams& p) {
        const auto probs = success_probabilities(sim.simulate(p), ideal, sim.ops().indexer);
        return compensated_sum(probs) / static_cast<double>(probs.size());
    };
    auto objective = [&](const Eigen::VectorXd& x) {
        CnotAsymParams p = cr_point;
        try {
            p.assign(x);
            return 1.0 - mean_success(p);
        } catch (const InputError&) {
            return kInf;
        } catch (const NumericalError&) {
            return kInf;
        }
    };

    AuxFitResult res;
    res.aux_nm = nelder_mead(objective, cr_point.to_vector(), space, opts.nm);
    res.params = cr_point;
    res.params.assign(res.aux_nm.x);
    res.mean_success = mean_success(res.params);

    const Eigen::MatrixXcd block = computational_block(sim.simulate(res.params), sim.ops().indexer);
    res.vz = fit_vz_angles(block, ideal, {}, opts.samples, opts.seed, opts.nm);
    res.params.theta = res.vz.angles;
    res.fidelity = res.vz.fidelity;
    res.local_maximum = res.fidelity < opts.min_fidelity;
    return res;
}

} // namespace crsim
