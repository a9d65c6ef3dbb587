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

#include "crsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "state_block.hpp"

namespace crsim {

Method parse_method(const std::string& text)
{
    if (text == "trotter2")
        return Method::Trotter2;
    if (text == "exact" || text == "exact_step")
        return Method::ExactStep;
    throw InputError("unknown method '" + text + "' (expected trotter2|exact)");
}

Frame parse_frame(const std::string& text)
{
    if (text == "lab")
        return Frame::Lab;
    if (text == "eigen" || text == "eigenframe")
        return Frame::Eigen;
    throw InputError("unknown frame '" + text + "' (expected eigen|lab)");
}

std::string to_string(Method m) { return m == Method::Trotter2 ? "trotter2" : "exact"; }
std::string to_string(Frame f) { return f == Frame::Lab ? "lab" : "eigen"; }

void EvolutionConfig::validate(std::size_t dimension) const
{
    if (!(step_ns > 0.0))
        throw InputError("evolution: step must be positive");
    if (record_stride < 1)
        throw InputError("evolution: record_stride must be >= 1");
    for (auto c : columns)
        if (c >= dimension)
            throw InputError("evolution: column index outside the simulation basis");
}

StepSchedule StepSchedule::make(double total_ns, double step_ns)
{
    if (!(total_ns > 0.0))
        throw InputError("evolution: total time must be positive");
    if (!(step_ns > 0.0))
        throw InputError("evolution: step must be positive");
    StepSchedule s;
    s.step_ns = step_ns;
    const double ratio = total_ns / step_ns;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) < 1e-6) {
        s.full_steps = static_cast<std::size_t>(nearest);
        s.last_step_ns = 0.0;
    } else {
        s.full_steps = static_cast<std::size_t>(std::floor(ratio));
        s.last_step_ns = total_ns - static_cast<double>(s.full_steps) * step_ns;
    }
    if (s.count() == 0)
        throw InputError("evolution: empty step schedule");
    return s;
}

Eigen::MatrixXcd Propagator::block(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const
{
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto pos = column_position(cols[c]);
        if (pos < 0)
            throw InputError("propagator: requested column was not propagated");
        for (std::size_t r = 0; r < rows.size(); ++r)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                matrix(static_cast<Eigen::Index>(rows[r]), pos);
    }
    return out;
}

std::ptrdiff_t Propagator::column_position(std::size_t flat) const
{
    auto it = std::find(columns.begin(), columns.end(), flat);
    return it == columns.end() ? -1 : std::distance(columns.begin(), it);
}

DriveSource DriveSource::from_program(const PulseProgram& program)
{
    program.validate();
    DriveSource d;
    d.num_qubits = program.num_qubits();
    for (std::size_t q = 0; q < program.num_qubits(); ++q)
        if (!program.channels[q].empty())
            d.active.push_back(q);
    d.total_time_ns = program.total_time_ns;
    d.offset = [program](std::size_t q, double t) { return sample_offset(program, q, t); };
    return d;
}

namespace {

using detail::SlotOperator;
using detail::StateBlock;

// Newton-Schulz steps toward the nearest unitary. Slot operators are reused for
// every step, so their rounding error would otherwise accumulate linearly.
Eigen::MatrixXcd polish(Eigen::MatrixXcd m)
{
    const auto n = m.rows();
    for (int k = 0; k < 2; ++k)
        m = 0.5 * m * (3.0 * Eigen::MatrixXcd::Identity(n, n) - m.adjoint() * m);
    return m;
}

std::vector<std::size_t> resolve_columns(const EvolutionConfig& cfg, const SystemOperators& ops)
{
    return cfg.columns.empty() ? ops.indexer.computational() : cfg.columns;
}

StateBlock unit_columns(std::size_t dim, const std::vector<std::size_t>& cols)
{
    StateBlock psi(dim, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        psi.set(cols[c], c, 1.0);
    return psi;
}

void check_drive(const DriveSource& drive, const SystemOperators& ops)
{
    if (drive.num_qubits != ops.num_transmons()) {
        std::ostringstream msg;
        msg << "evolution: program drives " << drive.num_qubits << " transmons but the device has "
            << ops.num_transmons();
        throw InputError(msg.str());
    }
}

// Runs the split-operator product on a block of columns.
class SplitEngine {
public:
    SplitEngine(const SystemOperators& ops, const DriveSource& drive)
        : ops_(ops), drive_(drive), split_(TrotterSplit::make(ops))
    {
        const auto& idx = ops.indexer;
        const std::size_t dim = idx.dimension();
        labels_.resize(ops.num_transmons());
        for (std::size_t i = 0; i < ops.num_transmons(); ++i) {
            labels_[i].resize(dim);
            for (std::size_t j = 0; j < dim; ++j)
                labels_[i][j] = static_cast<int>(idx.label(j, i + 1));
        }
        phase_re_.resize(dim);
        phase_im_.resize(dim);
    }

    const TrotterSplit& split() const { return split_; }

    // V^T e^{-i pi tau H_0}: enters the product basis after the first half step.
    std::vector<SlotOperator> entry(double tau) const
    {
        std::vector<SlotOperator> out;
        for (std::size_t s = 0; s < split_.slot_basis.size(); ++s)
            out.push_back(SlotOperator::from(polish(split_.slot_basis[s].transpose().cast<cplx>() *
                                                    half_phase(s, tau).asDiagonal())));
        return out;
    }

    std::vector<SlotOperator> exit(double tau) const
    {
        std::vector<SlotOperator> out;
        for (std::size_t s = 0; s < split_.slot_basis.size(); ++s)
            out.push_back(SlotOperator::from(polish(half_phase(s, tau).asDiagonal() * split_.slot_basis[s].cast<cplx>())));
        return out;
    }

    // V^T e^{-i pi (tau_a + tau_b) H_0} V between two consecutive steps.
    std::vector<SlotOperator> bridge(double tau_a, double tau_b) const
    {
        std::vector<SlotOperator> out;
        for (std::size_t s = 0; s < split_.slot_basis.size(); ++s) {
            const Eigen::MatrixXcd v = split_.slot_basis[s].cast<cplx>();
            Eigen::VectorXcd ph = half_phase(s, tau_a).cwiseProduct(half_phase(s, tau_b));
            out.push_back(SlotOperator::from(polish(v.adjoint() * ph.asDiagonal() * v)));
        }
        return out;
    }

    void apply(StateBlock& psi, const std::vector<SlotOperator>& slots) const
    {
        for (std::size_t s = 0; s < slots.size(); ++s)
            detail::apply_slot(psi, slots[s], ops_.indexer.stride(s));
    }

    // e^{-i 2 pi tau Lambda(t)} for the step centered at t.
    void step_phase(StateBlock& psi, double tau, double t, const std::vector<double>& base_re,
                    const std::vector<double>& base_im)
    {
        std::copy(base_re.begin(), base_re.end(), phase_re_.begin());
        std::copy(base_im.begin(), base_im.end(), phase_im_.begin());
        for (std::size_t q : drive_.active) {
            const double c = split_.drive_scale[q] * drive_.offset(q, t);
            if (c == 0.0)
                continue;
            if (!std::isfinite(c))
                throw NumericalError("evolution: non-finite drive sample");
            const auto& nu = split_.slot_generator_eigs[q + 1];
            double wr[16];
            double wi[16];
            const int d = static_cast<int>(nu.size());
            for (int m = 0; m < d && m < 16; ++m) {
                const double a = -kTwoPi * tau * c * nu(m);
                wr[m] = std::cos(a);
                wi[m] = std::sin(a);
            }
            const auto& lab = labels_[q];
            for (std::size_t j = 0; j < phase_re_.size(); ++j) {
                const double pr = phase_re_[j];
                const double pi = phase_im_[j];
                const int m = lab[j];
                phase_re_[j] = pr * wr[m] - pi * wi[m];
                phase_im_[j] = pr * wi[m] + pi * wr[m];
            }
        }
        detail::apply_diagonal(psi, phase_re_, phase_im_);
    }

    void interaction_phase(double tau, std::vector<double>& re, std::vector<double>& im) const
    {
        const auto& lam = split_.interaction_diagonal;
        re.resize(static_cast<std::size_t>(lam.size()));
        im.resize(re.size());
        for (Eigen::Index j = 0; j < lam.size(); ++j) {
            const double a = -kTwoPi * tau * lam(j);
            re[static_cast<std::size_t>(j)] = std::cos(a);
            im[static_cast<std::size_t>(j)] = std::sin(a);
        }
    }

    // Evolves psi (bare basis in, bare lab-frame basis out). `observe(n, t_end,
    // materialize)` is invoked after every step; `materialize()` returns the
    // bare-basis state at the end of that step.
    template <class Observe>
    void run(StateBlock& psi, const StepSchedule& sched, const EvolutionConfig& cfg, Observe&& observe)
    {
        const std::size_t n_steps = sched.count();
        const double tau = sched.step_ns;
        const double last = sched.width(n_steps - 1);

        std::vector<double> base_re, base_im, last_re, last_im;
        interaction_phase(tau, base_re, base_im);
        interaction_phase(last, last_re, last_im);

        const auto bridge_uniform = bridge(tau, tau);
        const auto bridge_last = bridge(tau, last);
        const auto exit_uniform = exit(tau);
        const auto exit_last = exit(last);

        apply(psi, entry(sched.width(0)));
        for (std::size_t n = 0; n < n_steps; ++n) {
            const double w = sched.width(n);
            const bool is_last = (n + 1 == n_steps);
            const bool short_step = (w != tau);
            step_phase(psi, w, sched.midpoint(n), short_step ? last_re : base_re, short_step ? last_im : base_im);

            if (cfg.corrupt_step && *cfg.corrupt_step == n)
                psi.scale(1.01);

            const double t_end = sched.start(n) + w;
            observe(n, t_end, [&]() {
                StateBlock copy = psi;
                apply(copy, short_step ? exit_last : exit_uniform);
                return copy;
            });

            if (!is_last) {
                const bool next_short = (sched.width(n + 1) != tau);
                apply(psi, next_short ? bridge_last : bridge_uniform);
            }
        }
        apply(psi, last != tau ? exit_last : exit_uniform);
        if (!psi.all_finite())
            throw NumericalError("evolution: non-finite amplitudes (check drive amplitudes and frequencies)");
    }

private:
    Eigen::VectorXcd half_phase(std::size_t slot, double tau) const
    {
        const auto& e = split_.slot_energies[slot];
        Eigen::VectorXcd ph(e.size());
        for (Eigen::Index m = 0; m < e.size(); ++m)
            ph(m) = std::polar(1.0, -std::numbers::pi * tau * e(m));
        return ph;
    }

    const SystemOperators& ops_;
    const DriveSource& drive_;
    TrotterSplit split_;
    std::vector<std::vector<int>> labels_;
    std::vector<double> phase_re_;
    std::vector<double> phase_im_;
};

void to_frame(Eigen::MatrixXcd& u, const SystemOperators& ops, Frame frame, double total_ns)
{
    if (frame == Frame::Lab)
        return;
    for (Eigen::Index j = 0; j < u.rows(); ++j)
        u.row(j) *= std::polar(1.0, kTwoPi * ops.static_diagonal(j) * total_ns);
}

void to_frame(Eigen::VectorXcd& v, const SystemOperators& ops, Frame frame, double t)
{
    if (frame == Frame::Lab)
        return;
    for (Eigen::Index j = 0; j < v.size(); ++j)
        v(j) *= std::polar(1.0, kTwoPi * ops.static_diagonal(j) * t);
}

} // namespace

Propagator evolve(const PulseProgram& program, const SystemOperators& ops, const EvolutionConfig& cfg)
{
    if (cfg.method == Method::ExactStep)
        return evolve_exact_step(program, ops, cfg);
    return evolve(DriveSource::from_program(program), ops, cfg);
}

Propagator evolve(const DriveSource& drive, const SystemOperators& ops, const EvolutionConfig& cfg)
{
    if (cfg.method == Method::ExactStep)
        return evolve_exact_step(drive, ops, cfg);
    cfg.validate(ops.dimension());
    check_drive(drive, ops);

    Propagator prop;
    prop.columns = resolve_columns(cfg, ops);
    prop.frame = cfg.frame;
    prop.total_time_ns = drive.total_time_ns;
    prop.schedule = StepSchedule::make(drive.total_time_ns, cfg.step_ns);

    StateBlock psi = unit_columns(ops.dimension(), prop.columns);
    SplitEngine engine(ops, drive);
    engine.run(psi, prop.schedule, cfg, [](std::size_t, double, auto&&) {});

    prop.matrix = psi.to_matrix();
    to_frame(prop.matrix, ops, cfg.frame, prop.total_time_ns);
    return prop;
}

Eigen::MatrixXcd evolve_block(const DriveSource& drive, const SystemOperators& ops, const EvolutionConfig& cfg,
                              const Eigen::MatrixXcd& initial)
{
    if (cfg.method != Method::Trotter2)
        throw InputError("evolve_block: only the trotter2 method is supported");
    if (!(cfg.step_ns > 0.0))
        throw InputError("evolve_block: step must be positive");
    check_drive(drive, ops);
    if (static_cast<std::size_t>(initial.rows()) != ops.dimension())
        throw InputError("evolve_block: initial block has the wrong row count");

    StateBlock psi(ops.dimension(), static_cast<std::size_t>(initial.cols()));
    for (Eigen::Index j = 0; j < initial.rows(); ++j)
        for (Eigen::Index c = 0; c < initial.cols(); ++c)
            psi.set(static_cast<std::size_t>(j), static_cast<std::size_t>(c), initial(j, c));
    const auto sched = StepSchedule::make(drive.total_time_ns, cfg.step_ns);
    SplitEngine engine(ops, drive);
    engine.run(psi, sched, cfg, [](std::size_t, double, auto&&) {});
    return psi.to_matrix();
}

void rotate_to_eigenframe(Eigen::MatrixXcd& u, const SystemOperators& ops, double t_ns)
{
    to_frame(u, ops, Frame::Eigen, t_ns);
}

Propagator evolve_exact_step(const PulseProgram& program, const SystemOperators& ops, const EvolutionConfig& cfg)
{
    return evolve_exact_step(DriveSource::from_program(program), ops, cfg);
}

Propagator evolve_exact_step(const DriveSource& drive, const SystemOperators& ops, const EvolutionConfig& cfg)
{
    cfg.validate(ops.dimension());
    check_drive(drive, ops);

    Propagator prop;
    prop.columns = resolve_columns(cfg, ops);
    prop.frame = cfg.frame;
    prop.total_time_ns = drive.total_time_ns;
    prop.schedule = StepSchedule::make(drive.total_time_ns, cfg.step_ns);
    if (prop.schedule.count() > cfg.exact_step_limit) {
        std::ostringstream msg;
        msg << "exact_step: " << prop.schedule.count() << " steps exceed the limit of " << cfg.exact_step_limit;
        throw InputError(msg.str());
    }

    const auto dim = static_cast<Eigen::Index>(ops.dimension());
    const Eigen::MatrixXcd h_static = ops.static_hamiltonian();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, static_cast<Eigen::Index>(prop.columns.size()));
    for (std::size_t c = 0; c < prop.columns.size(); ++c)
        u(static_cast<Eigen::Index>(prop.columns[c]), static_cast<Eigen::Index>(c)) = 1.0;

    // The model Hamiltonian is real symmetric in this basis; the real solver is
    // several times cheaper. Complex operators fall back to the Hermitian one.
    bool real = h_static.imag().cwiseAbs().maxCoeff() == 0.0;
    for (std::size_t q : drive.active)
        real = real && ops.drive_ops[q].imag().cwiseAbs().maxCoeff() == 0.0;
    const Eigen::MatrixXd h_static_re = h_static.real();
    std::vector<Eigen::MatrixXd> drive_re;
    for (const auto& d : ops.drive_ops)
        drive_re.push_back(d.real());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(real ? 0 : dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_re(real ? dim : 0);
    Eigen::VectorXcd ph(dim);
    for (std::size_t n = 0; n < prop.schedule.count(); ++n) {
        const double t = prop.schedule.midpoint(n);
        const double tau = prop.schedule.width(n);
        if (real) {
            Eigen::MatrixXd h = h_static_re;
            for (std::size_t q : drive.active) {
                const double c = -8.0 * ops.device.transmons[q].charging_energy_ghz * drive.offset(q, t);
                if (c != 0.0)
                    h += c * drive_re[q];
            }
            solver_re.compute(h);
            if (solver_re.info() != Eigen::Success)
                throw NumericalError("exact_step: eigensolve failed");
            for (Eigen::Index j = 0; j < dim; ++j)
                ph(j) = std::polar(1.0, -kTwoPi * tau * solver_re.eigenvalues()(j));
            const Eigen::MatrixXd& w = solver_re.eigenvectors();
            const Eigen::MatrixXcd rotated = w.transpose().cast<cplx>() * u;
            u.noalias() = w.cast<cplx>() * (ph.asDiagonal() * rotated);
        } else {
            Eigen::MatrixXcd h = h_static;
            for (std::size_t q : drive.active) {
                const double c = -8.0 * ops.device.transmons[q].charging_energy_ghz * drive.offset(q, t);
                if (c != 0.0)
                    h += c * ops.drive_ops[q];
            }
            solver.compute(h);
            if (solver.info() != Eigen::Success)
                throw NumericalError("exact_step: eigensolve failed");
            for (Eigen::Index j = 0; j < dim; ++j)
                ph(j) = std::polar(1.0, -kTwoPi * tau * solver.eigenvalues()(j));
            const Eigen::MatrixXcd& w = solver.eigenvectors();
            u = w * (ph.asDiagonal() * (w.adjoint() * u));
        }
        if (cfg.corrupt_step && *cfg.corrupt_step == n)
            u *= 1.01;
    }
    if (!u.allFinite())
        throw NumericalError("exact_step: non-finite amplitudes");
    prop.matrix = std::move(u);
    to_frame(prop.matrix, ops, cfg.frame, prop.total_time_ns);
    return prop;
}

BlochSample reduced_bloch(const Eigen::VectorXcd& state, const BasisIndexer& idx, std::size_t qubit)
{
    const std::size_t slot = qubit + 1;
    const int d = idx.slot_dim(slot);
    const std::size_t stride = idx.stride(slot);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t j = 0; j < idx.dimension(); ++j) {
        const int m = idx.label(j, slot);
        if (m != 0)
            continue;
        // j enumerates every configuration of the other slots once.
        for (int a = 0; a < d; ++a) {
            const cplx va = state(static_cast<Eigen::Index>(j + static_cast<std::size_t>(a) * stride));
            for (int b = 0; b < d; ++b)
                rho(a, b) += va * std::conj(state(static_cast<Eigen::Index>(j + static_cast<std::size_t>(b) * stride)));
        }
    }
    BlochSample s;
    s.x = 2.0 * rho(0, 1).real();
    s.y = -2.0 * rho(0, 1).imag();
    s.z = rho(0, 0).real() - rho(1, 1).real();
    for (int m = 2; m < d; ++m)
        s.leakage += rho(m, m).real();
    return s;
}

double resonator_excitation(const Eigen::VectorXcd& state, const BasisIndexer& idx)
{
    double ground = 0.0;
    for (std::size_t j = 0; j < idx.dimension(); ++j)
        if (idx.label(j, 0) == 0)
            ground += std::norm(state(static_cast<Eigen::Index>(j)));
    return std::max(0.0, state.squaredNorm() - ground);
}

TrajectoryRecord bloch_trajectory(const PulseProgram& program, const SystemOperators& ops,
                                  const EvolutionConfig& cfg, std::size_t initial_index)
{
    if (initial_index >= ops.dimension())
        throw InputError("bloch_trajectory: initial index outside the simulation basis");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ops.dimension()));
    v(static_cast<Eigen::Index>(initial_index)) = 1.0;
    return bloch_trajectory(program, ops, cfg, v);
}

TrajectoryRecord bloch_trajectory(const PulseProgram& program, const SystemOperators& ops,
                                  const EvolutionConfig& cfg, const Eigen::VectorXcd& initial_state)
{
    cfg.validate(ops.dimension());
    if (static_cast<std::size_t>(initial_state.size()) != ops.dimension())
        throw InputError("bloch_trajectory: initial state has the wrong dimension");
    if (std::abs(initial_state.norm() - 1.0) > 1e-9)
        throw InputError("bloch_trajectory: initial state must be normalized");
    if (cfg.method != Method::Trotter2)
        throw InputError("bloch_trajectory: only the trotter2 method records trajectories");

    const DriveSource drive = DriveSource::from_program(program);
    check_drive(drive, ops);
    const auto sched = StepSchedule::make(drive.total_time_ns, cfg.step_ns);
    const auto& idx = ops.indexer;

    TrajectoryRecord rec;
    rec.qubits.resize(ops.num_transmons());
    auto record = [&](double t, Eigen::VectorXcd state) {
        to_frame(state, ops, cfg.frame, t);
        rec.times_ns.push_back(t);
        for (std::size_t q = 0; q < ops.num_transmons(); ++q)
            rec.qubits[q].push_back(reduced_bloch(state, idx, q));
        rec.resonator_excitation.push_back(resonator_excitation(state, idx));
    };
    record(0.0, initial_state);

    StateBlock psi(ops.dimension(), 1);
    for (std::size_t j = 0; j < ops.dimension(); ++j)
        psi.set(j, 0, initial_state(static_cast<Eigen::Index>(j)));

    SplitEngine engine(ops, drive);
    const std::size_t n_steps = sched.count();
    engine.run(psi, sched, cfg, [&](std::size_t n, double t_end, auto&& materialize) {
        if ((n + 1) % cfg.record_stride == 0 || n + 1 == n_steps)
            record(t_end, materialize().column(0));
    });
    return rec;
}

double unitarity_probe(const PulseProgram& program, const SystemOperators& ops, EvolutionConfig cfg)
{
    cfg.columns.resize(ops.dimension());
    for (std::size_t j = 0; j < ops.dimension(); ++j)
        cfg.columns[j] = j;
    const Propagator p = evolve(program, ops, cfg);
    const auto n = static_cast<Eigen::Index>(ops.dimension());
    return (p.matrix.adjoint() * p.matrix - Eigen::MatrixXcd::Identity(n, n)).norm();
}

} // namespace crsim
