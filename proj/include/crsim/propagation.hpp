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

// Lab-frame time evolution of a driven device.
//
// The Hamiltonian of step n is taken constant at the midpoint (n + 1/2) tau:
//
//   H(t) = H_0 + H_int + sum_i c_i(t) n_i,   c_i(t) = -8 E_C,i n_g,i(t)
//
// `trotter2` uses the symmetric split
//
//   e^{-i tau H_0/2} e^{-i tau H_int/2} prod_i e^{-i tau c_i n_i} e^{-i tau H_int/2} e^{-i tau H_0/2}
//
// H_int and all n_i commute (they are diagonal in one product basis V), so the
// middle three factors collapse into V e^{-i tau Lambda(t)} V^dagger with a
// diagonal Lambda. Between steps the two H_0 halves merge into the slot-local
// unitary V^dagger e^{-i tau H_0} V, so one step costs a diagonal phase and one
// small contraction per slot. `exact_step` exponentiates the full dense
// H(t~_n) per step and serves as the reference.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crsim/device.hpp"
#include "crsim/pulse.hpp"

namespace crsim {

enum class Method { Trotter2, ExactStep };
enum class Frame { Lab, Eigen };

Method parse_method(const std::string& text);
Frame parse_frame(const std::string& text);
std::string to_string(Method m);
std::string to_string(Frame f);

struct EvolutionConfig {
    double step_ns = 0.001;
    Method method = Method::Trotter2;
    Frame frame = Frame::Eigen;
    std::size_t record_stride = 100;
    std::vector<std::size_t> columns; // empty: the computational subspace
    std::size_t exact_step_limit = 20000;

    /// Test hook: scale the state by 1.01 after this step (negative control
    /// for the unitarity probe).
    std::optional<std::size_t> corrupt_step;

    void validate(std::size_t dimension) const;
};

/// Step schedule: uniform steps plus an optional shorter final step.
struct StepSchedule {
    double step_ns = 0.0;
    std::size_t full_steps = 0;
    double last_step_ns = 0.0; // 0 when T is a multiple of tau

    static StepSchedule make(double total_ns, double step_ns);
    std::size_t count() const { return full_steps + (last_step_ns > 0.0 ? 1 : 0); }
    double width(std::size_t n) const { return n < full_steps ? step_ns : last_step_ns; }
    double start(std::size_t n) const { return static_cast<double>(n) * step_ns; }
    double midpoint(std::size_t n) const { return start(n) + 0.5 * width(n); }
};

struct Propagator {
    Eigen::MatrixXcd matrix; // D x |columns|
    std::vector<std::size_t> columns;
    Frame frame = Frame::Eigen;
    double total_time_ns = 0.0;
    StepSchedule schedule;

    /// Rows and columns restricted to the given flat indices.
    Eigen::MatrixXcd block(const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& cols) const;
    std::ptrdiff_t column_position(std::size_t flat) const;
};

/// Drive offsets n_g,i(t) for every transmon; `active` lists channels that
/// may be nonzero.
struct DriveSource {
    std::size_t num_qubits = 0;
    std::vector<std::size_t> active;
    std::function<double(std::size_t, double)> offset;
    double total_time_ns = 0.0;

    static DriveSource from_program(const PulseProgram& program);
};

/// Precomputed product-basis data for the split: per-slot orthogonal V_s,
/// the diagonal of H_int in that basis, and the per-slot eigenvalues of the
/// drive generators (n_i for transmons, a + a^dagger for the resonator).
struct TrotterSplit {
    std::vector<Eigen::MatrixXd> slot_basis;
    std::vector<Eigen::VectorXd> slot_generator_eigs;
    std::vector<Eigen::VectorXd> slot_energies;
    Eigen::VectorXd interaction_diagonal;
    std::vector<double> drive_scale; // -8 E_C,i

    static TrotterSplit make(const SystemOperators& ops);

    /// V diag(lambda) V^T on the full space, for checks.
    Eigen::MatrixXcd reassemble_interaction(const BasisIndexer& idx) const;
};

Propagator evolve(const PulseProgram& program, const SystemOperators& ops, const EvolutionConfig& cfg);
Propagator evolve(const DriveSource& drive, const SystemOperators& ops, const EvolutionConfig& cfg);

/// Lab-frame evolution of an arbitrary D x k block over [0, T] of `drive`
/// (trotter2 only; cfg.columns and cfg.frame are ignored). Chaining blocks
/// reproduces a single evolve() when every segment boundary lies on the step
/// grid.
Eigen::MatrixXcd evolve_block(const DriveSource& drive, const SystemOperators& ops, const EvolutionConfig& cfg,
                              const Eigen::MatrixXcd& initial);

/// Lab frame to eigenframe (or back, with a negative time) at time t.
void rotate_to_eigenframe(Eigen::MatrixXcd& u, const SystemOperators& ops, double t_ns);

Propagator evolve_exact_step(const PulseProgram& program, const SystemOperators& ops,
                             const EvolutionConfig& cfg);
Propagator evolve_exact_step(const DriveSource& drive, const SystemOperators& ops,
                             const EvolutionConfig& cfg);

struct BlochSample {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double leakage = 0.0;
};

struct TrajectoryRecord {
    std::vector<double> times_ns;
    std::vector<std::vector<BlochSample>> qubits; // [qubit][sample]
    std::vector<double> resonator_excitation;     // per sample
};

/// Reduced single-transmon observables of a pure state on the full space.
BlochSample reduced_bloch(const Eigen::VectorXcd& state, const BasisIndexer& idx, std::size_t qubit);
double resonator_excitation(const Eigen::VectorXcd& state, const BasisIndexer& idx);

TrajectoryRecord bloch_trajectory(const PulseProgram& program, const SystemOperators& ops,
                                  const EvolutionConfig& cfg, const Eigen::VectorXcd& initial_state);
TrajectoryRecord bloch_trajectory(const PulseProgram& program, const SystemOperators& ops,
                                  const EvolutionConfig& cfg, std::size_t initial_index);

/// ||U^dagger U - I||_F over the full basis.
double unitarity_probe(const PulseProgram& program, const SystemOperators& ops, EvolutionConfig cfg);

} // namespace crsim
