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

// Pulse envelopes, tone schedules and CNOT pulse programs.
//
// A drive is expressed as the dimensionless gate offset n_g(t) of each
// transmon. Every tone uses tone-local time: its carrier phase and envelope
// both start at the tone's start time.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crsim/common.hpp"

namespace crsim {

/// Lifted Gaussian with sigma = duration / 4, renormalized so that it starts
/// and ends at zero and peaks at `amplitude` in the middle.
struct GaussianEnvelope {
    double amplitude = 0.0;
    double duration_ns = 0.0;

    double sigma() const { return duration_ns / 4.0; }
    double value(double t) const;
    double derivative(double t) const;
    double duration() const { return duration_ns; }
};

/// Where the rise and fall of a flat-top pulse sit relative to T_S.
enum class CrLayout {
    /// Plateau of length T_S, rise and fall outside it: total T_S + 2 T_rise.
    Literal,
    /// Rise and fall inside T_S: total T_S, plateau T_S - 2 T_rise.
    Inclusive,
};

CrLayout parse_cr_layout(std::string_view text);
std::string to_string(CrLayout layout);

/// Sinusoidal flat-top: sin^q(pi t / 2 T_rise) ramps, T_rise = rise_ratio * T_S.
struct FlatTopEnvelope {
    double amplitude = 0.0;
    double plateau_ns = 0.0; // T_S
    double rise_ratio = 0.25;
    int shape = 2; // q
    CrLayout layout = CrLayout::Literal;

    double rise_ns() const { return rise_ratio * plateau_ns; }
    double duration() const;
    double value(double t) const;
    double derivative(double t) const;
};

using Envelope = std::variant<GaussianEnvelope, FlatTopEnvelope>;

double envelope_value(const Envelope& env, double t);
double envelope_derivative(const Envelope& env, double t);
double envelope_duration(const Envelope& env);
double envelope_peak(const Envelope& env);

struct Tone {
    Envelope envelope;
    std::optional<double> drag_ns; // quadrature coefficient beta
    double frequency_ghz = 0.0;
    double phase_rad = 0.0;
    double start_ns = 0.0;

    double end_ns() const { return start_ns + envelope_duration(envelope); }
    double sample(double t) const;
};

struct PulseProgram {
    std::vector<std::vector<Tone>> channels; // one entry per transmon
    double total_time_ns = 0.0;
    std::vector<double> vz_angles;           // one per transmon
    bool allow_overlap = false;

    std::size_t num_qubits() const { return channels.size(); }
    double latest_tone_end() const;
    void validate() const;
};

/// n_g of one transmon at time t.
double sample_offset(const PulseProgram& program, std::size_t qubit, double t);

/// DRAG coefficient from the target's charging energy (GHz): 0.5 / (2 pi E_C) ns.
double drag_coefficient_ns(double target_charging_energy_ghz);

/// Asymmetric CR CNOT: flat-top CR tone on the control, DRAG Gaussian on the
/// target right after it, VZ angles at the end.
struct CnotAsymParams {
    double f1_ghz = 0.0;
    double f2_ghz = 0.0;
    double tx_ns = 10.0;
    double ts_ns = 100.0;
    double omega_x = 0.0;
    double omega_s = 0.0;
    double rho = 0.25;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    std::vector<double> theta; // one per transmon
    int q = 2;
    std::size_t control = 0;
    std::size_t target = 1;
    CrLayout layout = CrLayout::Literal;

    static constexpr std::size_t kPulseDims = 9;
    static const std::vector<std::string>& pulse_names();

    /// (f1, f2, TX, TS, OmegaX, OmegaS, rho, gamma1, gamma2, theta_0, ...).
    Eigen::VectorXd to_vector() const;
    void assign(const Eigen::VectorXd& v);
    std::vector<std::string> vector_names() const;

    void validate(std::size_t num_qubits) const;
};

PulseProgram build_asym_cnot(const CnotAsymParams& params, std::size_t num_qubits, double drag_ns);

/// Echoed CR CNOT on a two-transmon device.
struct EcrParams {
    double f_control_ghz = 0.0;
    double f_target_ghz = 0.0;
    double tx_control_ns = 0.0;
    double tx_target_ns = 0.0;
    double t_cr_ns = 0.0;
    double omega_x_control = 0.0;
    double omega_x_target = 0.0;
    double omega_cr = 0.0;
    double gamma_control[4] = {0.0, 0.0, 0.0, 0.0};
    double gamma_target = 0.0;
    double theta[2] = {0.0, 0.0};
    std::size_t control = 0;
    std::size_t target = 1;
    int q = 2;
    double rho = 0.25;
    CrLayout layout = CrLayout::Literal;

    void validate() const;
};

/// Control: X(g1) CR/2(g2) X(g3) CR/2(g4); target: Gaussian(gT) afterwards.
/// The echo ordering is a convention, not taken from a printed schedule.
PulseProgram build_ecr_cnot(const EcrParams& params, double drag_ns);

} // namespace crsim
