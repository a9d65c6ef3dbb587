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

#include "crsim/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace crsim {

double GaussianEnvelope::value(double t) const
{
    if (!(duration_ns > 0.0) || t < 0.0 || t > duration_ns)
        return 0.0;
    const double s = sigma();
    const double c = duration_ns / 2.0;
    const double edge = std::exp(-duration_ns * duration_ns / (8.0 * s * s));
    const double g = std::exp(-(t - c) * (t - c) / (2.0 * s * s));
    return amplitude * (g - edge) / (1.0 - edge);
}

double GaussianEnvelope::derivative(double t) const
{
    if (!(duration_ns > 0.0) || t < 0.0 || t > duration_ns)
        return 0.0;
    const double s = sigma();
    const double c = duration_ns / 2.0;
    const double edge = std::exp(-duration_ns * duration_ns / (8.0 * s * s));
    const double g = std::exp(-(t - c) * (t - c) / (2.0 * s * s));
    return amplitude * (-(t - c) / (s * s)) * g / (1.0 - edge);
}

CrLayout parse_cr_layout(std::string_view text)
{
    if (text == "literal")
        return CrLayout::Literal;
    if (text == "inclusive")
        return CrLayout::Inclusive;
    throw InputError("unknown cr_layout '" + std::string(text) + "' (expected literal|inclusive)");
}

std::string to_string(CrLayout layout)
{
    return layout == CrLayout::Literal ? "literal" : "inclusive";
}

double FlatTopEnvelope::duration() const
{
    return layout == CrLayout::Literal ? plateau_ns + 2.0 * rise_ns() : plateau_ns;
}

namespace {

// Start of the falling edge and the shift that mirrors S_q onto it.
double fall_shift(const FlatTopEnvelope& e)
{
    return e.layout == CrLayout::Literal ? e.plateau_ns : e.plateau_ns - 2.0 * e.rise_ns();
}

} // namespace

double FlatTopEnvelope::value(double t) const
{
    const double rise = rise_ns();
    const double total = duration();
    if (!(rise > 0.0) || t < 0.0 || t > total)
        return 0.0;
    const double shift = fall_shift(*this);
    if (t < rise)
        return amplitude * std::pow(std::max(0.0, std::sin(std::numbers::pi * t / (2.0 * rise))), shape);
    if (t < rise + shift)
        return amplitude;
    // sin(pi) rounds slightly negative for some durations
    return amplitude * std::pow(std::max(0.0, std::sin(std::numbers::pi * (t - shift) / (2.0 * rise))), shape);
}

double FlatTopEnvelope::derivative(double t) const
{
    const double rise = rise_ns();
    const double total = duration();
    if (!(rise > 0.0) || t < 0.0 || t > total)
        return 0.0;
    const double shift = fall_shift(*this);
    double u;
    if (t < rise)
        u = t;
    else if (t < rise + shift)
        return 0.0;
    else
        u = t - shift;
    const double arg = std::numbers::pi * u / (2.0 * rise);
    const double k = std::numbers::pi / (2.0 * rise);
    return amplitude * shape * std::pow(std::sin(arg), shape - 1) * std::cos(arg) * k;
}

double envelope_value(const Envelope& env, double t)
{
    return std::visit([t](const auto& e) { return e.value(t); }, env);
}

double envelope_derivative(const Envelope& env, double t)
{
    return std::visit([t](const auto& e) { return e.derivative(t); }, env);
}

double envelope_duration(const Envelope& env)
{
    return std::visit([](const auto& e) { return e.duration(); }, env);
}

double envelope_peak(const Envelope& env)
{
    return std::visit([](const auto& e) { return e.amplitude; }, env);
}

double Tone::sample(double t) const
{
    const double local = t - start_ns;
    const double duration = envelope_duration(envelope);
    if (local < 0.0 || local > duration)
        return 0.0;
    const double arg = kTwoPi * frequency_ghz * local - phase_rad;
    double v = envelope_value(envelope, local) * std::cos(arg);
    if (drag_ns)
        v += *drag_ns * envelope_derivative(envelope, local) * std::sin(arg);
    return v;
}

double PulseProgram::latest_tone_end() const
{
    double end = 0.0;
    for (const auto& ch : channels)
        for (const auto& tone : ch)
            end = std::max(end, tone.end_ns());
    return end;
}

void PulseProgram::validate() const
{
    if (!(total_time_ns > 0.0))
        throw InputError("pulse program: total time must be positive");
    if (vz_angles.size() != channels.size())
        throw InputError("pulse program: one VZ angle per channel is required");
    if (total_time_ns + 1e-9 < latest_tone_end())
        throw InputError("pulse program: total time ends before the last tone");
    for (std::size_t q = 0; q < channels.size(); ++q) {
        const auto& ch = channels[q];
        for (const auto& tone : ch) {
            if (!(envelope_duration(tone.envelope) > 0.0))
                throw InputError("pulse program: tone with non-positive duration");
            if (!std::isfinite(tone.frequency_ghz) || !std::isfinite(tone.phase_rad))
                throw InputError("pulse program: non-finite tone frequency or phase");
        }
        if (allow_overlap)
            continue;
        std::vector<std::pair<double, double>> spans;
        for (const auto& tone : ch)
            spans.emplace_back(tone.start_ns, tone.end_ns());
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i) {
            if (spans[i].first < spans[i - 1].second - 1e-9) {
                std::ostringstream msg;
                msg << "pulse program: overlapping tones on channel " << q;
                throw InputError(msg.str());
            }
        }
    }
}

double sample_offset(const PulseProgram& program, std::size_t qubit, double t)
{
    double v = 0.0;
    for (const auto& tone : program.channels.at(qubit))
        v += tone.sample(t);
    return v;
}

double drag_coefficient_ns(double target_charging_energy_ghz)
{
    return 0.5 / (kTwoPi * target_charging_energy_ghz);
}

const std::vector<std::string>& CnotAsymParams::pulse_names()
{
    static const std::vector<std::string> names{"f1_GHz", "f2_GHz", "TX_ns", "TS_ns", "OmegaX",
                                                "OmegaS", "rho", "gamma1", "gamma2"};
    return names;
}

Eigen::VectorXd CnotAsymParams::to_vector() const
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(kPulseDims + theta.size()));
    v << f1_ghz, f2_ghz, tx_ns, ts_ns, omega_x, omega_s, rho, gamma1, gamma2,
        Eigen::Map<const Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    return v;
}

void CnotAsymParams::assign(const Eigen::VectorXd& v)
{
    if (static_cast<std::size_t>(v.size()) != kPulseDims + theta.size())
        throw InputError("CnotAsymParams: vector length mismatch");
    f1_ghz = v(0);
    f2_ghz = v(1);
    tx_ns = v(2);
    ts_ns = v(3);
    omega_x = v(4);
    omega_s = v(5);
    rho = v(6);
    gamma1 = v(7);
    gamma2 = v(8);
    for (std::size_t i = 0; i < theta.size(); ++i)
        theta[i] = v(static_cast<Eigen::Index>(kPulseDims + i));
}

std::vector<std::string> CnotAsymParams::vector_names() const
{
    auto names = pulse_names();
    for (std::size_t i = 0; i < theta.size(); ++i)
        names.push_back("theta" + std::to_string(i));
    return names;
}

void CnotAsymParams::validate(std::size_t num_qubits) const
{
    if (control >= num_qubits || target >= num_qubits || control == target)
        throw InputError("CNOT: invalid control/target pair");
    if (theta.size() != num_qubits)
        throw InputError("CNOT: one VZ angle per transmon is required");
    if (!(tx_ns > 0.0) || !(ts_ns > 0.0))
        throw InputError("CNOT: durations must be positive");
    if (q != 1 && q != 2)
        throw InputError("CNOT: shape index q must be 1 or 2");
    if (!(rho > 0.0 && rho < 0.5))
        throw InputError("CNOT: rising ratio must lie in (0, 0.5)");
    if (!to_vector().allFinite())
        throw InputError("CNOT: non-finite parameter");
}

PulseProgram build_asym_cnot(const CnotAsymParams& p, std::size_t num_qubits, double drag_ns)
{
    p.validate(num_qubits);

    FlatTopEnvelope cr{p.omega_s, p.ts_ns, p.rho, p.q, p.layout};
    GaussianEnvelope aux{p.omega_x, p.tx_ns};

    PulseProgram prog;
    prog.channels.resize(num_qubits);
    prog.channels[p.control].push_back(Tone{cr, std::nullopt, p.f1_ghz, p.gamma1, 0.0});
    const double aux_start = cr.duration();
    prog.channels[p.target].push_back(Tone{aux, drag_ns, p.f2_ghz, p.gamma2, aux_start});
    prog.total_time_ns = aux_start + p.tx_ns;
    prog.vz_angles = p.theta;
    return prog;
}

void EcrParams::validate() const
{
    if (control > 1 || target > 1 || control == target)
        throw InputError("ECR: two-transmon control/target pair required");
    if (!(tx_control_ns > 0.0) || !(tx_target_ns > 0.0) || !(t_cr_ns > 0.0))
        throw InputError("ECR: durations must be positive");
    if (q != 1 && q != 2)
        throw InputError("ECR: shape index q must be 1 or 2");
    if (!(rho > 0.0 && rho < 0.5))
        throw InputError("ECR: rising ratio must lie in (0, 0.5)");
}

PulseProgram build_ecr_cnot(const EcrParams& p, double drag_ns)
{
    p.validate();
    GaussianEnvelope x_control{p.omega_x_control, p.tx_control_ns};
    GaussianEnvelope x_target{p.omega_x_target, p.tx_target_ns};
    FlatTopEnvelope half_cr{p.omega_cr, p.t_cr_ns / 2.0, p.rho, p.q, p.layout};

    PulseProgram prog;
    prog.channels.resize(2);
    auto& ctl = prog.channels[p.control];
    double t = 0.0;
    ctl.push_back(Tone{x_control, std::nullopt, p.f_control_ghz, p.gamma_control[0], t});
    t += x_control.duration();
    ctl.push_back(Tone{half_cr, std::nullopt, p.f_target_ghz, p.gamma_control[1], t});
    t += half_cr.duration();
    ctl.push_back(Tone{x_control, std::nullopt, p.f_control_ghz, p.gamma_control[2], t});
    t += x_control.duration();
    ctl.push_back(Tone{half_cr, std::nullopt, p.f_target_ghz, p.gamma_control[3], t});
    t += half_cr.duration();
    prog.channels[p.target].push_back(Tone{x_target, drag_ns, p.f_target_ghz, p.gamma_target, t});
    prog.total_time_ns = t + x_target.duration();
    prog.vz_angles = {p.theta[0], p.theta[1]};
    return prog;
}

} // namespace crsim
