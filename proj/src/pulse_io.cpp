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

#include "crsim/pulse_io.hpp"
#include <algorithm>

#include <set>

#include "json_fields.hpp"

namespace crsim {

namespace {

using detail::field;

const std::set<std::string> kCommonKeys{"label", "kind", "device", "F_reference", "success_reference", "note"};
const std::set<std::string> kAsymKeys{"f1_GHz", "f2_GHz", "TX_ns", "TS_ns",  "OmegaX",  "OmegaS",   "q",
                                      "rho",    "gamma1", "gamma2", "control", "target", "cr_layout"};
const std::set<std::string> kEcrKeys{"fC_GHz",  "fT_GHz",  "TXC_ns",  "TXT_ns",  "TCR_ns",  "OmegaXC", "OmegaXT",
                                     "OmegaCR", "gamma1C", "gamma2C", "gamma3C", "gamma4C", "gamma1T", "control",
                                     "target",  "q",       "rho",     "cr_layout"};
const std::set<std::string> kIdleKeys{"duration_ns", "qubits"};

std::vector<double> read_thetas(const json& j, const std::string& where)
{
    std::size_t count = 0;
    for (const auto& [k, v] : j.items()) {
        if (k.size() <= 5 || k.compare(0, 5, "theta") != 0)
            continue;
        const std::string digits = k.substr(5);
        if (digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 2)
            continue;
        count = std::max<std::size_t>(count, std::stoul(digits) + 1);
    }
    std::vector<double> theta;
    for (std::size_t i = 0; i < count; ++i) {
        const std::string key = "theta" + std::to_string(i);
        if (!j.contains(key))
            throw InputError(where + ": missing key '" + key + "'");
        theta.push_back(field<double>(j, key, where));
    }
    return theta;
}

void check_keys(const json& j, const std::set<std::string>& allowed, std::size_t thetas, const std::string& where)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (kCommonKeys.count(k) || allowed.count(k))
            continue;
        bool is_theta = false;
        for (std::size_t i = 0; i < thetas; ++i)
            is_theta = is_theta || k == "theta" + std::to_string(i);
        if (!is_theta)
            throw InputError(where + "." + k + ": unknown field");
    }
}

std::size_t index_field(const json& j, const std::string& key, const std::string& where)
{
    const int v = field<int>(j, key, where);
    if (v < 0)
        throw InputError(where + "." + key + ": must be non-negative");
    return static_cast<std::size_t>(v);
}

CrLayout layout_field(const json& j, const std::string& where)
{
    if (!j.contains("cr_layout"))
        return CrLayout::Literal;
    try {
        return parse_cr_layout(field<std::string>(j, "cr_layout", where));
    } catch (const InputError& e) {
        throw InputError(where + ".cr_layout: " + e.what());
    }
}

void put_thetas(json& j, const std::vector<double>& theta)
{
    for (std::size_t i = 0; i < theta.size(); ++i)
        j["theta" + std::to_string(i)] = theta[i];
}

} // namespace

std::string to_string(GateKind kind)
{
    switch (kind) {
    case GateKind::Asym:
        return "asym";
    case GateKind::Ecr:
        return "ecr";
    case GateKind::Idle:
        return "idle";
    }
    return "asym";
}

std::vector<double> GateRecord::vz_angles() const
{
    switch (kind) {
    case GateKind::Asym:
        return asym.theta;
    case GateKind::Ecr:
        return {ecr.theta[0], ecr.theta[1]};
    case GateKind::Idle:
        return idle_theta;
    }
    return {};
}

PulseProgram GateRecord::program(const DeviceSpec& device) const
{
    if (device.num_transmons() != qubits)
        throw InputError("gate " + label + " needs " + std::to_string(qubits) + " transmons, device has " +
                         std::to_string(device.num_transmons()));
    switch (kind) {
    case GateKind::Asym:
        return build_asym_cnot(asym, qubits, drag_coefficient_ns(device.transmons[asym.target].charging_energy_ghz));
    case GateKind::Ecr:
        return build_ecr_cnot(ecr, drag_coefficient_ns(device.transmons[ecr.target].charging_energy_ghz));
    case GateKind::Idle: {
        PulseProgram p;
        p.channels.resize(qubits);
        p.total_time_ns = idle_duration_ns;
        p.vz_angles = idle_theta;
        p.validate();
        return p;
    }
    }
    throw InputError("unknown gate kind");
}

IdealGate GateRecord::ideal() const
{
    switch (kind) {
    case GateKind::Asym:
        return ideal_cnot(asym.control, asym.target, qubits);
    case GateKind::Ecr:
        return ideal_cnot(ecr.control, ecr.target, qubits);
    case GateKind::Idle:
        return ideal_identity(qubits);
    }
    throw InputError("unknown gate kind");
}

void GateRecord::set_layout(CrLayout l)
{
    asym.layout = l;
    ecr.layout = l;
}

std::optional<CrLayout> GateRecord::layout() const
{
    if (kind == GateKind::Asym)
        return asym.layout;
    if (kind == GateKind::Ecr)
        return ecr.layout;
    return std::nullopt;
}

GateRecord gate_from_json(const json& j)
{
    if (!j.is_object())
        throw InputError("gate record: expected an object");
    GateRecord g;
    g.label = field<std::string>(j, "label", "gate");
    const std::string where = "gate[" + g.label + "]";
    const std::string kind = j.contains("kind") ? field<std::string>(j, "kind", where) : "asym";
    if (j.contains("device"))
        g.device = field<std::string>(j, "device", where);
    if (j.contains("F_reference"))
        g.f_reference = field<double>(j, "F_reference", where);
    if (j.contains("success_reference"))
        g.success_reference = field<double>(j, "success_reference", where);
    if (j.contains("note"))
        g.note = field<std::string>(j, "note", where);

    const std::vector<double> theta = read_thetas(j, where);
    try {
        if (kind == "asym") {
            check_keys(j, kAsymKeys, theta.size(), where);
            g.kind = GateKind::Asym;
            auto& p = g.asym;
            p.f1_ghz = field<double>(j, "f1_GHz", where);
            p.f2_ghz = field<double>(j, "f2_GHz", where);
            p.tx_ns = field<double>(j, "TX_ns", where);
            p.ts_ns = field<double>(j, "TS_ns", where);
            p.omega_x = field<double>(j, "OmegaX", where);
            p.omega_s = field<double>(j, "OmegaS", where);
            p.q = field<int>(j, "q", where);
            p.rho = field<double>(j, "rho", where);
            p.gamma1 = field<double>(j, "gamma1", where);
            p.gamma2 = field<double>(j, "gamma2", where);
            p.theta = theta;
            p.control = index_field(j, "control", where);
            p.target = index_field(j, "target", where);
            p.layout = layout_field(j, where);
            g.qubits = theta.size();
            const std::size_t needed = std::max({p.control, p.target, std::size_t{1}}) + 1;
            if (g.qubits < needed)
                throw InputError(where + ": missing key 'theta" + std::to_string(g.qubits) + "'");
            p.validate(g.qubits);
        } else if (kind == "ecr") {
            check_keys(j, kEcrKeys, theta.size(), where);
            g.kind = GateKind::Ecr;
            if (theta.size() != 2)
                throw InputError(where + ": echoed CR records need theta0 and theta1");
            auto& p = g.ecr;
            p.f_control_ghz = field<double>(j, "fC_GHz", where);
            p.f_target_ghz = field<double>(j, "fT_GHz", where);
            p.tx_control_ns = field<double>(j, "TXC_ns", where);
            p.tx_target_ns = field<double>(j, "TXT_ns", where);
            p.t_cr_ns = field<double>(j, "TCR_ns", where);
            p.omega_x_control = field<double>(j, "OmegaXC", where);
            p.omega_x_target = field<double>(j, "OmegaXT", where);
            p.omega_cr = field<double>(j, "OmegaCR", where);
            for (int k = 0; k < 4; ++k)
                p.gamma_control[k] = field<double>(j, "gamma" + std::to_string(k + 1) + "C", where);
            p.gamma_target = field<double>(j, "gamma1T", where);
            p.theta[0] = theta[0];
            p.theta[1] = theta[1];
            p.control = index_field(j, "control", where);
            p.target = index_field(j, "target", where);
            p.q = j.contains("q") ? field<int>(j, "q", where) : 2;
            p.rho = j.contains("rho") ? field<double>(j, "rho", where) : 0.25;
            p.layout = layout_field(j, where);
            g.qubits = 2;
            p.validate();
        } else if (kind == "idle") {
            check_keys(j, kIdleKeys, theta.size(), where);
            g.kind = GateKind::Idle;
            g.idle_duration_ns = field<double>(j, "duration_ns", where);
            g.qubits = index_field(j, "qubits", where);
            if (g.qubits < 1)
                throw InputError(where + ".qubits: at least one transmon");
            if (!(g.idle_duration_ns > 0.0))
                throw InputError(where + ".duration_ns: must be positive");
            g.idle_theta = theta.empty() ? std::vector<double>(g.qubits, 0.0) : theta;
            if (g.idle_theta.size() != g.qubits)
                throw InputError(where + ": one VZ angle per transmon is required");
        } else {
            throw InputError(where + ".kind: expected asym, ecr or idle");
        }
    } catch (const InputError& e) {
        const std::string what = e.what();
        if (what.rfind(where, 0) == 0)
            throw;
        throw InputError(where + ": " + what);
    }
    return g;
}

json gate_to_json(const GateRecord& g)
{
    json j;
    j["label"] = g.label;
    j["kind"] = to_string(g.kind);
    if (g.device)
        j["device"] = *g.device;
    switch (g.kind) {
    case GateKind::Asym: {
        const auto& p = g.asym;
        j["f1_GHz"] = p.f1_ghz;
        j["f2_GHz"] = p.f2_ghz;
        j["TX_ns"] = p.tx_ns;
        j["TS_ns"] = p.ts_ns;
        j["OmegaX"] = p.omega_x;
        j["OmegaS"] = p.omega_s;
        j["q"] = p.q;
        j["rho"] = p.rho;
        j["gamma1"] = p.gamma1;
        j["gamma2"] = p.gamma2;
        put_thetas(j, p.theta);
        j["control"] = p.control;
        j["target"] = p.target;
        j["cr_layout"] = to_string(p.layout);
        break;
    }
    case GateKind::Ecr: {
        const auto& p = g.ecr;
        j["fC_GHz"] = p.f_control_ghz;
        j["fT_GHz"] = p.f_target_ghz;
        j["TXC_ns"] = p.tx_control_ns;
        j["TXT_ns"] = p.tx_target_ns;
        j["TCR_ns"] = p.t_cr_ns;
        j["OmegaXC"] = p.omega_x_control;
        j["OmegaXT"] = p.omega_x_target;
        j["OmegaCR"] = p.omega_cr;
        for (int k = 0; k < 4; ++k)
            j["gamma" + std::to_string(k + 1) + "C"] = p.gamma_control[k];
        j["gamma1T"] = p.gamma_target;
        put_thetas(j, {p.theta[0], p.theta[1]});
        j["control"] = p.control;
        j["target"] = p.target;
        j["q"] = p.q;
        j["rho"] = p.rho;
        j["cr_layout"] = to_string(p.layout);
        break;
    }
    case GateKind::Idle:
        j["duration_ns"] = g.idle_duration_ns;
        j["qubits"] = g.qubits;
        put_thetas(j, g.idle_theta);
        break;
    }
    if (g.f_reference)
        j["F_reference"] = *g.f_reference;
    if (g.success_reference)
        j["success_reference"] = *g.success_reference;
    if (g.note)
        j["note"] = *g.note;
    return j;
}

const GateRecord& PulseFile::find(const std::string& label) const
{
    for (const auto& g : gates)
        if (g.label == label)
            return g;
    throw InputError("no gate labelled " + label);
}

PulseFile pulse_file_from_json(const json& j)
{
    PulseFile f;
    const json& gates = detail::member(j, "gates", "pulse file");
    if (!gates.is_array() || gates.empty())
        throw InputError("pulse file.gates: expected a non-empty array");
    for (const auto& g : gates)
        f.gates.push_back(gate_from_json(g));
    return f;
}

json pulse_file_to_json(const PulseFile& f)
{
    json gates = json::array();
    for (const auto& g : f.gates)
        gates.push_back(gate_to_json(g));
    return {{"gates", gates}};
}

PulseFile load_pulse_file(const std::string& path)
{
    try {
        return pulse_file_from_json(read_json_file(path));
    } catch (const InputError& e) {
        const std::string what = e.what();
        if (what.rfind(path, 0) == 0)
            throw;
        throw InputError(path + ": " + what);
    }
}

} // namespace crsim
