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

// Pulse parameter files: {"gates": [record, ...]}.
//
// Asymmetric CNOT record ("kind": "asym"):
//   f1_GHz f2_GHz TX_ns TS_ns OmegaX OmegaS q rho gamma1 gamma2 theta0..theta{n-1}
//   control target cr_layout
// Echoed CR record ("kind": "ecr"):
//   fC_GHz fT_GHz TXC_ns TXT_ns TCR_ns OmegaXC OmegaXT OmegaCR
//   gamma1C..gamma4C gamma1T theta0 theta1 control target q rho cr_layout
// Idle record ("kind": "idle"): duration_ns qubits [theta0..]; target is I.
//
// Every record carries a "label" and may carry "device" (file stem),
// "F_reference" and "success_reference" (expected values) and a free-text
// "note". Unknown keys are rejected.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crsim/device_io.hpp"
#include "crsim/metrics.hpp"
#include "crsim/pulse.hpp"

namespace crsim {

enum class GateKind { Asym, Ecr, Idle };

std::string to_string(GateKind kind);

struct GateRecord {
    std::string label;
    GateKind kind = GateKind::Asym;
    CnotAsymParams asym;
    EcrParams ecr;
    double idle_duration_ns = 0.0;
    std::vector<double> idle_theta;
    std::size_t qubits = 0;

    std::optional<std::string> device;
    std::optional<double> f_reference;
    std::optional<double> success_reference;
    std::optional<std::string> note;

    std::size_t num_qubits() const { return qubits; }
    std::vector<double> vz_angles() const;
    PulseProgram program(const DeviceSpec& device) const;
    IdealGate ideal() const;
    void set_layout(CrLayout layout);
    std::optional<CrLayout> layout() const;
};

struct PulseFile {
    std::vector<GateRecord> gates;

    const GateRecord& find(const std::string& label) const;
};

GateRecord gate_from_json(const json& j);
json gate_to_json(const GateRecord& g);

PulseFile pulse_file_from_json(const json& j);
json pulse_file_to_json(const PulseFile& f);

PulseFile load_pulse_file(const std::string& path);

} // namespace crsim
