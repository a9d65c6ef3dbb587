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

// Command-line workbench. Verbs: spectrum, fidelity, success, bloch, evolve,
// optimize, sweep, seed-search, reproduce, validate.
//
// Exit codes: 0 success, 1 threshold failure, 2 input error.
// Output directories default to $CRSIM_OUTPUT_ROOT/<verb>-<time>-<suffix>
// (root "crsim_runs" when unset); fixtures resolve against $CRSIM_DATA_DIR
// or the data directory of the source tree.

#pragma once

#include <ostream>
#include <string>

#include "crsim/device.hpp"
#include "crsim/propagation.hpp"
#include "crsim/pulse_io.hpp"

namespace crsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitThreshold = 1;
inline constexpr int kExitInput = 2;

int run_workbench(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string data_directory();
std::string tool_version();

/// Propagator of a gate record on `ops`. Asymmetric records under trotter2
/// use the same two-segment evaluation as the optimizer.
Propagator simulate_record(const GateRecord& record, const SystemOperators& ops, const EvolutionConfig& cfg);

/// Parses "0,100", "|0,100>", "0100" (resonator level first) or a bare
/// computational bitstring such as "100" into a flat index.
std::size_t parse_state_label(const std::string& label, const BasisIndexer& idx);

struct SpectrumRow {
    double omega01_ghz = 0.0;
    double anharmonicity_ghz = 0.0;
    double dressed_omega01_ghz = 0.0; // from the coupled static Hamiltonian
    double resonator_detuning_ghz = 0.0;
};

std::vector<SpectrumRow> device_spectrum(const DeviceSpec& device);

} // namespace crsim
