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

// Serialization of reports, traces, trajectories, sweeps, propagators and run
// manifests.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crsim/calibration.hpp"
#include "crsim/device_io.hpp"
#include "crsim/metrics.hpp"
#include "crsim/propagation.hpp"

namespace crsim {

/// {"F", "stderr", "M", "seed", "success_probs": {bitstring: p}, "leakage",
///  "res_excitation", "mean_success"}.
json report_to_json(const FidelityReport& r);
FidelityReport report_from_json(const json& j);

/// One row per gate: label, one column per basis bitstring, mean.
void write_success_csv(const std::string& path, const std::vector<std::string>& labels,
                       const std::vector<FidelityReport>& reports);

/// t_ns,qubit,bloch_x,bloch_y,bloch_z,leak_pop,res_excited_prob
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec);
/// t_ns,qubit,observable,value (one observable per row).
void write_trajectory_long_csv(const std::string& path, const TrajectoryRecord& rec);

/// iteration,best_f,diameter,evals,wall_s
void write_trace_csv(const std::string& path, const OptimizationTrace& trace);

/// Axis columns, p_<bitstring> columns, orthogonality, score, rank.
void write_seed_search_csv(const std::string& path, const SeedSearchReport& rep, const BasisIndexer& idx);

struct SweepRow {
    std::vector<double> coordinates;
    double fidelity = 0.0;
    double std_error = 0.0;
    double mean_success = 0.0;
    double leakage = 0.0;
};
void write_sweep_csv(const std::string& path, const std::vector<std::string>& axes, const std::vector<SweepRow>& rows);

/// Metadata plus the complex payload as base64 of column-major
/// little-endian IEEE-754 binary64 pairs (re, im).
json propagator_to_json(const Propagator& p);
Propagator propagator_from_json(const json& j);

std::string base64_encode(const std::vector<unsigned char>& bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct RunManifest {
    std::string tool_version;
    std::string command;
    std::string device_path;
    std::string device_sha256;
    std::string pulse_path;
    std::string pulse_sha256;
    json config;
    std::map<std::string, std::uint64_t> seeds;
    std::string started_utc;
    std::vector<std::string> outputs;

    json to_json() const;
    static RunManifest from_json(const json& j);
};

} // namespace crsim
