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

// Gate calibration: asymmetric CNOT simulation with segment caching, the
// infidelity objective, the sweet-spot scan and the auxiliary/VZ fits.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crsim/metrics.hpp"
#include "crsim/optimizer.hpp"
#include "crsim/propagation.hpp"
#include "crsim/pulse.hpp"

namespace crsim {

/// Simulates asymmetric CNOT programs as two chained segments (CR tone, then
/// the auxiliary tone). The lab-frame state after the CR segment is cached,
/// so candidates that differ only in auxiliary or VZ parameters skip the
/// long segment, and candidates that differ only in VZ angles skip evolution
/// altogether. Not thread-safe; use one instance per thread.
class AsymCnotSimulator {
public:
    AsymCnotSimulator(const SystemOperators& ops, EvolutionConfig cfg);

    /// Propagator of the pulse (VZ angles are not applied).
    const Propagator& simulate(const CnotAsymParams& params);

    /// Lab-frame block after the CR segment only, and its duration.
    const Eigen::MatrixXcd& cr_block(const CnotAsymParams& params);
    double cr_duration(const CnotAsymParams& params) const;

    const SystemOperators& ops() const { return ops_; }
    const EvolutionConfig& config() const { return cfg_; }
    std::size_t cr_evolutions() const { return cr_runs_; }
    std::size_t aux_evolutions() const { return aux_runs_; }

private:
    const SystemOperators& ops_;
    EvolutionConfig cfg_;
    std::vector<std::size_t> columns_;
    std::optional<std::vector<double>> cr_key_;
    Eigen::MatrixXcd cr_state_;
    std::optional<std::vector<double>> full_key_;
    Propagator full_;
    std::size_t cr_runs_ = 0;
    std::size_t aux_runs_ = 0;
};

/// Default search space for a parameter vector: frequency scale 1 MHz,
/// duration scale 1 ns, amplitude scale 1e-3, rise-ratio scale 0.01, phase
/// scale 0.05 rad; durations and amplitudes bounded below, rho in (0, 0.5).
ParamSpace default_param_space(const CnotAsymParams& params);

/// Mask freeing exactly the named coordinates; throws on unknown names.
std::vector<bool> mask_from_names(const ParamSpace& space, const std::vector<std::string>& names);

/// VZ angles that best undo the diagonal phases of pulse_block * ideal^dagger
/// (closed form from the basis states with a single excited transmon).
std::vector<double> estimate_vz_angles(const Eigen::MatrixXcd& pulse_block, const IdealGate& ideal);

struct VzFit {
    std::vector<double> angles;
    double fidelity = 0.0; // at the sampling settings used by the fit
    NmResult nm;
};

/// Maximizes F over the VZ angles only, starting from `initial` (or the
/// closed-form estimate when empty). Angles are wrapped to (-pi, pi].
VzFit fit_vz_angles(const Eigen::MatrixXcd& pulse_block, const IdealGate& ideal, std::vector<double> initial,
                    std::size_t samples, std::uint64_t seed, const NmConfig& nm = {});

struct CalibrationOptions {
    NmConfig nm;
    std::size_t inner_samples = 512;
    std::uint64_t inner_seed = 11;
    std::size_t final_samples = 10000;
    std::uint64_t final_seed = 20240601;
    /// Replace the seed's VZ angles by the closed-form estimate when that
    /// scores better and the angles are free.
    bool reseed_vz = true;
    std::function<void(const TraceRow&)> progress;
};

struct CalibrationResult {
    CnotAsymParams seed;
    CnotAsymParams params;
    double seed_inner_fidelity = 0.0;
    double start_inner_fidelity = 0.0; // after the optional VZ reseed
    double inner_fidelity = 0.0;
    bool vz_reseeded = false;
    NmResult nm;
    FidelityReport report; // final_samples at final_seed
};

/// F of a parameter vector with the given sampling settings.
FidelityReport evaluate_gate(AsymCnotSimulator& sim, const CnotAsymParams& params, std::size_t samples,
                             std::uint64_t seed);

/// Minimizes 1 - F over the free coordinates of the parameter vector.
CalibrationResult optimize_gate(AsymCnotSimulator& sim, const CnotAsymParams& seed, const std::vector<bool>& free,
                                const CalibrationOptions& opts = {});

struct SweepAxis {
    std::string name; // one of f1, TS, OmegaS, rho, gamma1
    std::vector<double> values;
};

struct SweepPoint {
    std::vector<double> coordinates; // one per axis
    std::vector<double> success_probs;
    double orthogonality = 0.0;
    double score = 0.0; // lower is better
    std::size_t rank = 0;
};

struct SeedSearchReport {
    std::vector<SweepAxis> axes;
    std::vector<SweepPoint> points;          // grid order, last axis fastest
    std::vector<std::size_t> ranked;         // point indices, best first
};

/// Scores each CR-only grid point by var(p_b) + (1 - orthogonality), where
/// orthogonality = (1 - r_0 . r_1) / 2 for the target Bloch vectors
/// conditioned on the control state.
SeedSearchReport sweet_spot_search(AsymCnotSimulator& sim, const CnotAsymParams& base,
                                   const std::vector<SweepAxis>& axes);

/// Single-point diagnostics of the CR segment alone.
SweepPoint score_cr_point(AsymCnotSimulator& sim, const CnotAsymParams& params);

struct AuxFitOptions {
    NmConfig nm;
    std::size_t samples = 512;
    std::uint64_t seed = 11;
    double min_fidelity = 0.9;
};

struct AuxFitResult {
    CnotAsymParams params;
    double mean_success = 0.0;
    double fidelity = 0.0;
    bool local_maximum = false; // F below the threshold: the CR point must be reset
    NmResult aux_nm;
    VzFit vz;
};

/// Step 2: maximize the mean success probability over (f2, TX, OmegaX,
/// gamma2). Step 3: fit the VZ angles.
AuxFitResult aux_and_vz_fit(AsymCnotSimulator& sim, const CnotAsymParams& cr_point, const AuxFitOptions& opts = {});

} // namespace crsim
