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


#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "crsim/calibration.hpp"
#include "crsim/optimizer.hpp"
#include "test_support.hpp"

using namespace crsim;

namespace {

double wrap_distance(double a, double b)
{
    return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

} // namespace

TEST(NelderMead, TwelveDimensionalQuadratic)
{
    const Objective f = [](const Eigen::VectorXd& x) { return (x.array() - 1.0).square().sum(); };
    NmConfig cfg;
    cfg.max_evaluations = 200000;
    // A 1e-6 simplex can stall a few 1e-6 away from the minimizer in 12 dimensions.
    cfg.x_tolerance = 1e-9;
    cfg.f_tolerance = 1e-15;
    const NmResult r = nelder_mead(f, Eigen::VectorXd::Zero(12), ParamSpace::unbounded(12), cfg);
    EXPECT_FALSE(r.exhausted);
    EXPECT_LE((r.x.array() - 1.0).abs().maxCoeff(), 1e-6) << r.x.transpose();
}

TEST(NelderMead, Rosenbrock)
{
    const Objective f = [](const Eigen::VectorXd& x) {
        return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
    };
    const NmResult r = nelder_mead(f, Eigen::Vector2d(-1.2, 1.0), ParamSpace::unbounded(2));
    EXPECT_NEAR(r.x(0), 1.0, 1e-4);
    EXPECT_NEAR(r.x(1), 1.0, 1e-4);
}

TEST(NelderMead, MaskedCoordinatesStayExactlyFixed)
{
    const Objective f = [](const Eigen::VectorXd& x) { return (x.array() - 2.0).square().sum(); };
    ParamSpace s = ParamSpace::unbounded(4);
    s.free = {true, false, true, false};
    const Eigen::VectorXd x0 = Eigen::Vector4d(0.1, 0.3, -0.2, 0.7);
    const NmResult r = nelder_mead(f, x0, s);
    EXPECT_EQ(r.x(1), x0(1));
    EXPECT_EQ(r.x(3), x0(3));
    EXPECT_NEAR(r.x(0), 2.0, 1e-4);
    EXPECT_NEAR(r.x(2), 2.0, 1e-4);
}

TEST(NelderMead, EmptyMaskReturnsSeed)
{
    int calls = 0;
    const Objective f = [&](const Eigen::VectorXd& x) {
        ++calls;
        return x.squaredNorm();
    };
    ParamSpace s = ParamSpace::unbounded(3);
    s.free.assign(3, false);
    const Eigen::VectorXd x0 = Eigen::Vector3d(1, 2, 3);
    const NmResult r = nelder_mead(f, x0, s);
    EXPECT_EQ(r.x, x0);
    EXPECT_EQ(r.f, 14.0);
    EXPECT_EQ(r.evaluations, 1U);
    EXPECT_EQ(calls, 1);
}

TEST(NelderMead, BestValueIsMonotoneAndTraceDeterministic)
{
    const Objective f = [](const Eigen::VectorXd& x) {
        return std::sin(3 * x(0)) + (x.array() - 0.5).square().sum();
    };
    const NmResult a = nelder_mead(f, Eigen::Vector3d(2, -1, 0), ParamSpace::unbounded(3));
    const NmResult b = nelder_mead(f, Eigen::Vector3d(2, -1, 0), ParamSpace::unbounded(3));
    ASSERT_FALSE(a.trace.rows.empty());
    for (std::size_t k = 1; k < a.trace.rows.size(); ++k)
        EXPECT_LE(a.trace.rows[k].best_f, a.trace.rows[k - 1].best_f);
    EXPECT_LE(a.f, f(Eigen::Vector3d(2, -1, 0)));
    ASSERT_EQ(a.trace.rows.size(), b.trace.rows.size());
    for (std::size_t k = 0; k < a.trace.rows.size(); ++k) {
        EXPECT_EQ(a.trace.rows[k].best_f, b.trace.rows[k].best_f);
        EXPECT_EQ(a.trace.rows[k].diameter, b.trace.rows[k].diameter);
    }
    EXPECT_EQ(a.x, b.x);
}

TEST(NelderMead, BudgetExhaustionIsReported)
{
    const Objective f = [](const Eigen::VectorXd& x) { return (x.array() - 3.0).square().sum(); };
    NmConfig cfg;
    cfg.max_evaluations = 25;
    const NmResult r = nelder_mead(f, Eigen::VectorXd::Zero(5), ParamSpace::unbounded(5), cfg);
    EXPECT_TRUE(r.exhausted);
    EXPECT_LE(r.evaluations, 25U);
    EXPECT_LT(r.f, 45.0);
}

TEST(NelderMead, NanIsTreatedAsInfinity)
{
    const Objective f = [](const Eigen::VectorXd& x) {
        return x(0) > 1.5 ? std::numeric_limits<double>::quiet_NaN() : (x(0) - 1.0) * (x(0) - 1.0) + x(1) * x(1);
    };
    const NmResult r = nelder_mead(f, Eigen::Vector2d(0.0, 0.5), ParamSpace::unbounded(2));
    EXPECT_NEAR(r.x(0), 1.0, 1e-4);
    EXPECT_TRUE(std::isfinite(r.f));
}

TEST(NelderMead, SoftBoundsPenalize)
{
    ParamSpace s = ParamSpace::unbounded(1);
    s.lower(0) = 0.0;
    s.upper(0) = 1.0;
    s.penalty_weight = 1e4;
    EXPECT_EQ(s.penalty(Eigen::VectorXd::Constant(1, 0.5)), 0.0);
    EXPECT_GT(s.penalty(Eigen::VectorXd::Constant(1, 1.1)), 0.0);
    const Objective f = [](const Eigen::VectorXd& x) { return -x(0); };
    const NmResult r = nelder_mead(f, Eigen::VectorXd::Constant(1, 0.5), s);
    EXPECT_NEAR(r.x(0), 1.0, 1e-3);
}

TEST(NelderMead, RejectsNonFiniteStart)
{
    const Objective f = [](const Eigen::VectorXd&) { return std::numeric_limits<double>::infinity(); };
    EXPECT_THROW(nelder_mead(f, Eigen::VectorXd::Zero(2), ParamSpace::unbounded(2)), InputError);
    NmConfig bad;
    bad.contraction = 1.5;
    EXPECT_THROW(bad.validate(), InputError);
}

class Table5 : public ::testing::Test {
protected:
    void SetUp() override { ops_ = std::make_unique<SystemOperators>(build_system(crsim::testing::two_transmon())); }
    std::unique_ptr<SystemOperators> ops_;
};

TEST_F(Table5, ChainedSimulatorMatchesSingleEvolution)
{
    for (const char* layout : {"literal", "inclusive"}) {
        GateRecord g = crsim::testing::record("table5.json", "CNOT_10_asym");
        g.set_layout(parse_cr_layout(layout));
        AsymCnotSimulator sim(*ops_, EvolutionConfig{});
        const Propagator& chained = sim.simulate(g.asym);
        const Propagator whole = evolve(g.program(ops_->device), *ops_, EvolutionConfig{});
        EXPECT_LE((chained.matrix - whole.matrix).cwiseAbs().maxCoeff(), 1e-11) << layout;
        EXPECT_EQ(chained.total_time_ns, whole.total_time_ns);
    }
}

TEST_F(Table5, CachingSkipsRedundantSegments)
{
    const GateRecord g = crsim::testing::record("table5.json", "CNOT_01_asym");
    AsymCnotSimulator sim(*ops_, EvolutionConfig{});
    CnotAsymParams p = g.asym;
    sim.simulate(p);
    EXPECT_EQ(sim.cr_evolutions(), 1U);
    EXPECT_EQ(sim.aux_evolutions(), 1U);
    p.theta[0] += 0.3;
    sim.simulate(p);
    EXPECT_EQ(sim.cr_evolutions(), 1U);
    EXPECT_EQ(sim.aux_evolutions(), 1U);
    p.gamma2 += 0.1;
    sim.simulate(p);
    EXPECT_EQ(sim.cr_evolutions(), 1U);
    EXPECT_EQ(sim.aux_evolutions(), 2U);
    p.omega_s += 0.001;
    sim.simulate(p);
    EXPECT_EQ(sim.cr_evolutions(), 2U);
}

TEST_F(Table5, BothDirectionsReachPointNineNine)
{
    for (const char* label : {"CNOT_01_asym", "CNOT_10_asym"}) {
        GateRecord g = crsim::testing::record("table5.json", label);
        g.set_layout(CrLayout::Inclusive);
        AsymCnotSimulator sim(*ops_, EvolutionConfig{});
        const auto mask = mask_from_names(default_param_space(g.asym), {"gamma2", "theta0", "theta1"});
        const CalibrationResult r = optimize_gate(sim, g.asym, mask);
        EXPECT_GE(r.report.fidelity, 0.99) << label;
        EXPECT_LE(r.nm.f, 1.0 - r.start_inner_fidelity + 1e-15);
        // Objective consistency between the inner and final estimates.
        const FidelityReport inner = evaluate_gate(sim, r.params, 512, 11);
        EXPECT_LE(std::abs(inner.fidelity - r.report.fidelity), 3.0 * std::hypot(inner.std_error, r.report.std_error));
    }
}

TEST_F(Table5, EmptyMaskReturnsSeedAndItsFidelity)
{
    const GateRecord g = crsim::testing::record("table5.json", "CNOT_01_asym");
    AsymCnotSimulator sim(*ops_, EvolutionConfig{});
    const auto space = default_param_space(g.asym);
    const CalibrationResult r = optimize_gate(sim, g.asym, mask_from_names(space, {}));
    EXPECT_EQ(r.params.to_vector(), g.asym.to_vector());
    EXPECT_EQ(r.nm.evaluations, 1U);
    EXPECT_EQ(r.report.fidelity, evaluate_gate(sim, g.asym, 10000, 20240601).fidelity);
}

TEST_F(Table5, ZeroAmplitudeSeedGivesIdentityBaseline)
{
    CnotAsymParams p = crsim::testing::record("table5.json", "CNOT_01_asym").asym;
    p.omega_s = 0.0;
    p.omega_x = 0.0;
    AsymCnotSimulator sim(*ops_, EvolutionConfig{});
    const auto space = default_param_space(p);
    const CalibrationResult r = optimize_gate(sim, p, mask_from_names(space, {}));
    EXPECT_EQ(r.params.to_vector(), p.to_vector());
    // An idle pulse scored against CNOT: half the basis states are mapped correctly.
    const Propagator& u = sim.simulate(p);
    const FidelityReport idle =
        gate_report(u, VzGate{p.theta}, ideal_cnot(p.control, p.target, 2), ops_->indexer, 10000, 20240601);
    EXPECT_EQ(r.report.fidelity, idle.fidelity);
    EXPECT_LT(idle.fidelity, 0.8);
}

TEST_F(Table5, MaskRespectedAndDeterministic)
{
    const GateRecord g = crsim::testing::record("table5.json", "CNOT_10_asym");
    CalibrationOptions opts;
    opts.nm.max_evaluations = 40;
    const auto mask = mask_from_names(default_param_space(g.asym), {"gamma2", "OmegaX"});
    AsymCnotSimulator a(*ops_, EvolutionConfig{});
    AsymCnotSimulator b(*ops_, EvolutionConfig{});
    const CalibrationResult ra = optimize_gate(a, g.asym, mask, opts);
    const CalibrationResult rb = optimize_gate(b, g.asym, mask, opts);
    const Eigen::VectorXd x0 = g.asym.to_vector();
    for (Eigen::Index i = 0; i < x0.size(); ++i)
        if (!mask[static_cast<std::size_t>(i)])
            EXPECT_EQ(ra.params.to_vector()(i), x0(i)) << i;
    EXPECT_EQ(ra.params.to_vector(), rb.params.to_vector());
    ASSERT_EQ(ra.nm.trace.rows.size(), rb.nm.trace.rows.size());
    for (std::size_t k = 0; k < ra.nm.trace.rows.size(); ++k)
        EXPECT_EQ(ra.nm.trace.rows[k].best_f, rb.nm.trace.rows[k].best_f);
}

TEST_F(Table5, AuxFitFlagsMissingConditionalRotation)
{
    CnotAsymParams p = crsim::testing::record("table5.json", "CNOT_01_asym").asym;
    p.omega_s = 0.0;
    AsymCnotSimulator sim(*ops_, EvolutionConfig{});
    AuxFitOptions opts;
    opts.nm.max_evaluations = 60;
    const AuxFitResult r = aux_and_vz_fit(sim, p, opts);
    EXPECT_TRUE(r.local_maximum);
    EXPECT_LT(r.fidelity, opts.min_fidelity);
}

TEST(VzFit, RecoversSyntheticPhases)
{
    const IdealGate g = ideal_cnot(0, 1, 3);
    const std::vector<double> theta = {0.8, -1.9, 2.7};
    // U_pulse = Z(theta)^dagger CNOT, so Z(theta) U_pulse = CNOT.
    const Eigen::MatrixXcd u = VzGate{theta}.diagonal().conjugate().asDiagonal() * g.unitary;
    const std::vector<double> est = estimate_vz_angles(u, g);
    const VzFit fit = fit_vz_angles(u, g, {}, 512, 11);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_LE(wrap_distance(est[i], theta[i]), 1e-9);
        EXPECT_LE(wrap_distance(fit.angles[i], theta[i]), 1e-6);
        EXPECT_GT(fit.angles[i], -std::numbers::pi);
        EXPECT_LE(fit.angles[i], std::numbers::pi);
    }
    EXPECT_NEAR(fit.fidelity, 1.0, 1e-12);
}

TEST(VzFit, CnotNeedsNoCorrection)
{
    const IdealGate g = ideal_cnot(1, 0, 2);
    const VzFit fit = fit_vz_angles(g.unitary, g, {}, 512, 11);
    for (double a : fit.angles)
        EXPECT_LE(wrap_distance(a, 0.0), 1e-6);
}

TEST(ParamSpace, DefaultsAndMasks)
{
    const CnotAsymParams p = crsim::testing::record("table3.json", "CNOT_01").asym;
    const ParamSpace s = default_param_space(p);
    EXPECT_EQ(s.dimension(), 12U);
    EXPECT_NO_THROW(s.validate());
    const auto m = mask_from_names(s, {"gamma2", "theta1"});
    EXPECT_EQ(std::count(m.begin(), m.end(), true), 2);
    EXPECT_THROW(mask_from_names(s, {"delta"}), InputError);
}

class Table3 : public ::testing::Test {
protected:
    static void SetUpTestSuite() { ops_ = new SystemOperators(build_system(crsim::testing::three_transmon())); }
    static void TearDownTestSuite() { delete ops_; }
    static SystemOperators* ops_;
};
SystemOperators* Table3::ops_ = nullptr;

TEST_F(Table3, Cnot01GammaAndVzWithinThreeHundredEvaluations)
{
    GateRecord g = crsim::testing::record("table3.json", "CNOT_01");
    g.set_layout(CrLayout::Inclusive);
    AsymCnotSimulator sim(*ops_, EvolutionConfig{});
    CalibrationOptions opts;
    opts.nm.max_evaluations = 300;
    const auto mask = mask_from_names(default_param_space(g.asym), {"gamma2", "theta0", "theta1", "theta2"});
    const CalibrationResult r = optimize_gate(sim, g.asym, mask, opts);
    EXPECT_LE(r.nm.evaluations, 300U);
    EXPECT_GE(r.report.fidelity, 0.98);
    EXPECT_LE(r.nm.f, 1.0 - r.seed_inner_fidelity);
}

TEST_F(Table3, SweetSpotRanksPrintedCrPointInTopDecile)
{
    GateRecord g = crsim::testing::record("table3.json", "CNOT_01");
    g.set_layout(CrLayout::Inclusive);
    AsymCnotSimulator sim(*ops_, EvolutionConfig{});
    const std::vector<SweepAxis> axes = {{"OmegaS", {0.05, 0.07, 0.09}}, {"TS", {90, 110, 130, 150, 170}}};
    const SeedSearchReport rep = sweet_spot_search(sim, g.asym, axes);
    ASSERT_EQ(rep.points.size(), 15U);
    std::size_t printed = rep.points.size();
    for (std::size_t k = 0; k < rep.points.size(); ++k)
        if (rep.points[k].coordinates == std::vector<double>{0.07, 130.0})
            printed = k;
    ASSERT_LT(printed, rep.points.size());
    const double decile = 0.1 * static_cast<double>(rep.points.size());
    // Ranks are 0-based.
    EXPECT_LE(static_cast<double>(rep.points[printed].rank + 1), std::max(1.0, decile))
        << "rank " << rep.points[printed].rank + 1 << " of " << rep.points.size();
}

TEST_F(Table3, ZeroAmplitudePointRanksLastAtBaseline)
{
    GateRecord g = crsim::testing::record("table3.json", "CNOT_01");
    g.set_layout(CrLayout::Inclusive);
    AsymCnotSimulator sim(*ops_, EvolutionConfig{});
    const SeedSearchReport rep = sweet_spot_search(sim, g.asym, {{"OmegaS", {0.0, 0.07}}});
    ASSERT_EQ(rep.points.size(), 2U);
    EXPECT_EQ(rep.ranked.back(), 0U);
    // No rotation: p_b is 1 for control-0 states and 0 otherwise (variance 1/4),
    // and both conditional target states coincide.
    EXPECT_NEAR(rep.points[0].orthogonality, 0.0, 0.01);
    EXPECT_NEAR(rep.points[0].score, 1.25, 0.01);
}

TEST_F(Table3, SinglePointGrid)
{
    GateRecord g = crsim::testing::record("table3.json", "CNOT_01");
    g.set_layout(CrLayout::Inclusive);
    AsymCnotSimulator sim(*ops_, EvolutionConfig{});
    const SeedSearchReport rep = sweet_spot_search(sim, g.asym, {{"TS", {130.0}}});
    ASSERT_EQ(rep.points.size(), 1U);
    EXPECT_EQ(rep.ranked, std::vector<std::size_t>{0});
    const SweepPoint direct = score_cr_point(sim, g.asym);
    EXPECT_EQ(rep.points[0].score, direct.score);
}
