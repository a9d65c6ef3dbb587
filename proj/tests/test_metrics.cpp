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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "crsim/metrics.hpp"
#include "test_support.hpp"

using namespace crsim;

namespace {

Eigen::MatrixXcd random_unitary(Eigen::Index d, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    Eigen::MatrixXcd a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            a(i, j) = {n(rng), n(rng)};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    return qr.householderQ();
}

// CNOT perturbed by a small coherent error.
Eigen::MatrixXcd near_cnot(const IdealGate& g, double strength, std::uint64_t seed)
{
    Eigen::MatrixXcd h = random_unitary(g.unitary.rows(), seed);
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd ph(h.rows());
    for (Eigen::Index j = 0; j < h.rows(); ++j)
        ph(j) = std::polar(1.0, strength * es.eigenvalues()(j));
    return g.unitary * es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

Propagator idle_propagator(const BasisIndexer& idx)
{
    Propagator p;
    p.columns = idx.computational();
    p.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(idx.dimension()),
                                      static_cast<Eigen::Index>(p.columns.size()));
    for (std::size_t c = 0; c < p.columns.size(); ++c)
        p.matrix(static_cast<Eigen::Index>(p.columns[c]), static_cast<Eigen::Index>(c)) = 1.0;
    return p;
}

} // namespace

TEST(IdealGate, CnotTruthTable)
{
    const BasisIndexer idx({4, 4, 4, 4});
    const IdealGate g = ideal_cnot(0, 1, 3);
    auto pos = [&](const std::string& bits) {
        const auto& comp = idx.computational();
        return static_cast<Eigen::Index>(std::find(comp.begin(), comp.end(), idx.from_bitstring(bits)) - comp.begin());
    };
    EXPECT_EQ(g.unitary(pos("110"), pos("100")), cplx(1.0));
    EXPECT_EQ(g.unitary(pos("000"), pos("000")), cplx(1.0));
    EXPECT_EQ(g.unitary(pos("111"), pos("101")), cplx(1.0));
    EXPECT_EQ(g.unitary(pos("001"), pos("001")), cplx(1.0));
    EXPECT_EQ((g.unitary * g.unitary - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff(), 0.0);
    const IdealGate r = ideal_cnot(2, 0, 3);
    EXPECT_EQ(r.unitary(pos("101"), pos("001")), cplx(1.0));
    EXPECT_THROW(ideal_cnot(1, 1, 3), InputError);
}

TEST(Vz, ZeroAndPeriodicAnglesLeaveGateUnchanged)
{
    const Eigen::MatrixXcd u = random_unitary(8, 3);
    EXPECT_EQ(apply_vz(VzGate{{0, 0, 0}}, u), u);
    EXPECT_LE((apply_vz(VzGate{{2 * std::numbers::pi, 0, 0}}, u) - u).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Vz, PiOnQubitZeroFlipsSigns)
{
    const Eigen::MatrixXcd z = apply_vz(VzGate{{std::numbers::pi, 0, 0}}, Eigen::MatrixXcd::Identity(8, 8));
    for (Eigen::Index b = 0; b < 8; ++b)
        EXPECT_NEAR(z(b, b).real(), b >= 4 ? -1.0 : 1.0, 1e-15);
}

TEST(Fidelity, IdenticalGateScoresOne)
{
    const IdealGate g = ideal_cnot(0, 1, 3);
    for (std::size_t m : {1U, 17U, 1000U}) {
        EXPECT_NEAR(average_fidelity(g.unitary, g, m, 5).fidelity, 1.0, 1e-14);
        const IdealGate r{random_unitary(8, m), "random", 0, 0, 3};
        EXPECT_NEAR(average_fidelity(r.unitary, r, m, 9).fidelity, 1.0, 1e-14);
    }
}

TEST(Fidelity, GlobalPhaseInvariance)
{
    const IdealGate g = ideal_cnot(1, 0, 2);
    const Eigen::MatrixXcd u = std::polar(1.0, 0.731) * g.unitary;
    EXPECT_NEAR(average_fidelity(u, g, 500, 1).fidelity, 1.0, 1e-14);
}

TEST(Fidelity, DeterministicPerSeed)
{
    const IdealGate g = ideal_cnot(0, 1, 3);
    const Eigen::MatrixXcd u = near_cnot(g, 0.3, 4);
    const FidelityReport a = average_fidelity(u, g, 2000, 42);
    const FidelityReport b = average_fidelity(u, g, 2000, 42);
    EXPECT_EQ(a.fidelity, b.fidelity);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_NE(a.fidelity, average_fidelity(u, g, 2000, 43).fidelity);
}

TEST(Fidelity, SeedScatterWithinThreeStandardErrors)
{
    const IdealGate g = ideal_cnot(0, 1, 3);
    const Eigen::MatrixXcd u = near_cnot(g, 0.4, 8);
    const FidelityReport big = average_fidelity(u, g, 40000, 1000);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const FidelityReport r = average_fidelity(u, g, 10000, seed);
        EXPECT_LE(std::abs(r.fidelity - big.fidelity), 3.0 * std::hypot(r.std_error, big.std_error));
    }
}

TEST(Fidelity, StandardFormulaDiagnostic)
{
    const IdealGate g = ideal_cnot(0, 1, 2);
    EXPECT_NEAR(standard_average_gate_fidelity(g.unitary, g), 1.0, 1e-14);
    const Eigen::MatrixXcd u = near_cnot(g, 0.2, 2);
    const double fs = standard_average_gate_fidelity(u, g);
    EXPECT_LT(fs, 1.0);
    EXPECT_GT(fs, 0.9);
}

TEST(Haar, CounterBasedAndNormalized)
{
    const HaarSampler s(77);
    const Eigen::VectorXcd late = s.sample(500, 8);
    for (std::uint64_t j = 0; j < 10; ++j)
        EXPECT_NEAR(s.sample(j, 8).norm(), 1.0, 1e-14);
    EXPECT_EQ(HaarSampler(77).sample(500, 8), late);
    EXPECT_NE(HaarSampler(78).sample(500, 8), late);
}

TEST(Haar, SecondMomentMatchesUniformMeasure)
{
    // E|psi_0|^2 = 1/d and E|psi_0|^4 = 2/(d(d+1)) for Haar states.
    const HaarSampler s(3);
    const int d = 4;
    double m2 = 0.0, m4 = 0.0;
    const int n = 40000;
    for (int j = 0; j < n; ++j) {
        const double p = std::norm(s.sample(static_cast<std::uint64_t>(j), d)(0));
        m2 += p / n;
        m4 += p * p / n;
    }
    EXPECT_NEAR(m2, 1.0 / d, 0.005);
    EXPECT_NEAR(m4, 2.0 / (d * (d + 1)), 0.005);
}

TEST(Success, IdentityPulseAgainstIdentity)
{
    const BasisIndexer idx({4, 4, 4, 4});
    const Propagator p = idle_propagator(idx);
    for (double v : success_probabilities(p, ideal_identity(3), idx))
        EXPECT_EQ(v, 1.0);
    const FidelityReport r = gate_report(p, VzGate{{0, 0, 0}}, ideal_identity(3), idx, 100, 1);
    EXPECT_EQ(r.basis_labels.front(), "000");
    EXPECT_EQ(r.basis_labels.back(), "111");
    EXPECT_NEAR(r.fidelity, 1.0, 1e-14);
    EXPECT_NEAR(r.leakage, 0.0, 1e-12);
    EXPECT_NEAR(r.resonator_excitation, 0.0, 1e-12);
}

TEST(Leakage, CompletenessForArbitraryStates)
{
    const BasisIndexer idx({4, 4, 4});
    Propagator p;
    p.columns = idx.computational();
    p.matrix = random_unitary(64, 12).leftCols(4);
    const LeakageDiagnostics diag = leakage_diagnostics(p, idx);
    for (std::size_t c = 0; c < 4; ++c) {
        double in_comp = 0.0;
        for (auto j : idx.computational())
            in_comp += std::norm(p.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)));
        EXPECT_NEAR(diag.leakage[c] + in_comp, 1.0, 1e-12);
        EXPECT_GE(diag.resonator[c], 0.0);
        EXPECT_LE(diag.resonator[c], diag.leakage[c] + 1e-12);
    }
}

TEST(Metrics, CompensatedSum)
{
    const std::vector<double> v = {1e16, 1.0, -1e16, 1.0};
    EXPECT_EQ(compensated_sum(v), 2.0);
}
