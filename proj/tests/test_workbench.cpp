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


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "crsim/device_io.hpp"
#include "crsim/report_io.hpp"
#include "crsim/workbench.hpp"
#include "test_support.hpp"

using namespace crsim;
using crsim::testing::data_path;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "crsim");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_workbench(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class Workbench : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        root_ = fs::temp_directory_path() / "crsim_cli_tests" / info->name();
        fs::remove_all(root_);
        fs::create_directories(root_);
        setenv("CRSIM_OUTPUT_ROOT", (root_ / "runs").c_str(), 1);
    }
    std::string out(const std::string& name) const { return (root_ / name).string(); }
    std::string uncoupled_device() const
    {
        const std::string p = out("uncoupled.json");
        write_json_file(p, device_to_json(crsim::testing::uncoupled(crsim::testing::three_transmon())));
        return p;
    }
    fs::path root_;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_F(Workbench, SpectrumPrintsTabulatedFrequencies)
{
    const CliResult r = cli({"spectrum", "--device", data_path("devices/three_transmon.json"), "--out", out("s")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json j = read_json_file(out("s/spectrum.json"));
    const double expected[] = {5.0851, 4.9783, 4.8895};
    for (int i = 0; i < 3; ++i) {
        const double w = j["transmons"][i]["omega01_GHz"].get<double>();
        EXPECT_NEAR(w, expected[i], 0.015);
        const double det = j["transmons"][i]["resonator_detuning_GHz"].get<double>();
        EXPECT_GT(det, 1.8);
        EXPECT_LT(det, 2.2);
    }
    EXPECT_NEAR(j["qubit_detunings_GHz"]["01"].get<double>(), 0.107, 0.005);
    EXPECT_NEAR(j["qubit_detunings_GHz"]["12"].get<double>(), 0.089, 0.005);
    EXPECT_TRUE(fs::exists(out("s/manifest.json")));
}

TEST_F(Workbench, SpectrumDressedFrequenciesLieBelowBare)
{
    for (const auto& row : device_spectrum(crsim::testing::three_transmon())) {
        EXPECT_LT(row.dressed_omega01_ghz, row.omega01_ghz);
        EXPECT_GT(row.dressed_omega01_ghz, row.omega01_ghz - 0.01);
    }
}

TEST_F(Workbench, InputErrorsExitTwo)
{
    EXPECT_EQ(cli({}).code, kExitInput);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitInput);
    EXPECT_EQ(cli({"spectrum", "--device", "/nonexistent.json"}).code, kExitInput);
    EXPECT_EQ(cli({"fidelity"}).code, kExitInput);
    EXPECT_EQ(cli({"fidelity", "--pulse", data_path("pulses/table5.json"), "--gate", "nope"}).code, kExitInput);
    EXPECT_EQ(cli({"fidelity", "--pulse", data_path("pulses/table5.json"), "--method", "rk4"}).code, kExitInput);
    EXPECT_EQ(cli({"fidelity", "--pulse", data_path("pulses/table5.json"), "--layout", "diagonal"}).code,
              kExitInput);
    EXPECT_EQ(cli({"bloch", "--pulse", data_path("pulses/table5.json"), "--initial", "0,9"}).code, kExitInput);
    EXPECT_EQ(cli({"evolve", "--pulse", data_path("pulses/table5.json"), "--tau-ps", "-1"}).code, kExitInput);
    EXPECT_EQ(cli({"optimize", "--pulse", data_path("pulses/table5.json"), "--free", "delta"}).code, kExitInput);
    EXPECT_EQ(cli({"sweep", "--pulse", data_path("pulses/table5.json"), "--axis", "OmegaS"}).code, kExitInput);
    EXPECT_EQ(cli({"seed-search", "--pulse", data_path("pulses/table5.json"), "--axis", "bogus=1"}).code, kExitInput);
    EXPECT_EQ(cli({"reproduce", "--table", "7"}).code, kExitInput);
    EXPECT_EQ(cli({"validate"}).code, kExitInput);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST_F(Workbench, IdentityRecordScoresOne)
{
    const CliResult r = cli({"fidelity", "--pulse", data_path("pulses/identity.json"), "--gate", "I3", "--device",
                       uncoupled_device(), "--M", "2000", "--out", out("f"), "--min-f", "0.999999"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NEAR(read_json_file(out("f/report.json"))["F"].get<double>(), 1.0, 1e-12);
}

TEST_F(Workbench, FidelityThresholdExitCodes)
{
    const std::string pulse = data_path("pulses/table5.json");
    // Printed angles under the literal layout: far from a CNOT.
    const CliResult low = cli({"fidelity", "--pulse", pulse, "--gate", "CNOT_01_asym", "--M", "500", "--min-f", "0.9"});
    EXPECT_EQ(low.code, kExitThreshold);
    const CliResult ok = cli({"fidelity", "--pulse", pulse, "--gate", "CNOT_01_asym", "--M", "500", "--min-f", "0.1"});
    EXPECT_EQ(ok.code, kExitOk);
    const CliResult plain = cli({"success", "--pulse", pulse, "--gate", "CNOT_01_asym", "--M", "500"});
    EXPECT_EQ(plain.code, kExitOk);
    EXPECT_NE(plain.out.find("mean"), std::string::npos);
}

TEST_F(Workbench, ShippedReoptimizedRecordsClearTheirFloor)
{
    const std::string pulse = data_path("pulses/reoptimized.json");
    EXPECT_EQ(cli({"fidelity", "--pulse", pulse, "--gate", "CNOT_01", "--min-f", "0.98"}).code, kExitOk);
    EXPECT_EQ(cli({"fidelity", "--pulse", pulse, "--gate", "CNOT_10_asym", "--min-f", "0.99"}).code, kExitOk);
}

TEST_F(Workbench, SameSeedGivesByteIdenticalReport)
{
    const std::string pulse = data_path("pulses/table5.json");
    for (const char* dir : {"a", "b"})
        ASSERT_EQ(cli({"fidelity", "--pulse", pulse, "--gate", "CNOT_10_asym", "--M", "800", "--seed", "5", "--out",
                       out(dir)})
                      .code,
                  kExitOk);
    EXPECT_EQ(slurp(out("a/report.json")), slurp(out("b/report.json")));
    EXPECT_EQ(slurp(out("a/success.csv")), slurp(out("b/success.csv")));
}

TEST_F(Workbench, ManifestHashesMatchAndInputsUntouched)
{
    const std::string pulse = data_path("pulses/table5.json");
    const std::string device = data_path("devices/two_transmon.json");
    const std::string before_pulse = sha256_file(pulse), before_device = sha256_file(device);
    ASSERT_EQ(cli({"fidelity", "--pulse", pulse, "--device", device, "--M", "200", "--out", out("m")}).code, kExitOk);
    const RunManifest m = RunManifest::from_json(read_json_file(out("m/manifest.json")));
    EXPECT_EQ(m.pulse_sha256, before_pulse);
    EXPECT_EQ(m.device_sha256, before_device);
    EXPECT_EQ(m.tool_version, tool_version());
    EXPECT_EQ(m.seeds.at("monte_carlo"), 20240601U);
    EXPECT_EQ(sha256_file(pulse), before_pulse);
    EXPECT_EQ(sha256_file(device), before_device);
    EXPECT_EQ(cli({"validate", "--manifest", out("m/manifest.json")}).code, kExitOk);

    // A manifest whose input changed no longer validates.
    const std::string copy = out("copy.json");
    fs::copy_file(pulse, copy);
    ASSERT_EQ(cli({"fidelity", "--pulse", copy, "--M", "200", "--out", out("n")}).code, kExitOk);
    std::ofstream(copy, std::ios::app) << "\n";
    EXPECT_EQ(cli({"validate", "--manifest", out("n/manifest.json")}).code, kExitInput);
}

TEST_F(Workbench, ManifestReExecutesToIdenticalResults)
{
    const std::string pulse = data_path("pulses/table5.json");
    ASSERT_EQ(cli({"fidelity", "--pulse", pulse, "--gate", "CNOT_01_asym", "--M", "300", "--seed", "9", "--out",
                   out("first")})
                  .code,
              kExitOk);
    const json cfg = read_json_file(out("first/manifest.json"))["config"];
    std::vector<std::string> args = cfg["argv"].get<std::vector<std::string>>();
    args.erase(args.begin());
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--out")
            args[i + 1] = out("second");
    ASSERT_EQ(cli(args).code, kExitOk);
    EXPECT_EQ(slurp(out("first/report.json")), slurp(out("second/report.json")));
}

TEST_F(Workbench, DefaultRunDirectoriesAreUnique)
{
    const std::string pulse = data_path("pulses/identity.json");
    ASSERT_EQ(cli({"fidelity", "--pulse", pulse, "--gate", "I2", "--M", "50"}).code, kExitOk);
    ASSERT_EQ(cli({"fidelity", "--pulse", pulse, "--gate", "I2", "--M", "50"}).code, kExitOk);
    std::size_t dirs = 0;
    for (const auto& e : fs::directory_iterator(root_ / "runs")) {
        EXPECT_EQ(e.path().filename().string().rfind("fidelity-", 0), 0U);
        ++dirs;
    }
    EXPECT_EQ(dirs, 2U);
}

TEST_F(Workbench, BlochWritesBothCsvLayouts)
{
    const CliResult r = cli({"bloch", "--pulse", data_path("pulses/identity.json"), "--gate", "I3", "--device",
                       uncoupled_device(), "--initial", "0,100", "--stride", "1000", "--out", out("b")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    std::ifstream in(out("b/trajectory.csv"));
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ss, cell, ','))
            v.push_back(std::stod(cell));
        // Zero program without coupling: constant Bloch rows.
        const double z = v[1] == 0.0 ? -1.0 : 1.0;
        EXPECT_NEAR(v[4], z, 1e-9);
    }
    EXPECT_EQ(rows, 3U * 21U);
    EXPECT_TRUE(fs::exists(out("b/trajectory_long.csv")));
}

TEST_F(Workbench, StateLabels)
{
    const BasisIndexer idx({4, 4, 4, 4});
    EXPECT_EQ(parse_state_label("0,100", idx), idx.flat({0, 1, 0, 0}));
    EXPECT_EQ(parse_state_label("|0,100>", idx), idx.flat({0, 1, 0, 0}));
    EXPECT_EQ(parse_state_label("100", idx), idx.flat({0, 1, 0, 0}));
    EXPECT_EQ(parse_state_label("2,013", idx), idx.flat({2, 0, 1, 3}));
    EXPECT_THROW(parse_state_label("0,1", idx), InputError);
    EXPECT_THROW(parse_state_label("0,104", idx), InputError);
}

TEST_F(Workbench, EvolveFullReportsUnitarity)
{
    const CliResult r = cli({"evolve", "--pulse", data_path("pulses/identity.json"), "--gate", "I2", "--full", "--tau-ps",
                       "10", "--out", out("e")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const Propagator p = propagator_from_json(read_json_file(out("e/propagator.json")));
    EXPECT_EQ(p.matrix.rows(), 64);
    EXPECT_EQ(p.matrix.cols(), 64);
    EXPECT_LE((p.matrix.adjoint() * p.matrix - Eigen::MatrixXcd::Identity(64, 64)).norm(), 1e-10);
    EXPECT_NE(r.out.find("unitarity residual"), std::string::npos);
}

TEST_F(Workbench, OptimizeEmptyMaskAndResume)
{
    const std::string pulse = data_path("pulses/table5.json");
    const CliResult r = cli({"optimize", "--pulse", pulse, "--gate", "CNOT_01_asym", "--free", "", "--M", "500", "--out",
                       out("o")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const PulseFile in = load_pulse_file(out("o/params_in.json"));
    const PulseFile res = load_pulse_file(out("o/params_out.json"));
    EXPECT_EQ(res.gates.front().asym.to_vector(), in.gates.front().asym.to_vector());
    for (const char* f : {"manifest.json", "trace.csv", "report.json"})
        EXPECT_TRUE(fs::exists(out(std::string("o/") + f))) << f;

    // Resume: params_out is itself a pulse file.
    const CliResult again = cli({"optimize", "--pulse", out("o/params_out.json"), "--free", "gamma2,theta", "--budget",
                           "30", "--M", "500", "--out", out("o2")});
    ASSERT_EQ(again.code, kExitOk) << again.err;
    const double f0 = read_json_file(out("o/report.json"))["F"].get<double>();
    const double f1 = read_json_file(out("o2/report.json"))["F"].get<double>();
    EXPECT_GT(f1, f0);
}

TEST_F(Workbench, SweepAndSeedSearchWriteGrids)
{
    const std::string pulse = data_path("pulses/table5.json");
    const CliResult s = cli({"sweep", "--pulse", pulse, "--gate", "CNOT_01_asym", "--layout", "inclusive", "--axis",
                       "gamma2=-0.9,-0.8", "--axis", "theta0=0,1", "--M", "200", "--out", out("sw")});
    ASSERT_EQ(s.code, kExitOk) << s.err;
    std::ifstream in(out("sw/sweep.csv"));
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "gamma2,theta0,F,stderr,mean_success,leakage");
    std::size_t rows = 0;
    while (std::getline(in, line))
        ++rows;
    EXPECT_EQ(rows, 4U);

    const CliResult ss = cli({"seed-search", "--pulse", pulse, "--gate", "CNOT_01_asym", "--axis", "OmegaS=0.1",
                        "--out", out("ss")});
    ASSERT_EQ(ss.code, kExitOk) << ss.err;
    EXPECT_TRUE(fs::exists(out("ss/sweep.csv")));
}

TEST_F(Workbench, ReproduceEvaluateOnlyExitsOneWhenEveryRowFails)
{
    // Printed angles, literal layout, no re-optimization: both rows miss.
    const CliResult r = cli({"reproduce", "--table", "5", "--budget", "0", "--M", "500", "--out", out("r")});
    EXPECT_EQ(r.code, kExitThreshold) << r.err;
    for (const char* f : {"summary.csv", "summary.md", "reports.json", "reoptimized.json", "manifest.json"})
        EXPECT_TRUE(fs::exists(out(std::string("r/") + f))) << f;
    const CliResult lenient = cli({"reproduce", "--table", "5", "--budget", "0", "--M", "500", "--min-f", "0.2", "--out",
                             out("r2")});
    EXPECT_EQ(lenient.code, kExitOk);
}

TEST_F(Workbench, ReproduceTableFiveReachesPointNineNine)
{
    const CliResult r = cli({"reproduce", "--table", "5", "--layout", "inclusive", "--free", "gamma2,theta", "--budget",
                       "300", "--out", out("t5")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const json reports = read_json_file(out("t5/reports.json"));
    for (const char* label : {"CNOT_01_asym", "CNOT_10_asym"})
        EXPECT_GE(reports[label]["F"].get<double>(), 0.99) << label;
}

TEST_F(Workbench, ValidateFixtures)
{
    for (const char* p : {"table3.json", "table4.json", "table5.json", "identity.json"}) {
        const CliResult r = cli({"validate", "--pulse", data_path(std::string("pulses/") + p)});
        EXPECT_EQ(r.code, kExitOk) << p << r.err;
    }
    EXPECT_EQ(cli({"validate", "--device", data_path("devices/three_transmon.json")}).code, kExitOk);
    const std::string bad = out("bad.json");
    std::ofstream(bad) << "{\"gates\": [{\"label\": \"x\", \"kind\": \"asym\"}]}";
    EXPECT_EQ(cli({"validate", "--pulse", bad}).code, kExitInput);
}
