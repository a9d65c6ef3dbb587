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


#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "crsim/device_io.hpp"
#include "crsim/pulse_io.hpp"
#include "crsim/report_io.hpp"
#include "test_support.hpp"

using namespace crsim;
using crsim::testing::data_path;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "crsim_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string error_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const InputError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(DeviceIo, RoundTripOnFixtures)
{
    for (const char* name : {"three_transmon", "two_transmon"}) {
        const json raw = read_json_file(data_path(std::string("devices/") + name + ".json"));
        const json once = device_to_json(device_from_json(raw));
        EXPECT_EQ(device_to_json(device_from_json(once)), once) << name;
        EXPECT_EQ(once, raw) << name;
    }
}

TEST(DeviceIo, FieldDiagnostics)
{
    json j = read_json_file(data_path("devices/two_transmon.json"));
    j["transmons"][1].erase("EJ_GHz");
    EXPECT_NE(error_of([&] { device_from_json(j); }).find("EJ_GHz"), std::string::npos);
    j = read_json_file(data_path("devices/two_transmon.json"));
    j["resonator"]["omega_GHz"] = "seven";
    EXPECT_NE(error_of([&] { device_from_json(j); }).find("omega_GHz"), std::string::npos);
    j = read_json_file(data_path("devices/two_transmon.json"));
    j["couplings_GHz"] = {0.07};
    EXPECT_FALSE(error_of([&] { device_from_json(j); }).empty());
}

TEST(DeviceIo, SyntaxErrorsReportLineAndColumn)
{
    const fs::path p = scratch("broken.json");
    std::ofstream(p) << "{\n  \"name\": \"x\",\n  \"transmons\": [,]\n}\n";
    const std::string msg = error_of([&] { read_json_file(p.string()); });
    EXPECT_NE(msg.find(p.string() + ":3:"), std::string::npos) << msg;
    EXPECT_FALSE(error_of([] { read_json_file("/nonexistent/device.json"); }).empty());
}

TEST(PulseIo, RoundTripOnFixtures)
{
    for (const char* name : {"table3.json", "table4.json", "table5.json", "identity.json"}) {
        const json raw = read_json_file(data_path(std::string("pulses/") + name));
        const json once = pulse_file_to_json(pulse_file_from_json(raw));
        EXPECT_EQ(pulse_file_to_json(pulse_file_from_json(once)), once) << name;
    }
}

TEST(PulseIo, PrintedValuesSurviveParsing)
{
    const GateRecord g = crsim::testing::record("table3.json", "CNOT_01");
    EXPECT_EQ(g.kind, GateKind::Asym);
    EXPECT_EQ(g.asym.f1_ghz, 4.9783);
    EXPECT_EQ(g.asym.gamma2, 2.2007);
    EXPECT_EQ(g.asym.theta, (std::vector<double>{0.6959, 0.0, 0.1001}));
    EXPECT_EQ(g.asym.layout, CrLayout::Literal);
    EXPECT_EQ(*g.f_reference, 0.9946);
    EXPECT_EQ(*g.device, "three_transmon");
    EXPECT_EQ(g.ideal().label, "CNOT_01");
}

TEST(PulseIo, RejectsUnknownAndMissingKeys)
{
    json j = read_json_file(data_path("pulses/table5.json"));
    j["gates"][0]["omegaS"] = 0.1;
    EXPECT_NE(error_of([&] { pulse_file_from_json(j); }).find("omegaS"), std::string::npos);
    j = read_json_file(data_path("pulses/table5.json"));
    j["gates"][0].erase("theta1");
    EXPECT_NE(error_of([&] { pulse_file_from_json(j); }).find("theta1"), std::string::npos);
    j = read_json_file(data_path("pulses/table5.json"));
    j["gates"][0]["kind"] = "sqrt_iswap";
    EXPECT_FALSE(error_of([&] { pulse_file_from_json(j); }).empty());
    EXPECT_FALSE(error_of([] { load_pulse_file(data_path("pulses/table5.json")).find("CNOT_99"); }).empty());
}

TEST(PulseIo, LayoutOverride)
{
    GateRecord g = crsim::testing::record("table4.json", "CNOT_10_sym");
    ASSERT_EQ(g.kind, GateKind::Ecr);
    g.set_layout(CrLayout::Inclusive);
    EXPECT_EQ(*g.layout(), CrLayout::Inclusive);
    EXPECT_EQ(g.ecr.control, 1U);
    EXPECT_EQ(g.ecr.target, 0U);
    EXPECT_FALSE(crsim::testing::record("identity.json", "I2").layout().has_value());
}

TEST(ReportIo, RoundTrip)
{
    FidelityReport r;
    r.fidelity = 0.99123456789;
    r.std_error = 1.5e-5;
    r.samples = 10000;
    r.seed = 20240601;
    r.basis_labels = {"00", "01", "10", "11"};
    r.success_probs = {0.99, 0.98, 0.97, 0.96};
    r.leakage = 0.003;
    r.resonator_excitation = 0.002;
    const json j = report_to_json(r);
    EXPECT_NEAR(j["mean_success"].get<double>(), 0.975, 1e-15);
    const FidelityReport back = report_from_json(j);
    EXPECT_EQ(back.fidelity, r.fidelity);
    EXPECT_EQ(back.success_probs, r.success_probs);
    EXPECT_EQ(back.basis_labels, r.basis_labels);
    EXPECT_EQ(report_to_json(back), j);
}

TEST(ReportIo, PropagatorRoundTripIsBitExact)
{
    Propagator p;
    p.matrix = Eigen::MatrixXcd::Random(16, 3);
    p.matrix(2, 1) = {-0.0, 1e-310};
    p.columns = {0, 5, 9};
    p.frame = Frame::Lab;
    p.total_time_ns = 12.5;
    p.schedule = StepSchedule::make(12.5, 0.001);
    const Propagator back = propagator_from_json(json::parse(propagator_to_json(p).dump()));
    EXPECT_EQ(back.matrix, p.matrix);
    EXPECT_EQ(back.columns, p.columns);
    EXPECT_EQ(back.frame, Frame::Lab);
    EXPECT_EQ(back.schedule.count(), p.schedule.count());
    json bad = propagator_to_json(p);
    bad["rows"] = 15;
    EXPECT_THROW(propagator_from_json(bad), InputError);
}

TEST(ReportIo, Base64AndSha256KnownVectors)
{
    const std::string text = "abc";
    EXPECT_EQ(base64_encode({text.begin(), text.end()}), "YWJj");
    const auto bytes = base64_decode("YWI=");
    EXPECT_EQ(std::string(bytes.begin(), bytes.end()), "ab");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_THROW(base64_decode("abc"), InputError);
}

TEST(ReportIo, ManifestRoundTrip)
{
    RunManifest m;
    m.tool_version = "0.3.0";
    m.command = "fidelity";
    m.device_path = data_path("devices/two_transmon.json");
    m.device_sha256 = sha256_file(m.device_path);
    m.config = {{"M", 100}};
    m.seeds = {{"monte_carlo", 7}};
    m.started_utc = "2026-01-01T00:00:00Z";
    m.outputs = {"report.json"};
    const RunManifest back = RunManifest::from_json(m.to_json());
    EXPECT_EQ(back.to_json(), m.to_json());
}

TEST(ReportIo, CsvHeaders)
{
    TrajectoryRecord rec;
    rec.times_ns = {0.0, 1.0};
    rec.qubits = {{{0, 0, 1, 0}, {0.1, 0, 0.9, 0.01}}};
    rec.resonator_excitation = {0.0, 0.001};
    const fs::path a = scratch("traj.csv"), b = scratch("traj_long.csv"), c = scratch("trace.csv");
    write_trajectory_csv(a.string(), rec);
    write_trajectory_long_csv(b.string(), rec);
    OptimizationTrace t;
    t.rows.push_back({1, 0.5, 0.1, 4, 0.01});
    write_trace_csv(c.string(), t);
    auto first_line = [](const fs::path& p) {
        std::ifstream in(p);
        std::string line;
        std::getline(in, line);
        return line;
    };
    EXPECT_EQ(first_line(a), "t_ns,qubit,bloch_x,bloch_y,bloch_z,leak_pop,res_excited_prob");
    EXPECT_EQ(first_line(b), "t_ns,qubit,observable,value");
    EXPECT_EQ(first_line(c), "iteration,best_f,diameter,evals,wall_s");
}
