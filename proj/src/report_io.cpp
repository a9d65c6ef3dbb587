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

#include "crsim/report_io.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "json_fields.hpp"

namespace crsim {

namespace {

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

void put_le(std::vector<unsigned char>& buf, double v)
{
    static_assert(sizeof(double) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int b = 0; b < 8; ++b)
        buf.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xFFU));
}

double get_le(const unsigned char* p)
{
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

json report_to_json(const FidelityReport& r)
{
    json probs = json::object();
    for (std::size_t b = 0; b < r.success_probs.size(); ++b) {
        const std::string key = b < r.basis_labels.size() ? r.basis_labels[b] : std::to_string(b);
        probs[key] = r.success_probs[b];
    }
    return {{"F", r.fidelity},
            {"stderr", r.std_error},
            {"M", r.samples},
            {"seed", r.seed},
            {"success_probs", probs},
            {"mean_success", r.mean_success()},
            {"leakage", r.leakage},
            {"res_excitation", r.resonator_excitation}};
}

FidelityReport report_from_json(const json& j)
{
    using detail::field;
    FidelityReport r;
    r.fidelity = field<double>(j, "F", "report");
    r.std_error = field<double>(j, "stderr", "report");
    r.samples = field<std::size_t>(j, "M", "report");
    r.seed = field<std::uint64_t>(j, "seed", "report");
    r.leakage = field<double>(j, "leakage", "report");
    r.resonator_excitation = field<double>(j, "res_excitation", "report");
    const json& probs = detail::member(j, "success_probs", "report");
    for (auto it = probs.begin(); it != probs.end(); ++it) {
        r.basis_labels.push_back(it.key());
        r.success_probs.push_back(it.value().get<double>());
    }
    return r;
}

void write_success_csv(const std::string& path, const std::vector<std::string>& labels,
                       const std::vector<FidelityReport>& reports)
{
    if (labels.size() != reports.size())
        throw InputError("write_success_csv: one label per report is required");
    auto out = open_out(path);
    out << "gate";
    if (!reports.empty())
        for (const auto& b : reports.front().basis_labels)
            out << "," << b;
    out << ",mean\n";
    for (std::size_t g = 0; g < reports.size(); ++g) {
        out << labels[g];
        for (double p : reports[g].success_probs)
            out << "," << p;
        out << "," << reports[g].mean_success() << "\n";
    }
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec)
{
    auto out = open_out(path);
    out << "t_ns,qubit,bloch_x,bloch_y,bloch_z,leak_pop,res_excited_prob\n";
    for (std::size_t s = 0; s < rec.times_ns.size(); ++s)
        for (std::size_t q = 0; q < rec.qubits.size(); ++q) {
            const auto& b = rec.qubits[q][s];
            out << rec.times_ns[s] << "," << q << "," << b.x << "," << b.y << "," << b.z << "," << b.leakage << ","
                << rec.resonator_excitation[s] << "\n";
        }
}

void write_trajectory_long_csv(const std::string& path, const TrajectoryRecord& rec)
{
    auto out = open_out(path);
    out << "t_ns,qubit,observable,value\n";
    for (std::size_t s = 0; s < rec.times_ns.size(); ++s) {
        for (std::size_t q = 0; q < rec.qubits.size(); ++q) {
            const auto& b = rec.qubits[q][s];
            const std::pair<const char*, double> obs[] = {
                {"bloch_x", b.x}, {"bloch_y", b.y}, {"bloch_z", b.z}, {"leak_pop", b.leakage}};
            for (const auto& [name, v] : obs)
                out << rec.times_ns[s] << "," << q << "," << name << "," << v << "\n";
        }
        out << rec.times_ns[s] << ",resonator,res_excited_prob," << rec.resonator_excitation[s] << "\n";
    }
}

void write_trace_csv(const std::string& path, const OptimizationTrace& trace)
{
    auto out = open_out(path);
    out << "iteration,best_f,diameter,evals,wall_s\n";
    for (const auto& r : trace.rows)
        out << r.iteration << "," << r.best_f << "," << r.diameter << "," << r.evaluations << "," << r.wall_seconds
            << "\n";
}

void write_seed_search_csv(const std::string& path, const SeedSearchReport& rep, const BasisIndexer& idx)
{
    auto out = open_out(path);
    for (const auto& a : rep.axes)
        out << a.name << ",";
    const std::size_t nb = idx.computational().size();
    for (std::size_t b = 0; b < nb; ++b)
        out << "p_" << idx.bitstring(b) << ",";
    out << "orthogonality,score,rank\n";
    for (const auto& p : rep.points) {
        for (double c : p.coordinates)
            out << c << ",";
        for (double v : p.success_probs)
            out << v << ",";
        out << p.orthogonality << "," << p.score << "," << p.rank << "\n";
    }
}

void write_sweep_csv(const std::string& path, const std::vector<std::string>& axes, const std::vector<SweepRow>& rows)
{
    auto out = open_out(path);
    for (const auto& a : axes)
        out << a << ",";
    out << "F,stderr,mean_success,leakage\n";
    for (const auto& r : rows) {
        for (double c : r.coordinates)
            out << c << ",";
        out << r.fidelity << "," << r.std_error << "," << r.mean_success << "," << r.leakage << "\n";
    }
}

std::string base64_encode(const std::vector<unsigned char>& bytes)
{
    if (bytes.empty())
        return {};
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                  static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text)
{
    if (text.empty())
        return {};
    if (text.size() % 4 != 0)
        throw InputError("base64: length is not a multiple of 4");
    std::vector<unsigned char> out(3 * text.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0)
        throw InputError("base64: invalid payload");
    std::size_t pad = 0;
    if (text.back() == '=')
        ++pad;
    if (text.size() > 1 && text[text.size() - 2] == '=')
        ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

json propagator_to_json(const Propagator& p)
{
    std::vector<unsigned char> bytes;
    bytes.reserve(static_cast<std::size_t>(p.matrix.size()) * 16);
    for (Eigen::Index c = 0; c < p.matrix.cols(); ++c)
        for (Eigen::Index r = 0; r < p.matrix.rows(); ++r) {
            put_le(bytes, p.matrix(r, c).real());
            put_le(bytes, p.matrix(r, c).imag());
        }
    return {{"rows", p.matrix.rows()},
            {"cols", p.matrix.cols()},
            {"columns", p.columns},
            {"frame", to_string(p.frame)},
            {"total_time_ns", p.total_time_ns},
            {"step_ns", p.schedule.step_ns},
            {"steps", p.schedule.count()},
            {"encoding", "base64; column-major; per entry (re, im) as little-endian IEEE-754 binary64"},
            {"payload", base64_encode(bytes)}};
}

Propagator propagator_from_json(const json& j)
{
    using detail::field;
    Propagator p;
    const auto rows = field<Eigen::Index>(j, "rows", "propagator");
    const auto cols = field<Eigen::Index>(j, "cols", "propagator");
    p.columns = detail::member(j, "columns", "propagator").get<std::vector<std::size_t>>();
    p.frame = parse_frame(field<std::string>(j, "frame", "propagator"));
    p.total_time_ns = field<double>(j, "total_time_ns", "propagator");
    p.schedule = StepSchedule::make(p.total_time_ns, field<double>(j, "step_ns", "propagator"));
    const auto bytes = base64_decode(field<std::string>(j, "payload", "propagator"));
    if (bytes.size() != static_cast<std::size_t>(rows * cols) * 16)
        throw InputError("propagator: payload size does not match rows x cols");
    p.matrix.resize(rows, cols);
    const unsigned char* q = bytes.data();
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r, q += 16)
            p.matrix(r, c) = {get_le(q), get_le(q + 8)};
    return p;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("sha256: digest failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

json RunManifest::to_json() const
{
    return {{"tool_version", tool_version},
            {"command", command},
            {"device_path", device_path},
            {"device_sha256", device_sha256},
            {"pulse_path", pulse_path},
            {"pulse_sha256", pulse_sha256},
            {"config", config},
            {"seeds", seeds},
            {"started_utc", started_utc},
            {"outputs", outputs}};
}

RunManifest RunManifest::from_json(const json& j)
{
    using detail::field;
    RunManifest m;
    m.tool_version = field<std::string>(j, "tool_version", "manifest");
    m.command = field<std::string>(j, "command", "manifest");
    m.device_path = field<std::string>(j, "device_path", "manifest");
    m.device_sha256 = field<std::string>(j, "device_sha256", "manifest");
    m.pulse_path = field<std::string>(j, "pulse_path", "manifest");
    m.pulse_sha256 = field<std::string>(j, "pulse_sha256", "manifest");
    m.config = detail::member(j, "config", "manifest");
    m.seeds = detail::member(j, "seeds", "manifest").get<std::map<std::string, std::uint64_t>>();
    m.started_utc = field<std::string>(j, "started_utc", "manifest");
    m.outputs = detail::member(j, "outputs", "manifest").get<std::vector<std::string>>();
    return m;
}

} // namespace crsim
