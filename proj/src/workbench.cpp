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

#include "crsim/workbench.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "crsim/calibration.hpp"
#include "crsim/device_io.hpp"
#include "crsim/report_io.hpp"

#ifndef CRSIM_DEFAULT_DATA_DIR
#define CRSIM_DEFAULT_DATA_DIR "data"
#endif

namespace fs = std::filesystem;

namespace crsim {

std::string tool_version() { return CRSIM_VERSION; }

std::string data_directory()
{
    if (const char* env = std::getenv("CRSIM_DATA_DIR"); env && *env)
        return env;
    return CRSIM_DEFAULT_DATA_DIR;
}

Propagator simulate_record(const GateRecord& record, const SystemOperators& ops, const EvolutionConfig& cfg)
{
    if (record.kind == GateKind::Asym && cfg.method == Method::Trotter2) {
        AsymCnotSimulator sim(ops, cfg);
        return sim.simulate(record.asym);
    }
    return evolve(record.program(ops.device), ops, cfg);
}

std::size_t parse_state_label(const std::string& label, const BasisIndexer& idx)
{
    std::string s;
    for (char c : label)
        if (c != '|' && c != '>' && c != ' ' && c != ',')
            s.push_back(c);
    const std::size_t nq = idx.num_transmons();
    if (s.size() == nq)
        s = "0" + s;
    if (s.size() != nq + 1)
        throw InputError("state label " + label + ": expected " + std::to_string(nq) + " transmon digits");
    std::vector<int> labels;
    for (std::size_t slot = 0; slot < s.size(); ++slot) {
        const char c = s[slot];
        if (c < '0' || c > '9' || c - '0' >= idx.slot_dim(slot))
            throw InputError("state label " + label + ": level out of range");
        labels.push_back(c - '0');
    }
    return idx.flat(labels);
}

std::vector<SpectrumRow> device_spectrum(const DeviceSpec& device)
{
    const SystemOperators ops = build_system(device);
    const auto& idx = ops.indexer;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ops.static_hamiltonian());
    if (es.info() != Eigen::Success)
        throw NumericalError("spectrum: static Hamiltonian eigensolve failed");

    auto dressed_energy = [&](std::size_t flat) {
        Eigen::Index best = 0;
        es.eigenvectors().row(static_cast<Eigen::Index>(flat)).cwiseAbs2().maxCoeff(&best);
        return es.eigenvalues()(best);
    };
    const double ground = dressed_energy(0);

    std::vector<SpectrumRow> rows;
    for (std::size_t i = 0; i < device.num_transmons(); ++i) {
        SpectrumRow r;
        const auto& sol = ops.transmons[i];
        r.omega01_ghz = qubit_frequency(sol);
        r.anharmonicity_ghz = anharmonicity(sol);
        std::vector<int> labels(idx.num_slots(), 0);
        labels[i + 1] = 1;
        r.dressed_omega01_ghz = dressed_energy(idx.flat(labels)) - ground;
        r.resonator_detuning_ghz = device.resonator.frequency_ghz - r.omega01_ghz;
        rows.push_back(r);
    }
    return rows;
}

namespace {

struct Options {
    std::string device;
    std::string pulse;
    std::string gate;
    double tau_ps = 1.0;
    std::string method = "trotter2";
    std::string frame = "eigen";
    std::string layout;
    std::uint64_t seed = 20240601;
    std::size_t samples = 10000;
    std::string out;
    std::optional<double> min_f;
    std::vector<std::string> argv;
};

class InputFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void add_common(CLI::App* app, Options& o, bool needs_pulse)
{
    app->add_option("--device", o.device, "Device JSON (default: the record's device fixture)");
    if (needs_pulse) {
        app->add_option("--pulse", o.pulse, "Pulse parameter JSON")->required();
        app->add_option("--gate", o.gate, "Record label (default: first record)");
    }
    app->add_option("--tau-ps", o.tau_ps, "Time step in ps")->check(CLI::PositiveNumber);
    app->add_option("--method", o.method, "trotter2 | exact")->check(CLI::IsMember({"trotter2", "exact", "exact_step"}));
    app->add_option("--frame", o.frame, "eigen | lab")->check(CLI::IsMember({"eigen", "eigenframe", "lab"}));
    app->add_option("--layout", o.layout, "literal | inclusive (overrides the record)")
        ->check(CLI::IsMember({"literal", "inclusive"}));
    app->add_option("--seed", o.seed, "Monte-Carlo seed");
    app->add_option("--M", o.samples, "Monte-Carlo sample count")->check(CLI::PositiveNumber);
    app->add_option("--out", o.out, "Output directory");
    app->add_option("--min-f", o.min_f, "Fidelity threshold for the exit status");
}

EvolutionConfig evolution_config(const Options& o)
{
    EvolutionConfig cfg;
    cfg.step_ns = o.tau_ps * 1e-3;
    cfg.method = parse_method(o.method);
    cfg.frame = parse_frame(o.frame);
    return cfg;
}

std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

fs::path make_run_dir(const Options& o, const std::string& verb)
{
    fs::path dir;
    if (!o.out.empty()) {
        dir = o.out;
    } else {
        const char* root = std::getenv("CRSIM_OUTPUT_ROOT");
        const std::time_t t = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::random_device rd;
        std::ostringstream name;
        name << verb << "-" << std::put_time(&tm, "%Y%m%dT%H%M%S") << "-" << std::hex << std::setw(6)
             << std::setfill('0') << (rd() & 0xFFFFFFU);
        dir = fs::path(root && *root ? root : "crsim_runs") / name.str();
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw InputError("cannot create output directory " + dir.string());
    return dir;
}

struct Loaded {
    std::string device_path;
    DeviceSpec device;
    std::string pulse_path;
    GateRecord record;
};

std::string fixture_device(const std::string& stem)
{
    return (fs::path(data_directory()) / "devices" / (stem + ".json")).string();
}

Loaded load_inputs(const Options& o, bool needs_pulse)
{
    Loaded l;
    if (needs_pulse) {
        l.pulse_path = o.pulse;
        const PulseFile f = load_pulse_file(o.pulse);
        l.record = o.gate.empty() ? f.gates.front() : f.find(o.gate);
        if (!o.layout.empty())
            l.record.set_layout(parse_cr_layout(o.layout));
    }
    if (!o.device.empty())
        l.device_path = o.device;
    else if (needs_pulse && l.record.device)
        l.device_path = fixture_device(*l.record.device);
    else
        l.device_path = fixture_device("three_transmon");
    l.device = load_device(l.device_path);
    return l;
}

json options_json(const Options& o)
{
    json j{{"device", o.device}, {"pulse", o.pulse},   {"gate", o.gate},   {"tau_ps", o.tau_ps},
           {"method", o.method}, {"frame", o.frame},   {"layout", o.layout}, {"seed", o.seed},
           {"M", o.samples},     {"out", o.out},       {"argv", o.argv}};
    j["min_f"] = o.min_f ? json(*o.min_f) : json(nullptr);
    return j;
}

void write_manifest(const fs::path& dir, const std::string& verb, const Options& o, const Loaded& l,
                    const std::vector<std::string>& outputs, json extra = json::object())
{
    RunManifest m;
    m.tool_version = tool_version();
    m.command = verb;
    m.device_path = l.device_path;
    m.device_sha256 = l.device_path.empty() ? "" : sha256_file(l.device_path);
    m.pulse_path = l.pulse_path;
    m.pulse_sha256 = l.pulse_path.empty() ? "" : sha256_file(l.pulse_path);
    m.config = options_json(o);
    m.config["extra"] = std::move(extra);
    m.seeds["monte_carlo"] = o.seed;
    m.started_utc = utc_now();
    for (const auto& f : outputs)
        m.outputs.push_back((dir / f).string());
    write_json_file((dir / "manifest.json").string(), m.to_json());
}

int threshold_status(const Options& o, double f)
{
    return (o.min_f && f < *o.min_f) ? kExitThreshold : kExitOk;
}

void print_report_line(std::ostream& out, const std::string& label, const FidelityReport& r)
{
    out << std::fixed << std::setprecision(6) << label << "  F=" << r.fidelity << " +/- " << r.std_error
        << "  mean_success=" << r.mean_success() << "  leakage=" << r.leakage
        << "  res_excitation=" << r.resonator_excitation << "\n";
    out.unsetf(std::ios::fixed);
}

// ----- verbs -------------------------------------------------------------

int cmd_spectrum(const Options& o, std::ostream& out)
{
    const Loaded l = load_inputs(o, false);
    const auto rows = device_spectrum(l.device);
    const fs::path dir = make_run_dir(o, "spectrum");
    write_manifest(dir, "spectrum", o, l, {"spectrum.json"});

    out << std::fixed << std::setprecision(5);
    out << "transmon  omega01_GHz  dressed_GHz  anharm_GHz  resonator_detuning_GHz\n";
    json j;
    j["device"] = l.device.name;
    j["resonator_GHz"] = l.device.resonator.frequency_ghz;
    json ts = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out << "T" << i << "        " << r.omega01_ghz << "      " << r.dressed_omega01_ghz << "      "
            << r.anharmonicity_ghz << "    " << r.resonator_detuning_ghz << "\n";
        ts.push_back({{"omega01_GHz", r.omega01_ghz},
                      {"dressed_omega01_GHz", r.dressed_omega01_ghz},
                      {"anharmonicity_GHz", r.anharmonicity_ghz},
                      {"resonator_detuning_GHz", r.resonator_detuning_ghz}});
    }
    j["transmons"] = ts;
    json det = json::object();
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            const double d = rows[a].omega01_ghz - rows[b].omega01_ghz;
            det[std::to_string(a) + std::to_string(b)] = d;
            out << "detuning T" << a << "-T" << b << " = " << d << " GHz\n";
        }
    out.unsetf(std::ios::fixed);
    j["qubit_detunings_GHz"] = det;
    write_json_file((dir / "spectrum.json").string(), j);
    out << j.dump(2) << "\n";
    return kExitOk;
}

int cmd_fidelity(const Options& o, std::ostream& out, bool success_only)
{
    const Loaded l = load_inputs(o, true);
    const SystemOperators ops = build_system(l.device);
    const std::string verb = success_only ? "success" : "fidelity";
    const fs::path dir = make_run_dir(o, verb);
    write_manifest(dir, verb, o, l, {"report.json", "success.csv"});

    const Propagator prop = simulate_record(l.record, ops, evolution_config(o));
    const FidelityReport r =
        gate_report(prop, VzGate{l.record.vz_angles()}, l.record.ideal(), ops.indexer, o.samples, o.seed);
    write_json_file((dir / "report.json").string(), report_to_json(r));
    write_success_csv((dir / "success.csv").string(), {l.record.label}, {r});

    if (success_only) {
        for (std::size_t b = 0; b < r.success_probs.size(); ++b)
            out << r.basis_labels[b] << "  " << std::setprecision(6) << r.success_probs[b] << "\n";
        out << "mean  " << r.mean_success() << "\n";
    } else {
        out << report_to_json(r).dump(2) << "\n";
    }
    return threshold_status(o, r.fidelity);
}

int cmd_bloch(const Options& o, const std::string& initial, std::size_t stride, std::ostream& out)
{
    const Loaded l = load_inputs(o, true);
    const SystemOperators ops = build_system(l.device);
    const std::size_t start = parse_state_label(initial, ops.indexer);
    const fs::path dir = make_run_dir(o, "bloch");
    write_manifest(dir, "bloch", o, l, {"trajectory.csv", "trajectory_long.csv"}, {{"initial", initial}});

    EvolutionConfig cfg = evolution_config(o);
    cfg.record_stride = stride;
    const TrajectoryRecord rec = bloch_trajectory(l.record.program(l.device), ops, cfg, start);
    write_trajectory_csv((dir / "trajectory.csv").string(), rec);
    write_trajectory_long_csv((dir / "trajectory_long.csv").string(), rec);

    out << "samples " << rec.times_ns.size() << ", final t = " << rec.times_ns.back() << " ns\n";
    for (std::size_t q = 0; q < rec.qubits.size(); ++q) {
        const auto& b = rec.qubits[q].back();
        out << "T" << q << " final bloch (" << b.x << ", " << b.y << ", " << b.z << ") leakage " << b.leakage << "\n";
    }
    out << "resonator excitation " << rec.resonator_excitation.back() << "\n";
    return kExitOk;
}

int cmd_evolve(const Options& o, bool full, std::ostream& out)
{
    const Loaded l = load_inputs(o, true);
    const SystemOperators ops = build_system(l.device);
    const fs::path dir = make_run_dir(o, "evolve");
    write_manifest(dir, "evolve", o, l, {"propagator.json"}, {{"full", full}});

    EvolutionConfig cfg = evolution_config(o);
    if (full)
        for (std::size_t j = 0; j < ops.dimension(); ++j)
            cfg.columns.push_back(j);
    const Propagator p = evolve(l.record.program(l.device), ops, cfg);
    write_json_file((dir / "propagator.json").string(), propagator_to_json(p));

    double worst = 0.0;
    for (Eigen::Index c = 0; c < p.matrix.cols(); ++c)
        worst = std::max(worst, std::abs(p.matrix.col(c).norm() - 1.0));
    out << "propagated " << p.matrix.cols() << " columns over " << p.schedule.count() << " steps\n";
    out << "max column norm deviation " << worst << "\n";
    if (full) {
        const auto n = static_cast<Eigen::Index>(ops.dimension());
        out << "unitarity residual " << (p.matrix.adjoint() * p.matrix - Eigen::MatrixXcd::Identity(n, n)).norm()
            << "\n";
    }
    return kExitOk;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur.push_back(c);
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

std::vector<std::string> free_names(const std::string& spec, const CnotAsymParams& p)
{
    if (spec == "all")
        return p.vector_names();
    std::vector<std::string> names;
    for (const auto& n : split_list(spec)) {
        if (n == "theta") {
            for (std::size_t i = 0; i < p.theta.size(); ++i)
                names.push_back("theta" + std::to_string(i));
        } else {
            names.push_back(n);
        }
    }
    return names;
}

struct OptimizeFlags {
    std::string free = "gamma2,theta";
    std::size_t budget = 2000;
    std::size_t inner_samples = 512;
    std::uint64_t inner_seed = 11;
};

CalibrationOptions calibration_options(const Options& o, const OptimizeFlags& f)
{
    CalibrationOptions c;
    c.nm.max_evaluations = std::max<std::size_t>(1, f.budget);
    c.inner_samples = f.inner_samples;
    c.inner_seed = f.inner_seed;
    c.final_samples = o.samples;
    c.final_seed = o.seed;
    return c;
}

void require_asym(const GateRecord& g)
{
    if (g.kind != GateKind::Asym)
        throw InputError("gate " + g.label + ": this command supports asymmetric CNOT records only");
}

int cmd_optimize(const Options& o, const OptimizeFlags& f, std::ostream& out)
{
    const Loaded l = load_inputs(o, true);
    require_asym(l.record);
    const SystemOperators ops = build_system(l.device);
    const auto names = free_names(f.free, l.record.asym);
    ParamSpace space = default_param_space(l.record.asym);
    const auto mask = mask_from_names(space, names);

    const fs::path dir = make_run_dir(o, "optimize");
    write_manifest(dir, "optimize", o, l, {"params_in.json", "params_out.json", "trace.csv", "report.json"},
                   {{"free", names}, {"budget", f.budget}, {"inner_M", f.inner_samples}, {"inner_seed", f.inner_seed}});
    write_json_file((dir / "params_in.json").string(), pulse_file_to_json(PulseFile{{l.record}}));

    AsymCnotSimulator sim(ops, evolution_config(o));
    const CalibrationResult res = optimize_gate(sim, l.record.asym, mask, calibration_options(o, f));

    GateRecord outrec = l.record;
    outrec.asym = res.params;
    std::ostringstream note;
    note << "optimized: free=" << f.free << ", layout=" << to_string(res.params.layout)
         << ", evaluations=" << res.nm.evaluations << ", F=" << res.report.fidelity;
    outrec.note = note.str();
    write_json_file((dir / "params_out.json").string(), pulse_file_to_json(PulseFile{{outrec}}));
    write_trace_csv((dir / "trace.csv").string(), res.nm.trace);
    write_json_file((dir / "report.json").string(), report_to_json(res.report));

    out << "run directory " << dir.string() << "\n";
    out << "evaluations " << res.nm.evaluations << (res.nm.exhausted ? " (budget exhausted)" : "") << "\n";
    out << "seed F (inner) " << res.seed_inner_fidelity << ", start F (inner) " << res.start_inner_fidelity
        << (res.vz_reseeded ? " after VZ reseed" : "") << "\n";
    print_report_line(out, l.record.label, res.report);
    return threshold_status(o, res.report.fidelity);
}

std::vector<SweepAxis> parse_axes(const std::vector<std::string>& specs)
{
    std::vector<SweepAxis> axes;
    for (const auto& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw InputError("axis " + s + ": expected name=v1,v2,...");
        SweepAxis a;
        a.name = s.substr(0, eq);
        for (const auto& v : split_list(s.substr(eq + 1))) {
            try {
                a.values.push_back(std::stod(v));
            } catch (const std::exception&) {
                throw InputError("axis " + a.name + ": bad value " + v);
            }
        }
        if (a.values.empty())
            throw InputError("axis " + a.name + ": no values");
        axes.push_back(a);
    }
    if (axes.empty())
        throw InputError("at least one --axis is required");
    return axes;
}

int cmd_sweep(const Options& o, const std::vector<std::string>& axis_specs, std::ostream& out)
{
    const Loaded l = load_inputs(o, true);
    require_asym(l.record);
    const auto axes = parse_axes(axis_specs);
    const auto names = l.record.asym.vector_names();
    std::vector<Eigen::Index> pos;
    for (const auto& a : axes) {
        auto it = std::find(names.begin(), names.end(), a.name);
        if (it == names.end())
            throw InputError("sweep: unknown parameter " + a.name);
        pos.push_back(static_cast<Eigen::Index>(it - names.begin()));
    }
    const SystemOperators ops = build_system(l.device);
    const fs::path dir = make_run_dir(o, "sweep");
    write_manifest(dir, "sweep", o, l, {"sweep.csv"}, {{"axes", axis_specs}});

    AsymCnotSimulator sim(ops, evolution_config(o));
    std::size_t total = 1;
    for (const auto& a : axes)
        total *= a.values.size();
    std::vector<SweepRow> rows;
    std::vector<std::string> axis_names;
    for (const auto& a : axes)
        axis_names.push_back(a.name);
    for (std::size_t k = 0; k < total; ++k) {
        Eigen::VectorXd x = l.record.asym.to_vector();
        SweepRow row;
        std::size_t rem = k;
        row.coordinates.resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            const std::size_t n = axes[a].values.size();
            row.coordinates[a] = axes[a].values[rem % n];
            x(pos[a]) = row.coordinates[a];
            rem /= n;
        }
        CnotAsymParams p = l.record.asym;
        p.assign(x);
        const FidelityReport r = evaluate_gate(sim, p, o.samples, o.seed);
        row.fidelity = r.fidelity;
        row.std_error = r.std_error;
        row.mean_success = r.mean_success();
        row.leakage = r.leakage;
        rows.push_back(row);
        for (std::size_t a = 0; a < axes.size(); ++a)
            out << axes[a].name << "=" << row.coordinates[a] << " ";
        out << "F=" << row.fidelity << " mean_success=" << row.mean_success << "\n";
    }
    write_sweep_csv((dir / "sweep.csv").string(), axis_names, rows);
    return kExitOk;
}

int cmd_seed_search(const Options& o, const std::vector<std::string>& axis_specs, std::size_t top, std::ostream& out)
{
    const Loaded l = load_inputs(o, true);
    require_asym(l.record);
    const auto axes = parse_axes(axis_specs);
    const SystemOperators ops = build_system(l.device);
    const fs::path dir = make_run_dir(o, "seed-search");
    write_manifest(dir, "seed-search", o, l, {"sweep.csv"}, {{"axes", axis_specs}});

    AsymCnotSimulator sim(ops, evolution_config(o));
    const SeedSearchReport rep = sweet_spot_search(sim, l.record.asym, axes);
    write_seed_search_csv((dir / "sweep.csv").string(), rep, ops.indexer);
    for (std::size_t r = 0; r < std::min(top, rep.ranked.size()); ++r) {
        const auto& pt = rep.points[rep.ranked[r]];
        out << "#" << r + 1 << " ";
        for (std::size_t a = 0; a < axes.size(); ++a)
            out << axes[a].name << "=" << pt.coordinates[a] << " ";
        out << "score=" << pt.score << " orthogonality=" << pt.orthogonality << "\n";
    }
    return kExitOk;
}

struct ReproduceFlags {
    std::string table;
    std::string rows;
    OptimizeFlags opt;
};

int cmd_reproduce(const Options& o, const ReproduceFlags& f, std::ostream& out)
{
    Options oo = o;
    if (oo.pulse.empty()) {
        if (f.table.empty())
            throw InputError("reproduce: --table or --pulse is required");
        oo.pulse = (fs::path(data_directory()) / "pulses" / ("table" + f.table + ".json")).string();
    }
    const PulseFile file = load_pulse_file(oo.pulse);
    std::vector<GateRecord> selected;
    if (f.rows.empty()) {
        selected = file.gates;
    } else {
        for (const auto& label : split_list(f.rows))
            selected.push_back(file.find(label));
    }

    Loaded meta;
    meta.pulse_path = oo.pulse;
    meta.device_path = oo.device;
    const fs::path dir = make_run_dir(oo, "reproduce");
    write_manifest(dir, "reproduce", oo, meta, {"summary.csv", "summary.md", "reoptimized.json", "reports.json"},
                   {{"rows", f.rows}, {"free", f.opt.free}, {"budget", f.opt.budget}});

    std::ofstream csv(dir / "summary.csv");
    csv << std::setprecision(10);
    csv << "gate,layout,evaluations,F_reference,F_achieved,abs_delta,stderr,mean_success,success_reference,leakage,"
           "res_excitation,pass\n";
    std::ostringstream md;
    md << "| gate | layout | evals | F ref | F achieved | abs delta | mean success | success ref | pass |\n";
    md << "|---|---|---|---|---|---|---|---|---|\n";

    PulseFile reopt;
    json reports = json::object();
    std::size_t passed = 0;
    for (GateRecord g : selected) {
        if (!o.layout.empty())
            g.set_layout(parse_cr_layout(o.layout));
        const std::string dev_path = !oo.device.empty() ? oo.device
                                     : g.device       ? fixture_device(*g.device)
                                                      : fixture_device("three_transmon");
        try {
            const DeviceSpec device = load_device(dev_path);
            const SystemOperators ops = build_system(device);
            FidelityReport rep;
            std::size_t evals = 0;
            GateRecord outrec = g;
            if (g.kind == GateKind::Asym && f.opt.budget > 0) {
                AsymCnotSimulator sim(ops, evolution_config(oo));
                ParamSpace space = default_param_space(g.asym);
                const auto res = optimize_gate(sim, g.asym, mask_from_names(space, free_names(f.opt.free, g.asym)),
                                               calibration_options(oo, f.opt));
                rep = res.report;
                evals = res.nm.evaluations;
                outrec.asym = res.params;
            } else {
                const Propagator prop = simulate_record(g, ops, evolution_config(oo));
                std::vector<double> theta = g.vz_angles();
                if (f.opt.budget > 0) {
                    const auto fit = fit_vz_angles(computational_block(prop, ops.indexer), g.ideal(), {},
                                                   f.opt.inner_samples, f.opt.inner_seed);
                    theta = fit.angles;
                    evals = fit.nm.evaluations;
                    if (g.kind == GateKind::Ecr) {
                        outrec.ecr.theta[0] = theta[0];
                        outrec.ecr.theta[1] = theta[1];
                    } else if (g.kind == GateKind::Idle) {
                        outrec.idle_theta = theta;
                    }
                }
                rep = gate_report(prop, VzGate{theta}, g.ideal(), ops.indexer, oo.samples, oo.seed);
            }
            const double ref = g.f_reference.value_or(std::nan(""));
            const double delta = std::abs(rep.fidelity - ref);
            const bool pass = o.min_f ? rep.fidelity >= *o.min_f : (std::isfinite(ref) && rep.fidelity >= ref - 0.015);
            passed += pass ? 1 : 0;
            const std::string lay = g.layout() ? to_string(*g.layout()) : "-";
            csv << g.label << "," << lay << "," << evals << "," << ref << "," << rep.fidelity << "," << delta << ","
                << rep.std_error << "," << rep.mean_success() << ","
                << (g.success_reference ? std::to_string(*g.success_reference) : "") << "," << rep.leakage << ","
                << rep.resonator_excitation << "," << (pass ? "yes" : "no") << "\n";
            md << std::fixed << std::setprecision(4) << "| " << g.label << " | " << lay << " | " << evals << " | "
               << ref << " | " << rep.fidelity << " | " << delta << " | " << rep.mean_success() << " | "
               << (g.success_reference ? std::to_string(*g.success_reference).substr(0, 6) : "-") << " | "
               << (pass ? "yes" : "no") << " |\n";
            std::ostringstream note;
            note << "reproduced: free=" << f.opt.free << ", layout=" << lay << ", evaluations=" << evals
                 << ", F=" << rep.fidelity;
            outrec.note = note.str();
            reopt.gates.push_back(outrec);
            reports[g.label] = report_to_json(rep);
            print_report_line(out, g.label, rep);
        } catch (const std::exception& e) {
            csv << g.label << ",,,,,,,,,,,error\n";
            md << "| " << g.label << " | error: " << e.what() << " |||||||\n";
            out << g.label << "  error: " << e.what() << "\n";
        }
    }
    std::ofstream((dir / "summary.md").string()) << md.str();
    if (!reopt.gates.empty())
        write_json_file((dir / "reoptimized.json").string(), pulse_file_to_json(reopt));
    write_json_file((dir / "reports.json").string(), reports);
    out << "passed " << passed << " of " << selected.size() << " rows; summary in " << dir.string() << "\n";
    return passed == 0 ? kExitThreshold : kExitOk;
}

int cmd_validate(const Options& o, const std::string& manifest, std::ostream& out)
{
    if (o.device.empty() && o.pulse.empty() && manifest.empty())
        throw InputError("validate: give --device, --pulse and/or --manifest");
    if (!o.device.empty()) {
        const DeviceSpec d = load_device(o.device);
        if (!(device_from_json(device_to_json(d)).transmons.size() == d.transmons.size()))
            throw InputError(o.device + ": round trip changed the device");
        out << o.device << ": ok (" << d.num_transmons() << " transmons)\n";
    }
    if (!o.pulse.empty()) {
        const PulseFile f = load_pulse_file(o.pulse);
        const json once = pulse_file_to_json(f);
        if (pulse_file_to_json(pulse_file_from_json(once)) != once)
            throw InputError(o.pulse + ": serialization round trip is not stable");
        for (const auto& g : f.gates) {
            const std::string dev = g.device ? fixture_device(*g.device) : "";
            if (!dev.empty() && fs::exists(dev))
                g.program(load_device(dev)).validate();
        }
        out << o.pulse << ": ok (" << f.gates.size() << " records)\n";
    }
    if (!manifest.empty()) {
        const RunManifest m = RunManifest::from_json(read_json_file(manifest));
        if (!m.device_path.empty() && sha256_file(m.device_path) != m.device_sha256)
            throw InputError(manifest + ": device file hash mismatch");
        if (!m.pulse_path.empty() && sha256_file(m.pulse_path) != m.pulse_sha256)
            throw InputError(manifest + ": pulse file hash mismatch");
        out << manifest << ": ok (inputs unchanged)\n";
    }
    return kExitOk;
}

} // namespace

int run_workbench(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"crsim: cross-resonance CNOT workbench"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());

    Options o;
    for (int i = 0; i < argc; ++i)
        o.argv.emplace_back(argv[i]);

    auto* spectrum = app.add_subcommand("spectrum", "Transmon frequencies, anharmonicities and detunings");
    add_common(spectrum, o, false);

    auto* fidelity = app.add_subcommand("fidelity", "Monte-Carlo average fidelity of a pulse record");
    add_common(fidelity, o, true);
    auto* success = app.add_subcommand("success", "Basis-state success probabilities of a pulse record");
    add_common(success, o, true);

    std::string initial = "0,000";
    std::size_t stride = 100;
    auto* bloch = app.add_subcommand("bloch", "Bloch-vector trajectories from one initial state");
    add_common(bloch, o, true);
    bloch->add_option("--initial", initial, "Initial state label, e.g. 0,100");
    bloch->add_option("--stride", stride, "Steps between samples")->check(CLI::PositiveNumber);

    bool full = false;
    auto* evolve_cmd = app.add_subcommand("evolve", "Propagate and dump the propagator");
    add_common(evolve_cmd, o, true);
    evolve_cmd->add_flag("--full", full, "Propagate every basis column");

    OptimizeFlags of;
    auto add_opt_flags = [&](CLI::App* a) {
        a->add_option("--free", of.free, "Free parameters: comma list, 'theta' for all VZ angles, or 'all'");
        a->add_option("--budget", of.budget, "Maximum objective evaluations (0: evaluate only)");
        a->add_option("--inner-M", of.inner_samples, "Monte-Carlo samples inside the optimizer")
            ->check(CLI::PositiveNumber);
        a->add_option("--inner-seed", of.inner_seed, "Monte-Carlo seed inside the optimizer");
    };
    auto* optimize = app.add_subcommand("optimize", "Nelder-Mead calibration of an asymmetric CNOT");
    add_common(optimize, o, true);
    add_opt_flags(optimize);

    std::vector<std::string> axes;
    auto* sweep = app.add_subcommand("sweep", "Fidelity over a parameter grid");
    add_common(sweep, o, true);
    sweep->add_option("--axis", axes, "name=v1,v2,... (repeatable)")->required();

    std::size_t top = 10;
    auto* seed_search = app.add_subcommand("seed-search", "Score CR-only grid points for the sweet spot");
    add_common(seed_search, o, true);
    seed_search->add_option("--axis", axes, "name=v1,v2,... over f1_GHz, TS_ns, OmegaS, rho, gamma1")->required();
    seed_search->add_option("--top", top, "Candidates to print");

    ReproduceFlags rf;
    auto* reproduce = app.add_subcommand("reproduce", "Re-optimize tabulated gates from their printed seeds");
    add_common(reproduce, o, false);
    reproduce->add_option("--pulse", o.pulse, "Pulse file (instead of --table)");
    reproduce->add_option("--table", rf.table, "3, 4 or 5")->check(CLI::IsMember({"3", "4", "5"}));
    reproduce->add_option("--rows", rf.rows, "Comma-separated record labels");
    add_opt_flags(reproduce);

    std::string manifest;
    auto* validate = app.add_subcommand("validate", "Parse and check input files or a run manifest");
    validate->add_option("--device", o.device, "Device JSON");
    validate->add_option("--pulse", o.pulse, "Pulse JSON");
    validate->add_option("--manifest", manifest, "Run manifest to check against its inputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*spectrum)
            return cmd_spectrum(o, out);
        if (*fidelity)
            return cmd_fidelity(o, out, false);
        if (*success)
            return cmd_fidelity(o, out, true);
        if (*bloch)
            return cmd_bloch(o, initial, stride, out);
        if (*evolve_cmd)
            return cmd_evolve(o, full, out);
        if (*optimize)
            return cmd_optimize(o, of, out);
        if (*sweep)
            return cmd_sweep(o, axes, out);
        if (*seed_search)
            return cmd_seed_search(o, axes, top, out);
        if (*reproduce) {
            rf.opt = of;
            return cmd_reproduce(o, rf, out);
        }
        if (*validate)
            return cmd_validate(o, manifest, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitInput;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

} // namespace crsim
