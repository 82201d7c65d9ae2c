#include "mdk/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdk/design.hpp"
#include "mdk/error.hpp"
#include "mdk/farfield.hpp"
#include "mdk/metrics.hpp"
#include "mdk/report.hpp"
#include "mdk/synth.hpp"
#include "mdk/touchstone.hpp"
#include "text_util.hpp"

namespace mdk::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

/// Any failure attributable to the user's input (exit 2).
class InputError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    const fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path + ": cannot write file");
    out << data;
    if (!out) throw InputError(path + ": write failed");
}

// Re-throws parse failures with the file name in front of the line number.
template <class F>
auto with_file(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw InputError(path + ": " + e.what());
    } catch (const DomainError& e) {
        throw InputError(path + ": " + e.what());
    }
}

NetworkData load_network(const std::string& path) {
    const std::size_t ports = ports_from_filename(path);
    if (ports == 0) throw InputError(path + ": cannot infer port count (expected a .sNp extension)");
    const auto text = read_file(path);
    return with_file(path, [&] { return parse_touchstone(text, ports); });
}

std::vector<FarFieldPattern> load_patterns(const std::string& path, std::ostream& err) {
    const auto text = read_file(path);
    auto res = with_file(path, [&] { return parse_pattern_csv(text); });
    for (const auto& w : res.warnings) err << "warning: " << path << ": " << w << '\n';
    return std::move(res.patterns);
}

std::pair<std::size_t, std::size_t> parse_pair(const std::string& s) {
    auto parts = detail::split_char(s, ',');
    auto num = [&](std::string_view t) {
        auto v = detail::parse_double(detail::trim(t));
        if (!v || *v < 1 || *v != std::floor(*v)) throw InputError("--pair expects two port numbers like 1,2");
        return static_cast<std::size_t>(*v);
    };
    if (parts.size() != 2) throw InputError("--pair expects two port numbers like 1,2");
    return {num(parts[0]), num(parts[1])};
}

/// Config from MDK_CONFIG, or an empty object.
ojson load_config() {
    const char* path = std::getenv("MDK_CONFIG");
    if (!path || !*path) return ojson::object();
    const auto text = read_file(path);
    try {
        auto j = ojson::parse(text);
        if (!j.is_object()) throw InputError(std::string(path) + ": config must be a JSON object");
        return j;
    } catch (const ojson::parse_error& e) {
        throw InputError(std::string(path) + ": " + e.what());
    }
}

Environment environment_from(const std::string& name, const ojson& config) {
    Environment env = Environment::preset(name);
    if (config.contains("environments") && config["environments"].contains(name)) {
        const auto& e = config["environments"][name];
        auto num = [&](const char* key, double& dst) {
            if (e.contains(key)) {
                if (!e[key].is_number()) throw InputError(std::string("config environment field '") + key + "' must be a number");
                dst = e[key].get<double>();
            }
        };
        if (e.contains("kind")) {
            const auto kind = e["kind"].get<std::string>();
            if (kind == "uniform") env.kind = EnvironmentKind::Uniform;
            else if (kind == "gaussian") env.kind = EnvironmentKind::Gaussian;
            else throw InputError("config environment kind must be 'uniform' or 'gaussian'");
        }
        num("xpr_db", env.xpr_db);
        num("m_v", env.m_v);
        num("m_h", env.m_h);
        num("sigma_v", env.sigma_v);
        num("sigma_h", env.sigma_h);
    }
    env.validate();
    return env;
}

double round9(double v) { return std::strtod(detail::format_g(v, kOutputDigits).c_str(), nullptr); }

int emit_series(const MetricSeries& s, const std::string& out_path, std::ostream& out) {
    const bool json = out_path.size() >= 5 && out_path.substr(out_path.size() - 5) == ".json";
    const std::string body = json ? to_json(s) : to_csv(s);
    if (out_path.empty() || out_path == "-") out << body;
    else write_file(out_path, body);
    return s.any_unreliable() ? kUnreliable : kOk;
}

// Pairs patterns from two files by exact frequency.
std::vector<std::pair<const FarFieldPattern*, const FarFieldPattern*>> match_patterns(
    const std::vector<FarFieldPattern>& a, const std::vector<FarFieldPattern>& b) {
    std::vector<std::pair<const FarFieldPattern*, const FarFieldPattern*>> out;
    for (const auto& pa : a)
        for (const auto& pb : b)
            if (pa.freq() == pb.freq()) out.emplace_back(&pa, &pb);
    if (out.empty()) throw InputError("pattern files share no frequency");
    return out;
}

struct Runner {
    Runner(std::ostream& o, std::ostream& e) : out(o), err(e) {}

    std::ostream& out;
    std::ostream& err;

    // metrics -----------------------------------------------------------------
    std::string a_path, b_path, net_path, out_path, env_name = "uniform", pair_str = "1,2", excitation;
    std::optional<double> xpr_db;
    std::size_t phases = 8;
    unsigned jobs = 1;

    Environment env(const ojson& config) const {
        auto e = environment_from(env_name, config);
        if (xpr_db) e.xpr_db = *xpr_db;
        return e;
    }

    int ecc_ff() {
        const auto config = load_config();
        const auto e = env(config);
        const auto pa = load_patterns(a_path, err), pb = load_patterns(b_path, err);
        auto pairs = match_patterns(pa, pb);
        MetricSeries s{MetricId::EccFarField, {}, {}, {}, {{"a", a_path}, {"b", b_path}, {"environment", e.describe()}}};
        s.values.resize(pairs.size());
        for (const auto& [x, y] : pairs) s.freqs.push_back(x->freq());
        s.unreliable.assign(pairs.size(), false);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            try {
                s.values[k] = ecc_farfield(*pairs[k].first, *pairs[k].second, e);
            } catch (const DegenerateError& ex) {
                throw InputError(std::string(ex.what()) + " at " + detail::format_g(s.freqs[k], 12) + " Hz");
            } catch (const DomainError& ex) {
                throw InputError(ex.what());
            }
        }
        return emit_series(s, out_path, out);
    }

    int ecc_sp() {
        const auto net = load_network(net_path);
        auto [i, j] = parse_pair(pair_str);
        auto s = ecc_sparams(net, i, j, jobs);
        s.meta["net"] = net_path;
        return emit_series(s, out_path, out);
    }

    int tarc_cmd() {
        const auto net = load_network(net_path);
        MetricSeries s;
        if (!excitation.empty()) {
            std::vector<double> ph;
            for (auto t : detail::split_char(excitation, ',')) {
                auto v = detail::parse_double(detail::trim(t));
                if (!v) throw InputError("--excitation expects comma-separated phases in radians");
                ph.push_back(*v);
            }
            s = tarc(net, ph, jobs);
        } else {
            s = tarc_envelope(net, phases, jobs);
        }
        s.meta["net"] = net_path;
        return emit_series(s, out_path, out);
    }

    int ccl_cmd() {
        const auto net = load_network(net_path);
        auto [i, j] = parse_pair(pair_str);
        auto s = ccl_pair(net, i, j, jobs);
        s.meta["net"] = net_path;
        return emit_series(s, out_path, out);
    }

    int meg_cmd() {
        const auto config = load_config();
        const auto e = env(config);
        const auto pa = load_patterns(a_path, err);
        MetricSeries s;
        s.meta = {{"a", a_path}, {"environment", e.describe()}};
        try {
            if (b_path.empty()) {
                s.metric_id = MetricId::MegDb;
                for (const auto& p : pa) {
                    s.freqs.push_back(p.freq());
                    s.values.push_back(10.0 * std::log10(meg(p, e)));
                }
            } else {
                s.metric_id = MetricId::MegRatio;
                s.meta["b"] = b_path;
                const auto pb = load_patterns(b_path, err);
                for (const auto& [x, y] : match_patterns(pa, pb)) {
                    s.freqs.push_back(x->freq());
                    s.values.push_back(meg_ratio(*x, *y, e));
                }
            }
        } catch (const DegenerateError& ex) {
            throw InputError(ex.what());
        }
        s.unreliable.assign(s.values.size(), false);
        return emit_series(s, out_path, out);
    }

    // design ------------------------------------------------------------------
    double f0_ghz = 0.0, er = 4.5, gap_mm = 0.0;
    std::string model_path;

    void print_json(const ojson& j) { out << j.dump(2) << '\n'; }

    int stub() {
        const double len = stub_length(f0_ghz * 1e9, er);
        print_json({{"f0_ghz", round9(f0_ghz)}, {"eps_r", round9(er)}, {"length_mm", round9(len * 1e3)}});
        return kOk;
    }

    int slot() {
        const auto s = slot_dimensions(f0_ghz * 1e9, er);
        print_json({{"f0_ghz", round9(f0_ghz)}, {"eps_r", round9(er)}, {"l5_mm", round9(s.l5 * 1e3)}, {"g_mm", round9(s.g * 1e3)}});
        return kOk;
    }

    int notch_bw() {
        GapModel model = GapModel::defaults();
        if (!model_path.empty()) {
            const auto text = read_file(model_path);
            model = with_file(model_path, [&] { return GapModel::from_json(text); });
        } else {
            const auto config = load_config();
            if (config.contains("gap_model")) model = with_file("MDK_CONFIG", [&] { return GapModel::from_json(config["gap_model"].dump()); });
        }
        const auto p = notch_bandwidth_from_gap(gap_mm, model);
        print_json({{"gap_mm", round9(gap_mm)},
                    {"bw_ghz", round9(p.bw_ghz)},
                    {"f_low_ghz", round9(p.f_low_ghz)},
                    {"f_high_ghz", round9(p.f_high_ghz)}});
        return kOk;
    }

    // synth -------------------------------------------------------------------
    std::string axis = "z";
    double step_deg = 1.0, freq_ghz = 1.0;
    double center_ghz = 5.6, bw_ghz = 1.5, depth_db = -1.0, fmin_ghz = 2.0, fmax_ghz = 12.0;
    double coupling_db = kDefaultCouplingDb;
    std::size_t ports = 8, points = 401;
    std::string format = "ri";

    int synth_dipole() {
        DipoleSpec spec;
        if (axis == "x") spec.axis = DipoleAxis::X;
        else if (axis == "y") spec.axis = DipoleAxis::Y;
        else if (axis == "z") spec.axis = DipoleAxis::Z;
        else throw InputError("--axis must be x, y or z");
        spec.freq = freq_ghz * 1e9;
        const auto grid = PatternGrid::regular(step_deg, step_deg);
        write_file(out_path, write_pattern_csv({hertzian_dipole(spec, grid)}));
        return kOk;
    }

    int synth_net() {
        NotchModel m;
        m.f_center = center_ghz * 1e9;
        m.bandwidth = bw_ghz * 1e9;
        m.depth_db = depth_db;
        m.f_min = fmin_ghz * 1e9;
        m.f_max = fmax_ghz * 1e9;
        m.coupling_db = coupling_db;
        if (points < 2) throw InputError("--points must be at least 2");
        const auto net = notched_monopole_sparams(m, linear_sweep(m.f_min, m.f_max, points), ports);
        TouchstoneWriteOptions opts;
        opts.unit = FreqUnit::Hz;
        if (format == "ri") opts.format = DataFormat::RI;
        else if (format == "ma") opts.format = DataFormat::MA;
        else if (format == "db") opts.format = DataFormat::DB;
        else throw InputError("--format must be ri, ma or db");
        const auto declared = ports_from_filename(out_path);
        if (declared != 0 && declared != ports)
            throw InputError(out_path + ": extension declares " + std::to_string(declared) + " ports, generating " +
                             std::to_string(ports));
        write_file(out_path, write_touchstone(net, opts));
        return kOk;
    }

    // report ------------------------------------------------------------------
    std::string patterns_dir, mask_path;

    int report() {
        const auto config = load_config();
        ReportOptions opts;
        opts.jobs = jobs;
        opts.tarc_phase_samples = phases;
        if (config.contains("mask")) opts.mask = with_file("MDK_CONFIG", [&] { return VerdictMask::from_json(config["mask"].dump()); });
        if (!mask_path.empty()) {
            const auto text = read_file(mask_path);
            opts.mask = with_file(mask_path, [&] { return VerdictMask::from_json(text, opts.mask); });
        }
        for (auto& [name, e] : opts.environments) e = environment_from(name, config);

        const auto net_text = read_file(net_path);
        const auto net = load_network(net_path);
        std::vector<InputDescriptor> inputs{{"network", net_path, net_text.size(), fnv1a64_hex(net_text)}};

        std::vector<std::vector<FarFieldPattern>> patterns;
        if (!patterns_dir.empty()) {
            if (!fs::is_directory(patterns_dir)) throw InputError(patterns_dir + ": not a directory");
            std::map<std::size_t, std::string> files;
            static const std::regex port_name(R"(port([0-9]+)\.ffp)");
            std::vector<fs::path> entries;
            for (const auto& entry : fs::directory_iterator(patterns_dir)) entries.push_back(entry.path());
            std::sort(entries.begin(), entries.end());
            for (const auto& p : entries) {
                if (p.extension() != ".ffp") continue;
                std::smatch m;
                const auto name = p.filename().string();
                if (!std::regex_match(name, m, port_name))
                    throw InputError(p.string() + ": pattern files must be named port<k>.ffp");
                const auto k = std::stoul(m[1].str());
                if (k < 1 || k > net.port_count())
                    throw InputError(p.string() + ": port " + std::to_string(k) + " does not exist in " +
                                     std::to_string(net.port_count()) + "-port network");
                files[k] = p.string();
            }
            if (!files.empty()) {
                if (files.size() != net.port_count())
                    throw InputError(patterns_dir + ": " + std::to_string(files.size()) + " pattern files for a " +
                                     std::to_string(net.port_count()) + "-port network");
                for (const auto& [k, path] : files) {
                    const auto text = read_file(path);
                    inputs.push_back({"pattern_port" + std::to_string(k), path, text.size(), fnv1a64_hex(text)});
                    patterns.push_back(load_patterns(path, err));
                }
            }
        }

        ReportBundle bundle;
        try {
            bundle = build_report(net, patterns, opts);
        } catch (const DomainError& e) {
            throw InputError(e.what());
        } catch (const DegenerateError& e) {
            throw InputError(e.what());
        }
        bundle.inputs = std::move(inputs);

        const fs::path dir(out_path.empty() ? "report" : out_path);
        for (const auto& [id, s] : bundle.metrics) write_file((dir / (id + ".csv")).string(), to_csv(s));
        write_file((dir / "report.json").string(), report_json(bundle));

        for (const auto& v : bundle.verdicts) {
            out << v.check_id << ": "
                << (v.status == VerdictStatus::Pass ? "pass" : v.status == VerdictStatus::Fail ? "FAIL" : "skipped");
            if (v.worst) out << " (worst " << detail::format_g(*v.worst, kOutputDigits) << ", limit "
                             << detail::format_g(v.threshold, kOutputDigits) << ")";
            out << '\n';
        }
        for (const auto& b : bundle.notches)
            out << "notch: " << detail::format_g(b.f_low / 1e9, 6) << " - " << detail::format_g(b.f_high / 1e9, 6)
                << " GHz (peak " << detail::format_g(b.worst_level_db, 4) << " dB at "
                << detail::format_g(b.center / 1e9, 6) << " GHz)\n";
        return bundle.exit_code();
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Runner r(out, err);
    CLI::App app{"MIMO antenna diversity metrics and band-notch design toolkit", "mdk"};
    app.require_subcommand(1);
    std::function<int()> action;

    auto add_jobs = [&](CLI::App* c) {
        c->add_option("--jobs", r.jobs, "Worker threads for per-frequency evaluation")->check(CLI::Range(1u, 1024u));
    };

    auto* metrics = app.add_subcommand("metrics", "Compute one metric series");
    metrics->require_subcommand(1);
    {
        auto* c = metrics->add_subcommand("ecc-ff", "Envelope correlation from two far-field pattern files");
        c->add_option("--a", r.a_path, "First .ffp file")->required();
        c->add_option("--b", r.b_path, "Second .ffp file")->required();
        c->add_option("--env", r.env_name, "uniform | indoor | outdoor | gaussian");
        c->add_option("--xpr-db", r.xpr_db, "Override the environment's XPR");
        c->add_option("--out", r.out_path, "Output .csv or .json (stdout when omitted)");
        add_jobs(c);
        c->callback([&] { action = [&] { return r.ecc_ff(); }; });
    }
    {
        auto* c = metrics->add_subcommand("ecc-sp", "Envelope correlation from S-parameters");
        c->add_option("--net", r.net_path, "Touchstone .sNp file")->required();
        c->add_option("--pair", r.pair_str, "Port pair i,j");
        c->add_option("--out", r.out_path, "Output .csv or .json");
        add_jobs(c);
        c->callback([&] { action = [&] { return r.ecc_sp(); }; });
    }
    {
        auto* c = metrics->add_subcommand("tarc", "TARC envelope over excitation phases");
        c->add_option("--net", r.net_path, "Touchstone .sNp file")->required();
        c->add_option("--phases", r.phases, "Phase samples per free port")->check(CLI::Range(std::size_t{2}, std::size_t{64}));
        c->add_option("--excitation", r.excitation, "Single excitation: phases of ports 2..N in radians");
        c->add_option("--out", r.out_path, "Output .csv or .json");
        add_jobs(c);
        c->callback([&] { action = [&] { return r.tarc_cmd(); }; });
    }
    {
        auto* c = metrics->add_subcommand("ccl", "Channel capacity loss for a port pair");
        c->add_option("--net", r.net_path, "Touchstone .sNp file")->required();
        c->add_option("--pair", r.pair_str, "Port pair i,j");
        c->add_option("--out", r.out_path, "Output .csv or .json");
        add_jobs(c);
        c->callback([&] { action = [&] { return r.ccl_cmd(); }; });
    }
    {
        auto* c = metrics->add_subcommand("meg", "Mean effective gain (dB), or the ratio when --b is given");
        c->add_option("--a", r.a_path, ".ffp file")->required();
        c->add_option("--b", r.b_path, "Second .ffp file for the MEG ratio");
        c->add_option("--env", r.env_name, "uniform | indoor | outdoor | gaussian");
        c->add_option("--xpr-db", r.xpr_db, "Override the environment's XPR");
        c->add_option("--out", r.out_path, "Output .csv or .json");
        add_jobs(c);
        c->callback([&] { action = [&] { return r.meg_cmd(); }; });
    }

    auto* design = app.add_subcommand("design", "Band-notch design calculators");
    design->require_subcommand(1);
    {
        auto* c = design->add_subcommand("stub", "Quarter-wave stub length");
        c->add_option("--f0-ghz", r.f0_ghz, "Notch centre")->required();
        c->add_option("--er", r.er, "Substrate relative permittivity");
        add_jobs(c);
        c->callback([&] { action = [&] { return r.stub(); }; });
    }
    {
        auto* c = design->add_subcommand("slot", "U-slot arm and gap");
        c->add_option("--f0-ghz", r.f0_ghz, "Slot resonance")->required();
        c->add_option("--er", r.er, "Substrate relative permittivity");
        add_jobs(c);
        c->callback([&] { action = [&] { return r.slot(); }; });
    }
    {
        auto* c = design->add_subcommand("notch-bw", "Rejection bandwidth from the stub gap");
        c->add_option("--gap-mm", r.gap_mm, "Stub-to-ground gap")->required();
        c->add_option("--model", r.model_path, "Gap model JSON");
        add_jobs(c);
        c->callback([&] { action = [&] { return r.notch_bw(); }; });
    }

    auto* synth = app.add_subcommand("synth", "Generate synthetic patterns and networks");
    synth->require_subcommand(1);
    {
        auto* c = synth->add_subcommand("dipole", "Hertzian dipole pattern (.ffp)");
        c->add_option("--axis", r.axis, "x | y | z");
        c->add_option("--step-deg", r.step_deg, "Grid step in degrees");
        c->add_option("--freq-ghz", r.freq_ghz, "Frequency");
        c->add_option("--out", r.out_path, "Output .ffp")->required();
        add_jobs(c);
        c->callback([&] { action = [&] { return r.synth_dipole(); }; });
    }
    {
        auto* c = synth->add_subcommand("notched-net", "Band-notched multiport network (.sNp)");
        c->add_option("--center-ghz", r.center_ghz, "Notch centre");
        c->add_option("--bw-ghz", r.bw_ghz, "Notch bandwidth");
        c->add_option("--depth-db", r.depth_db, "Reflection level at the notch centre");
        c->add_option("--ports", r.ports, "Port count")->check(CLI::Range(std::size_t{1}, std::size_t{64}));
        c->add_option("--fmin-ghz", r.fmin_ghz, "Sweep start");
        c->add_option("--fmax-ghz", r.fmax_ghz, "Sweep stop");
        c->add_option("--points", r.points, "Sweep points");
        c->add_option("--coupling-db", r.coupling_db, "Coupling level between ports");
        c->add_option("--format", r.format, "ri | ma | db");
        c->add_option("--out", r.out_path, "Output .sNp")->required();
        add_jobs(c);
        c->callback([&] { action = [&] { return r.synth_net(); }; });
    }

    auto* report = app.add_subcommand("report", "Evaluate every diversity check against the verdict mask");
    report->add_option("--net", r.net_path, "Touchstone .sNp file")->required();
    report->add_option("--patterns", r.patterns_dir, "Directory of port<k>.ffp files");
    report->add_option("--mask", r.mask_path, "Verdict mask JSON");
    report->add_option("--phases", r.phases, "TARC phase samples per free port")->check(CLI::Range(std::size_t{2}, std::size_t{64}));
    report->add_option("--out", r.out_path, "Output directory");
    add_jobs(report);
    report->callback([&] { action = [&] { return r.report(); }; });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }

    try {
        return action ? action() : kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (...) {
        err << "error: unknown failure\n";
        return kInputError;
    }
}

}  // namespace mdk::cli
