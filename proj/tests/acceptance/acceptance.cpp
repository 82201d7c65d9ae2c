// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdk/cli.hpp"
#include "mdk/design.hpp"
#include "mdk/farfield.hpp"
#include "mdk/metrics.hpp"
#include "mdk/synth.hpp"
#include "mdk/touchstone.hpp"

namespace fs = std::filesystem;
using namespace mdk;

namespace {

constexpr double kPi = std::numbers::pi;

// Collects failed sub-checks of one criterion.
struct Checks {
    std::vector<std::string> failures;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run mdk_run(std::vector<std::string> args) {
    args.insert(args.begin(), "mdk");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

FarFieldPattern isotropic(double step) {
    auto g = PatternGrid::regular(step, step);
    return FarFieldPattern(1e9, g, Eigen::MatrixXcd::Ones(g.n_theta(), g.n_phi()),
                           Eigen::MatrixXcd::Zero(g.n_theta(), g.n_phi()));
}

void ac1(Checks& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = PatternGrid::regular(1.0, 1.0);
    const auto z = hertzian_dipole({DipoleAxis::Z, 1e9}, g);
    const auto x = hertzian_dipole({DipoleAxis::X, 1e9}, g);
    const auto env = Environment::uniform(0.0);
    const double zx = ecc_farfield(z, x, env);
    const double zz = ecc_farfield(z, z, env);
    const double xx = ecc_farfield(x, x, env);
    const double dt = seconds_since(t0);
    c.expect(std::abs(zx) <= 1e-9, "ecc(z, x) = " + fmt(zx));
    c.expect(std::abs(zz - 1.0) <= 1e-12, "ecc(z, z) - 1 = " + fmt(zz - 1.0));
    c.expect(std::abs(xx - 1.0) <= 1e-12, "ecc(x, x) - 1 = " + fmt(xx - 1.0));
    c.expect(dt < 5.0, "runtime " + fmt(dt) + " s");
    c.note("ecc(z,x)=" + fmt(zx) + " t=" + fmt(dt) + "s");
}

void ac2(Checks& c) {
    const auto z1 = hertzian_dipole({DipoleAxis::Z, 1e9}, PatternGrid::regular(1.0, 1.0));
    const double d = max_directivity(z1);
    c.expect(std::abs(d / 1.5 - 1.0) <= 5e-3, "D = " + fmt(d));

    // Error ratio when the step halves; the trapezoid rule is second order.
    const double e2 = radiated_power(isotropic(2.0)) - 4 * kPi;
    const double e1 = radiated_power(isotropic(1.0)) - 4 * kPi;
    const double ratio = e2 / e1;
    c.expect(ratio >= 3.5 && ratio <= 4.5, "isotropic halving ratio " + fmt(ratio));

    // The dipole integrand is flat at the poles, so it converges faster than the nominal order.
    const double exact = 8 * kPi / 3;
    const double d2 = radiated_power(hertzian_dipole({DipoleAxis::Z, 1e9}, PatternGrid::regular(2.0, 2.0))) - exact;
    const double d1 = radiated_power(z1) - exact;
    const double dratio = d2 / d1;
    c.expect(dratio >= 4.0, "dipole halving ratio " + fmt(dratio));
    c.note("D=" + fmt(d) + " ratio=" + fmt(ratio) + " dipole_ratio=" + fmt(dratio));
}

void ac3(Checks& c) {
    const auto g = PatternGrid::regular(1.0, 1.0);
    const auto env = Environment::uniform(0.0);
    const auto z = hertzian_dipole({DipoleAxis::Z, 1e9}, g);
    const auto x = hertzian_dipole({DipoleAxis::X, 1e9}, g);
    const auto y = hertzian_dipole({DipoleAxis::Y, 1e9}, g);
    const double m = meg(z, env);
    c.expect(std::abs(m / 0.5 - 1.0) <= 5e-3, "MEG(z) = " + fmt(m));
    double worst = 0.0;
    const FarFieldPattern* ps[] = {&z, &x, &y};
    for (auto* a : ps)
        for (auto* b : ps) worst = std::max(worst, std::abs(meg_ratio(*a, *b, env) - 1.0));
    c.expect(worst <= 1e-6, "max |meg_ratio - 1| = " + fmt(worst));
    c.note("MEG=" + fmt(m) + " ratio_dev=" + fmt(worst));
}

void ac4(Checks& c) {
    const double stub = stub_length(5e9, 4.5) * 1e3;
    c.expect(std::abs(stub / 7.067 - 1.0) <= 5e-4, "stub = " + fmt(stub) + " mm");
    c.expect(std::abs(stub / 7.25 - 1.0) <= 0.05, "stub vs 7.25 mm layout");
    const auto slot = slot_dimensions(3.6e9, 4.5);
    const double l5 = slot.l5 * 1e3, g = slot.g * 1e3;
    c.expect(std::abs(l5 / 9.816 - 1.0) <= 5e-4, "l5 = " + fmt(l5) + " mm");
    c.expect(std::abs(g / 4.908 - 1.0) <= 5e-4, "g = " + fmt(g) + " mm");
    c.expect(std::abs(l5 / 10.0 - 1.0) <= 0.05 && std::abs(g / 5.0 - 1.0) <= 0.05, "slot vs (10, 5) mm layout");
    const double f = notch_center(7.25e-3, 4.5) / 1e9;
    c.expect(std::abs(f - 4.87) <= 0.005, "notch centre = " + fmt(f) + " GHz");
    c.expect(f >= 4.85 && f <= 6.35, "notch centre outside 4.85-6.35 GHz");
    c.note("stub=" + fmt(stub) + "mm l5=" + fmt(l5) + "mm g=" + fmt(g) + "mm f=" + fmt(f) + "GHz");
}

void ac5(Checks& c) {
    const auto m = GapModel::defaults();
    const auto a = m.predict(0.25), b = m.predict(1.5), mid = m.predict(0.5);
    c.expect(a.bw_ghz == 1.0 && a.f_low_ghz == 5.25 && a.f_high_ghz == 6.25, "0.25 mm point");
    c.expect(b.bw_ghz == 2.6 && b.f_low_ghz == 3.7 && b.f_high_ghz == 6.3, "1.5 mm point");
    c.expect(std::abs(mid.bw_ghz - 1.32) <= 1e-12, "0.5 mm bw = " + fmt(mid.bw_ghz));
    c.expect(std::abs(mid.bw_ghz - 1.5) <= 0.2, "0.5 mm bw vs measured 1.5 GHz");
    c.note("bw(0.5mm)=" + fmt(mid.bw_ghz) + "GHz");
}

void ac6(Checks& c, const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto net = (work / "demo.s8p").string();
    auto s = mdk_run({"synth", "notched-net", "--center-ghz", "5.6", "--bw-ghz", "1.5", "--depth-db", "-1", "--ports", "8",
                      "--fmin-ghz", "2", "--fmax-ghz", "12", "--points", "401", "--coupling-db", "-20", "--out", net});
    c.expect(s.code == 0, "synth exit " + std::to_string(s.code) + " " + s.err);
    auto r = mdk_run({"report", "--net", net, "--out", (work / "ac6").string()});
    const double dt = seconds_since(t0);
    c.expect(r.code == 0, "report exit " + std::to_string(r.code));
    c.expect(dt < 10.0, "runtime " + fmt(dt) + " s");

    const auto j = nlohmann::json::parse(slurp(work / "ac6" / "report.json"));
    const double step = 10e9 / 400;
    c.expect(j["notches"].size() == 1, "notch count " + std::to_string(j["notches"].size()));
    if (j["notches"].size() == 1) {
        const double lo = j["notches"][0]["f_low_hz"], hi = j["notches"][0]["f_high_hz"];
        c.expect(std::abs(lo - 4.85e9) <= step, "notch low edge " + fmt(lo));
        c.expect(std::abs(hi - 6.35e9) <= step, "notch high edge " + fmt(hi));
        c.note("notch " + fmt(lo / 1e9) + "-" + fmt(hi / 1e9) + " GHz");
    }
    struct Want {
        const char* id;
        double limit;
    };
    for (auto w : {Want{"reflection", -10.0}, Want{"coupling", -17.0}, Want{"tarc", -8.0}, Want{"ccl", 0.5}}) {
        bool seen = false;
        for (const auto& v : j["verdicts"]) {
            if (v["check"] != w.id) continue;
            seen = true;
            const double worst = v["worst"].is_null() ? NAN : v["worst"].get<double>();
            c.expect(v["status"] == "pass" && v["threshold"] == w.limit && worst <= w.limit,
                     std::string(w.id) + " worst " + fmt(worst));
            c.note(std::string(w.id) + "=" + fmt(worst));
        }
        c.expect(seen, std::string(w.id) + " verdict missing");
    }
    c.note("t=" + fmt(dt) + "s");
}

NetworkData random_network(std::size_t n, std::size_t nf, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(1e-3, 0.99), ang(-kPi, kPi);
    std::vector<double> f;
    std::vector<Eigen::MatrixXcd> m;
    for (std::size_t k = 0; k < nf; ++k) {
        f.push_back(1e9 + 1.7e7 * double(k));
        Eigen::MatrixXcd s(n, n);
        for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::polar(mag(rng), ang(rng));
        m.push_back(s);
    }
    return NetworkData(n, 50.0, f, m);
}

void ac7(Checks& c) {
    double worst_fmt = 0.0;
    for (std::size_t n : {1u, 2u, 3u, 4u, 8u}) {
        const auto net = random_network(n, 11, 1000 + unsigned(n));
        std::vector<NetworkData> parsed;
        for (auto f : {DataFormat::RI, DataFormat::MA, DataFormat::DB})
            parsed.push_back(parse_touchstone(write_touchstone(net, {f, FreqUnit::GHz, 17}), n));
        for (std::size_t k = 0; k < net.size(); ++k)
            for (const auto& p : parsed) {
                worst_fmt = std::max(worst_fmt, (p.s(k) - parsed[0].s(k)).cwiseAbs().maxCoeff());
                worst_fmt = std::max(worst_fmt, (p.s(k) - net.s(k)).cwiseAbs().maxCoeff());
            }
    }
    c.expect(worst_fmt <= 1e-9, "Touchstone RI/MA/DB deviation " + fmt(worst_fmt));

    const auto g = PatternGrid::regular(3.0, 4.0);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd(0, 1);
    std::vector<FarFieldPattern> ps;
    for (double f : {1e9, 2.45e9, 5.8e9}) {
        Eigen::MatrixXcd et(g.n_theta(), g.n_phi()), ep(g.n_theta(), g.n_phi());
        for (Eigen::Index i = 0; i < et.size(); ++i) {
            et(i) = cplx(nd(rng), nd(rng));
            ep(i) = cplx(nd(rng), nd(rng));
        }
        ps.emplace_back(f, g, et, ep);
    }
    const auto back = parse_pattern_csv(write_pattern_csv(ps)).patterns;
    double worst_ffp = back.size() == ps.size() ? 0.0 : INFINITY;
    for (std::size_t k = 0; k < back.size() && k < ps.size(); ++k) {
        if (!(back[k].grid() == ps[k].grid()) || back[k].freq() != ps[k].freq()) worst_ffp = INFINITY;
        worst_ffp = std::max(worst_ffp, (back[k].e_theta() - ps[k].e_theta()).cwiseAbs().maxCoeff());
        worst_ffp = std::max(worst_ffp, (back[k].e_phi() - ps[k].e_phi()).cwiseAbs().maxCoeff());
    }
    c.expect(worst_ffp <= 1e-12, ".ffp round-trip deviation " + fmt(worst_ffp));

    const fs::path dir = fs::path(MDK_TEST_DATA_DIR) / "malformed";
    std::ifstream manifest(fs::path(MDK_TEST_DATA_DIR) / "malformed.txt");
    std::string name;
    std::size_t line = 0;
    int count = 0, bad = 0;
    while (manifest >> name >> line) {
        ++count;
        const auto path = (dir / name).string();
        const auto r = name.ends_with(".ffp") ? mdk_run({"metrics", "meg", "--a", path})
                                              : mdk_run({"metrics", "tarc", "--net", path});
        const auto tag = name + ": line " + std::to_string(line) + ":";
        if (r.code != 2 || r.err.find(tag) == std::string::npos) {
            ++bad;
            c.expect(false, name + " exit " + std::to_string(r.code) + " " + r.err);
        }
    }
    c.expect(count >= 20, "corpus has " + std::to_string(count) + " files");
    c.note("fmt_dev=" + fmt(worst_fmt) + " ffp_dev=" + fmt(worst_ffp) + " corpus=" + std::to_string(count) +
           " rejected_ok=" + std::to_string(count - bad));
}

// Every file under `dir`, keyed by relative path.
std::vector<std::pair<std::string, std::string>> tree(const fs::path& dir) {
    std::vector<std::pair<std::string, std::string>> out;
    if (!fs::exists(dir)) return out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), dir).string(), slurp(e.path()));
    std::sort(out.begin(), out.end());
    return out;
}

void ac8(Checks& c, const fs::path& work) {
    const auto in = work / "ac8_in";
    fs::create_directories(in);
    const auto net = (in / "demo.s8p").string();
    mdk_run({"synth", "notched-net", "--ports", "8", "--out", net});
    mdk_run({"synth", "dipole", "--axis", "z", "--step-deg", "2", "--freq-ghz", "5", "--out", (in / "z.ffp").string()});
    mdk_run({"synth", "dipole", "--axis", "x", "--step-deg", "2", "--freq-ghz", "5", "--out", (in / "x.ffp").string()});
    const auto pat = in / "pat2";
    fs::create_directories(pat);
    const auto net2 = (in / "pair.s2p").string();
    mdk_run({"synth", "notched-net", "--ports", "2", "--points", "101", "--out", net2});
    fs::copy_file(in / "z.ffp", pat / "port1.ffp", fs::copy_options::overwrite_existing);
    fs::copy_file(in / "x.ffp", pat / "port2.ffp", fs::copy_options::overwrite_existing);

    // {name, args}; "@OUT" is replaced by a per-run output path.
    const std::vector<std::pair<std::string, std::vector<std::string>>> cmds = {
        {"ecc-ff", {"metrics", "ecc-ff", "--a", (in / "z.ffp").string(), "--b", (in / "x.ffp").string(), "--env", "indoor", "--out", "@OUT/e.csv"}},
        {"ecc-sp", {"metrics", "ecc-sp", "--net", net, "--pair", "1,5", "--out", "@OUT/e.json"}},
        {"tarc", {"metrics", "tarc", "--net", net, "--phases", "6", "--out", "@OUT/t.csv"}},
        {"tarc-excitation", {"metrics", "tarc", "--net", net, "--excitation", "0,1,2,3,4,5,6"}},
        {"ccl", {"metrics", "ccl", "--net", net, "--pair", "2,3"}},
        {"meg", {"metrics", "meg", "--a", (in / "z.ffp").string(), "--env", "outdoor"}},
        {"meg-ratio", {"metrics", "meg", "--a", (in / "z.ffp").string(), "--b", (in / "x.ffp").string()}},
        {"design-stub", {"design", "stub", "--f0-ghz", "5"}},
        {"design-slot", {"design", "slot", "--f0-ghz", "3.6"}},
        {"design-notch-bw", {"design", "notch-bw", "--gap-mm", "0.5"}},
        {"synth-dipole", {"synth", "dipole", "--axis", "y", "--step-deg", "5", "--out", "@OUT/y.ffp"}},
        {"synth-net", {"synth", "notched-net", "--ports", "4", "--format", "ma", "--out", "@OUT/n.s4p"}},
        {"report", {"report", "--net", net, "--out", "@OUT/rep"}},
        {"report-patterns", {"report", "--net", net2, "--patterns", pat.string(), "--out", "@OUT/rep"}},
    };
    int identical = 0;
    for (const auto& [name, args] : cmds) {
        std::vector<Run> runs;
        std::vector<std::vector<std::pair<std::string, std::string>>> files;
        for (const char* jobs : {"1", "8"}) {
            const auto out = work / ("ac8_" + name + "_j" + jobs);
            fs::remove_all(out);
            fs::create_directories(out);
            auto a = args;
            for (auto& s : a)
                if (s.starts_with("@OUT")) s = out.string() + s.substr(4);
            a.insert(a.end(), {"--jobs", jobs});
            runs.push_back(mdk_run(a));
            files.push_back(tree(out));
        }
        const bool same = runs[0].code == runs[1].code && runs[0].out == runs[1].out && files[0] == files[1];
        const bool ran = runs[0].code == 0 || runs[0].code == 3;
        c.expect(ran, name + " exit " + std::to_string(runs[0].code) + " " + runs[0].err);
        c.expect(same, name + " differs between --jobs 1 and --jobs 8");
        identical += same && ran;
    }
    c.note(std::to_string(identical) + "/" + std::to_string(cmds.size()) + " commands identical");
}

}  // namespace

int main() {
    const auto work = fs::temp_directory_path() / "mdk_acceptance";
    fs::remove_all(work);
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria = {
        {"AC1 dipole ECC oracle", ac1},
        {"AC2 directivity oracle and convergence", ac2},
        {"AC3 MEG identity", ac3},
        {"AC4 design formulas vs layout", ac4},
        {"AC5 gap model", ac5},
        {"AC6 synthetic 8-port report", [&](Checks& c) { ac6(c, work); }},
        {"AC7 parser round-trips and malformed corpus", ac7},
        {"AC8 determinism across --jobs", [&](Checks& c) { ac8(c, work); }},
    };

    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Checks c;
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        const bool ok = c.failures.empty();
        failed += !ok;
        std::string detail;
        for (const auto& n : c.notes) detail += (detail.empty() ? "" : " ") + n;
        std::printf("%s  %s  [%s]\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
        for (const auto& f : c.failures) std::printf("      - %s\n", f.c_str());
    }
    fs::remove_all(work);
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
