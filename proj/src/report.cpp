#include "mdk/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

#include "mdk/error.hpp"
#include "text_util.hpp"

namespace mdk {

namespace {

using ojson = nlohmann::ordered_json;

double rounded(double v) { return std::strtod(detail::format_g(v, kOutputDigits).c_str(), nullptr); }

std::string pair_tag(std::size_t i, std::size_t j) { return std::to_string(i) + "_" + std::to_string(j); }

bool excluded(double f, const std::vector<std::pair<double, double>>& bands) {
    return std::any_of(bands.begin(), bands.end(), [f](const auto& b) { return f >= b.first && f <= b.second; });
}

// Worst (largest) value of a set of series, optionally skipping excluded frequencies.
std::optional<double> worst_of(const ReportBundle& r, const std::vector<std::string>& ids,
                               const std::vector<std::pair<double, double>>* exclude) {
    std::optional<double> worst;
    for (const auto& [id, s] : r.metrics) {
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (exclude && excluded(s.freqs[k], *exclude)) continue;
            if (!worst || s.values[k] > *worst) worst = s.values[k];
        }
    }
    return worst;
}

Verdict judge(const ReportBundle& r, std::string id, std::vector<std::string> series, double threshold,
              const std::vector<std::pair<double, double>>* exclude) {
    auto worst = worst_of(r, series, exclude);
    const bool ok = !worst || *worst <= threshold;
    return {std::move(id), ok ? VerdictStatus::Pass : VerdictStatus::Fail, worst, threshold, std::move(series)};
}

const char* status_name(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Pass: return "pass";
        case VerdictStatus::Fail: return "fail";
        case VerdictStatus::Skipped: return "skipped";
    }
    return "?";
}

}  // namespace

VerdictMask VerdictMask::from_json(std::string_view text, VerdictMask base) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const ojson::parse_error& e) {
        throw ParseError(0, std::string("mask JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(0, "mask JSON must be an object");
    auto take = [&](const char* key, double& dst) {
        if (!j.contains(key)) return;
        if (!j[key].is_number()) throw ParseError(0, std::string("mask field '") + key + "' must be a number");
        dst = j[key].get<double>();
    };
    take("reflection_db_max", base.reflection_db_max);
    take("coupling_db_max", base.coupling_db_max);
    take("ecc_max", base.ecc_max);
    take("tarc_db_max", base.tarc_db_max);
    take("ccl_bits_max", base.ccl_bits_max);
    take("notch_threshold_db", base.notch_threshold_db);
    if (j.contains("notch_bands_ghz")) {
        const auto& bands = j["notch_bands_ghz"];
        if (!bands.is_array()) throw ParseError(0, "mask field 'notch_bands_ghz' must be an array");
        base.notch_bands.clear();
        for (const auto& b : bands) {
            if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
                throw ParseError(0, "each notch band must be [f_low_ghz, f_high_ghz]");
            const double lo = b[0].get<double>() * 1e9, hi = b[1].get<double>() * 1e9;
            if (!(lo < hi)) throw ParseError(0, "notch band must have f_low < f_high");
            base.notch_bands.emplace_back(lo, hi);
        }
    }
    return base;
}

VerdictMask VerdictMask::from_json(std::string_view text) { return from_json(text, VerdictMask{}); }

bool ReportBundle::all_pass() const {
    return std::none_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.status == VerdictStatus::Fail; });
}

bool ReportBundle::any_unreliable() const {
    return std::any_of(metrics.begin(), metrics.end(), [](const auto& m) { return m.second.any_unreliable(); });
}

int ReportBundle::exit_code() const {
    if (!all_pass()) return 1;
    if (any_unreliable()) return 3;
    return 0;
}

ReportBundle build_report(const NetworkData& net, const std::vector<std::vector<FarFieldPattern>>& patterns,
                          const ReportOptions& opts) {
    const std::size_t n = net.port_count();
    ReportBundle r;
    std::vector<std::string> refl_ids, coup_ids, ccl_ids, ecc_ids;

    for (std::size_t i = 1; i <= n; ++i) {
        auto id = "s_db_" + pair_tag(i, i);
        r.metrics.emplace_back(id, s_db(net, i, i));
        refl_ids.push_back(id);
        for (auto& b : detect_notch(r.metrics.back().second, opts.mask.notch_threshold_db)) r.notches.push_back(b);
    }
    r.notches = merge_notches(std::move(r.notches));
    if (opts.mask.notch_bands.empty()) {
        for (const auto& b : r.notches) r.excluded_bands.emplace_back(b.f_low, b.f_high);
    } else {
        r.excluded_bands = opts.mask.notch_bands;
    }

    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= n; ++j) {
            if (i == j) continue;
            auto id = "s_db_" + pair_tag(i, j);
            r.metrics.emplace_back(id, s_db(net, i, j));
            coup_ids.push_back(id);
        }

    r.metrics.emplace_back("tarc_envelope", tarc_envelope(net, opts.tarc_phase_samples, opts.jobs));

    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = i + 1; j <= n; ++j) {
            auto id = "ccl_" + pair_tag(i, j);
            r.metrics.emplace_back(id, ccl_pair(net, i, j, opts.jobs));
            ccl_ids.push_back(id);
        }

    const bool have_patterns = !patterns.empty();
    if (have_patterns) {
        if (patterns.size() != n)
            throw DomainError("pattern set covers " + std::to_string(patterns.size()) + " ports, network has " +
                              std::to_string(n));
        const auto& ref = patterns.front();
        if (ref.empty()) throw DomainError("port 1 has no patterns");
        for (std::size_t p = 0; p < n; ++p) {
            if (patterns[p].size() != ref.size())
                throw DomainError("port " + std::to_string(p + 1) + " has a different number of pattern frequencies");
            for (std::size_t k = 0; k < ref.size(); ++k)
                if (patterns[p][k].freq() != ref[k].freq())
                    throw DomainError("port " + std::to_string(p + 1) + " patterns are at different frequencies");
        }
        std::vector<double> pf;
        for (const auto& p : ref) pf.push_back(p.freq());

        double worst_meg_db = 0.0;
        for (const auto& [env_name, env] : opts.environments) {
            for (std::size_t i = 1; i <= n; ++i)
                for (std::size_t j = i + 1; j <= n; ++j) {
                    MetricSeries ecc{MetricId::EccFarField, pf, std::vector<double>(pf.size()),
                                     std::vector<bool>(pf.size(), false), {}};
                    MetricSeries ratio{MetricId::MegRatio, pf, std::vector<double>(pf.size()),
                                       std::vector<bool>(pf.size(), false), {}};
                    ecc.meta = ratio.meta = {{"pair", std::to_string(i) + "," + std::to_string(j)},
                                             {"environment", env.describe()}};
                    for (std::size_t k = 0; k < pf.size(); ++k) {
                        ecc.values[k] = ecc_farfield(patterns[i - 1][k], patterns[j - 1][k], env);
                        ratio.values[k] = meg_ratio(patterns[i - 1][k], patterns[j - 1][k], env);
                        worst_meg_db = std::max(worst_meg_db, std::abs(10.0 * std::log10(ratio.values[k])));
                    }
                    auto id = "ecc_ff_" + env_name + "_" + pair_tag(i, j);
                    r.metrics.emplace_back(id, std::move(ecc));
                    ecc_ids.push_back(id);
                    r.metrics.emplace_back("meg_ratio_" + env_name + "_" + pair_tag(i, j), std::move(ratio));
                }
        }
        r.worst_meg_ratio_db = worst_meg_db;
    }

    const auto& mask = opts.mask;
    r.verdicts.push_back(judge(r, "reflection", refl_ids, mask.reflection_db_max, &r.excluded_bands));
    r.verdicts.push_back(judge(r, "coupling", coup_ids, mask.coupling_db_max, nullptr));
    if (have_patterns) {
        r.verdicts.push_back(judge(r, "ecc", ecc_ids, mask.ecc_max, nullptr));
    } else {
        r.verdicts.push_back({"ecc", VerdictStatus::Skipped, std::nullopt, mask.ecc_max, {}});
    }
    r.verdicts.push_back(judge(r, "tarc", {"tarc_envelope"}, mask.tarc_db_max, &r.excluded_bands));
    r.verdicts.push_back(judge(r, "ccl", ccl_ids, mask.ccl_bits_max, &r.excluded_bands));
    if (!have_patterns) r.verdicts.push_back({"meg_ratio", VerdictStatus::Skipped, std::nullopt, 0.0, {}});
    return r;
}

std::string report_json(const ReportBundle& r) {
    ojson j;
    auto inputs = ojson::array();
    for (const auto& in : r.inputs)
        inputs.push_back({{"role", in.role}, {"path", in.path}, {"bytes", in.bytes}, {"fnv1a64", in.fnv1a64}});
    j["inputs"] = std::move(inputs);

    auto notches = ojson::array();
    for (const auto& b : r.notches)
        notches.push_back({{"f_low_hz", rounded(b.f_low)},
                           {"f_high_hz", rounded(b.f_high)},
                           {"center_hz", rounded(b.center)},
                           {"worst_level_db", rounded(b.worst_level_db)}});
    j["notches"] = std::move(notches);

    auto excl = ojson::array();
    for (const auto& [lo, hi] : r.excluded_bands) excl.push_back({rounded(lo), rounded(hi)});
    j["excluded_bands_hz"] = std::move(excl);

    auto verdicts = ojson::array();
    for (const auto& v : r.verdicts) {
        ojson o{{"check", v.check_id}, {"status", status_name(v.status)}};
        o["worst"] = v.worst ? ojson(rounded(*v.worst)) : ojson(nullptr);
        o["threshold"] = rounded(v.threshold);
        o["series"] = v.series;
        verdicts.push_back(std::move(o));
    }
    j["verdicts"] = std::move(verdicts);
    j["worst_meg_ratio_db"] = r.worst_meg_ratio_db ? ojson(rounded(*r.worst_meg_ratio_db)) : ojson(nullptr);

    auto metrics = ojson::array();
    for (const auto& [id, s] : r.metrics) {
        ojson m{{"id", id}, {"metric_id", metric_name(s.metric_id)}, {"file", id + ".csv"}};
        m["meta"] = ojson::object();
        for (const auto& [k, v] : s.meta) m["meta"][k] = v;
        double worst = s.values.empty() ? 0.0 : *std::max_element(s.values.begin(), s.values.end());
        m["max"] = rounded(worst);
        m["unreliable_points"] = std::count(s.unreliable.begin(), s.unreliable.end(), true);
        metrics.push_back(std::move(m));
    }
    j["metrics"] = std::move(metrics);
    j["all_pass"] = r.all_pass();
    j["exit_code"] = r.exit_code();
    return j.dump(2) + "\n";
}

std::string fnv1a64_hex(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mdk
