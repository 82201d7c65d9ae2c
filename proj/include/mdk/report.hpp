#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mdk/farfield.hpp"
#include "mdk/metrics.hpp"
#include "mdk/touchstone.hpp"

namespace mdk {

/// Pass/fail limits. Defaults are the bounds the antenna was built to meet.
struct VerdictMask {
    double reflection_db_max = -10.0;  // outside notch
    double coupling_db_max = -17.0;    // full sweep
    double ecc_max = 0.5;              // full sweep, every environment
    double tarc_db_max = -8.0;         // outside notch
    double ccl_bits_max = 0.5;         // outside notch
    double notch_threshold_db = -10.0;
    /// Declared rejection bands in Hz; empty means "use the detected bands".
    std::vector<std::pair<double, double>> notch_bands;

    /// Overrides from `{"reflection_db_max": .., "notch_bands_ghz": [[lo, hi], ..], ...}`.
    static VerdictMask from_json(std::string_view text, VerdictMask base);
    static VerdictMask from_json(std::string_view text);
};

enum class VerdictStatus { Pass, Fail, Skipped };

struct Verdict {
    std::string check_id;
    VerdictStatus status;
    std::optional<double> worst;
    double threshold;
    std::vector<std::string> series;  // ids of the MetricSeries the verdict was computed from
};

struct InputDescriptor {
    std::string role;
    std::string path;
    std::size_t bytes = 0;
    std::string fnv1a64;
};

/// Named series plus everything the report needs to print and judge.
struct ReportBundle {
    std::vector<InputDescriptor> inputs;
    std::vector<std::pair<std::string, MetricSeries>> metrics;
    std::vector<NotchBand> notches;
    std::vector<std::pair<double, double>> excluded_bands;
    std::vector<Verdict> verdicts;
    std::optional<double> worst_meg_ratio_db;

    bool all_pass() const;
    bool any_unreliable() const;
    /// 0 all pass, 1 a verdict failed, 3 all pass but a value was flagged unreliable.
    int exit_code() const;
};

struct ReportOptions {
    VerdictMask mask;
    std::size_t tarc_phase_samples = 8;
    unsigned jobs = 1;
    /// Environments for far-field ECC and MEG, keyed by name.
    std::vector<std::pair<std::string, Environment>> environments = {
        {"uniform", Environment::uniform()}, {"indoor", Environment::indoor()}, {"outdoor", Environment::outdoor()}};
};

/// `patterns[k]` holds port k+1's patterns (one per frequency); pass an empty
/// vector to skip the far-field checks. Throws DomainError when the pattern
/// set does not match the network's port count or frequencies.
ReportBundle build_report(const NetworkData& net, const std::vector<std::vector<FarFieldPattern>>& patterns,
                          const ReportOptions& opts);

std::string report_json(const ReportBundle& bundle);

std::string fnv1a64_hex(std::string_view data);

}  // namespace mdk
