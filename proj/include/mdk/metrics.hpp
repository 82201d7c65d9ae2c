#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mdk/farfield.hpp"
#include "mdk/touchstone.hpp"

namespace mdk {

// ---------------------------------------------------------------------------
// Propagation environment

enum class EnvironmentKind { Uniform, Gaussian };

/// Incident-field statistics: cross-polarization ratio plus angular power
/// densities per polarization. Gaussian densities are centred `m` degrees above
/// the horizon with spread `sigma`, uniform in phi.
struct Environment {
    EnvironmentKind kind = EnvironmentKind::Uniform;
    double xpr_db = 0.0;
    double m_v = 10.0;
    double m_h = 10.0;
    double sigma_v = 15.0;
    double sigma_h = 15.0;

    static Environment uniform(double xpr_db = 0.0);
    static Environment gaussian(double xpr_db, double m_v = 10.0, double m_h = 10.0, double sigma_v = 15.0,
                                double sigma_h = 15.0);
    static Environment indoor();   // XPR 5 dB
    static Environment outdoor();  // XPR 1 dB

    /// "uniform", "indoor", "outdoor" or "gaussian"; throws DomainError otherwise.
    static Environment preset(std::string_view name);

    double xpr_linear() const;
    void validate() const;
    std::string describe() const;
};

/// Per-theta-row densities P_theta, P_phi on a grid, each normalized so that
/// the grid quadrature of P over the sphere is 1.
struct AngularDensity {
    std::vector<double> p_theta;
    std::vector<double> p_phi;
};

AngularDensity angular_density(const Environment& env, const PatternGrid& grid);

// ---------------------------------------------------------------------------
// Metric series

enum class MetricId { EccFarField, EccSParams, TarcDb, CclBits, MegDb, MegRatio, SDb };

std::string_view metric_name(MetricId id);

struct MetricSeries {
    MetricId metric_id;
    std::vector<double> freqs;
    std::vector<double> values;
    /// Per point: true when the value hit a numerical floor/clamp.
    std::vector<bool> unreliable;
    std::map<std::string, std::string> meta;

    std::size_t size() const noexcept { return freqs.size(); }
    bool any_unreliable() const;
    void validate() const;
};

/// Format used by every text output: 9 significant digits.
inline constexpr int kOutputDigits = 9;

std::string to_csv(const MetricSeries& s);
std::string to_json(const MetricSeries& s);

// ---------------------------------------------------------------------------
// Far-field metrics

/// Envelope correlation from two patterns in an environment:
/// |<1,2>|^2 / (<1,1><2,2>) with the XPR-weighted inner product over the sphere.
double ecc_farfield(const FarFieldPattern& a, const FarFieldPattern& b, const Environment& env);

/// Mean effective gain of a lossless pattern (multiply by efficiency for a lossy one).
double meg(const FarFieldPattern& p, const Environment& env);
double meg_ratio(const FarFieldPattern& a, const FarFieldPattern& b, const Environment& env);

// ---------------------------------------------------------------------------
// S-parameter metrics. Port indices are 1-based to match data sheets.

inline constexpr double kEccDenominatorFloor = 1e-9;
inline constexpr double kCclDetClamp = 1e-12;
inline constexpr double kTarcFloorDb = -200.0;
inline constexpr std::uint64_t kTarcSeed = 0x5EED;

MetricSeries s_db(const NetworkData& net, std::size_t i, std::size_t j);
MetricSeries ecc_sparams(const NetworkData& net, std::size_t i, std::size_t j, unsigned jobs = 1);

/// TARC for one excitation; `phases` holds ports 2..N in radians (port 1 is 0).
MetricSeries tarc(const NetworkData& net, const std::vector<double>& phases, unsigned jobs = 1);

/// TARC at a single matrix and unit-modulus phase vector (length N, port 1 included).
double tarc_db_at(const Eigen::MatrixXcd& s, const std::vector<double>& phases_all);

/// Worst TARC over phase samples: full factorial of n_phase_samples per free
/// phase for N <= 4, otherwise n_phase_samples^3 draws from the same grid.
MetricSeries tarc_envelope(const NetworkData& net, std::size_t n_phase_samples, unsigned jobs = 1);

MetricSeries ccl_pair(const NetworkData& net, std::size_t i, std::size_t j, unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Notch detection

struct NotchBand {
    double f_low;
    double f_high;
    double center;
    double worst_level_db;
};

/// Maximal runs of an s_db series above `threshold_db`, edges interpolated at
/// the crossing.
std::vector<NotchBand> detect_notch(const MetricSeries& series, double threshold_db = -10.0);

/// Union of overlapping bands, sorted by f_low.
std::vector<NotchBand> merge_notches(std::vector<NotchBand> bands);

}  // namespace mdk
