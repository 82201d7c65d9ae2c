#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mdk {

/// Regular (theta, phi) sampling of the sphere, in degrees.
///
/// theta covers [0, 180] inclusive; phi covers [0, 360) and is periodic.
class PatternGrid {
public:
    PatternGrid(std::vector<double> theta_deg, std::vector<double> phi_deg);

    /// Grid with the given steps; both must divide their range evenly.
    static PatternGrid regular(double theta_step_deg, double phi_step_deg);

    const std::vector<double>& theta_deg() const noexcept { return theta_; }
    const std::vector<double>& phi_deg() const noexcept { return phi_; }
    std::size_t n_theta() const noexcept { return theta_.size(); }
    std::size_t n_phi() const noexcept { return phi_.size(); }
    double theta_step_deg() const noexcept { return theta_[1] - theta_[0]; }
    double phi_step_deg() const noexcept { return phi_.size() > 1 ? phi_[1] - phi_[0] : 360.0; }

    /// Index of an on-grid angle; throws DomainError when off grid.
    std::size_t theta_index(double theta_deg) const;
    std::size_t phi_index(double phi_deg) const;

    friend bool operator==(const PatternGrid&, const PatternGrid&) = default;

private:
    std::vector<double> theta_;
    std::vector<double> phi_;
};

/// Integration weights for dOmega = sin(theta) dtheta dphi on a PatternGrid:
/// trapezoid in theta (endpoints included) times the periodic rectangle rule in phi.
class SphereQuadrature {
public:
    explicit SphereQuadrature(const PatternGrid& grid);

    /// Weight of every sample in theta row `i` (same for all phi).
    double row_weight(std::size_t i) const { return row_w_[i]; }
    const std::vector<double>& row_weights() const noexcept { return row_w_; }

    /// Sum of w * f over a |theta| x |phi| real array.
    double integrate(const Eigen::MatrixXd& f) const;
    /// Sum of all weights (4 pi up to quadrature error).
    double total() const;

private:
    std::vector<double> row_w_;
    std::size_t n_phi_ = 0;
};

/// sin(theta) for a theta given in degrees, exact zero at the poles.
double sin_deg(double deg);
double cos_deg(double deg);

/// Complex far-field components at one frequency. Samples are indexed
/// [theta][phi] and stored unnormalized.
class FarFieldPattern {
public:
    FarFieldPattern(double freq, PatternGrid grid, Eigen::MatrixXcd e_theta, Eigen::MatrixXcd e_phi);

    double freq() const noexcept { return freq_; }
    const PatternGrid& grid() const noexcept { return grid_; }
    const Eigen::MatrixXcd& e_theta() const noexcept { return e_theta_; }
    const Eigen::MatrixXcd& e_phi() const noexcept { return e_phi_; }

    /// |E_theta|^2 + |E_phi|^2 per sample.
    Eigen::MatrixXd intensity() const;

    friend bool operator==(const FarFieldPattern&, const FarFieldPattern&) = default;

private:
    double freq_;
    PatternGrid grid_;
    Eigen::MatrixXcd e_theta_;
    Eigen::MatrixXcd e_phi_;
};

/// Grid steps above this are accepted with a warning.
inline constexpr double kCoarseGridWarnDeg = 15.0;

struct PatternParseResult {
    std::vector<FarFieldPattern> patterns;
    std::vector<std::string> warnings;
};

inline constexpr std::string_view kPatternCsvHeader = "freq_hz,theta_deg,phi_deg,etheta_re,etheta_im,ephi_re,ephi_im";

/// Parse a `.ffp` CSV export into one pattern per frequency, ordered by frequency.
PatternParseResult parse_pattern_csv(std::string_view text);

std::string write_pattern_csv(const std::vector<FarFieldPattern>& patterns, int precision = 17);

/// Integral of |E|^2 over the sphere (relative units).
double radiated_power(const FarFieldPattern& p);

/// 4 pi U(theta, phi) / P_rad at an on-grid direction.
double directivity(const FarFieldPattern& p, double theta_deg, double phi_deg);

/// Maximum directivity over the grid.
double max_directivity(const FarFieldPattern& p);

/// 10 log10(efficiency * D_max) in dBi; efficiency in (0, 1].
double peak_gain(const FarFieldPattern& p, double efficiency = 1.0);

}  // namespace mdk
