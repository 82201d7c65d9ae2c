#pragma once

#include <string_view>
#include <vector>

namespace mdk {

/// Speed of light in vacuum, exact SI value (m/s).
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Quarter-wave stub record: length * f0 * 4 * sqrt(eps_r) == c.
struct StubSpec {
    double f0;      // Hz
    double eps_r;
    double length;  // m
};

/// U-slot arm (quarter guided wavelength) and gap (eighth guided wavelength).
struct SlotSpec {
    double f0;     // Hz
    double eps_r;
    double l5;     // m
    double g;      // m
};

/// Guided wavelength c / (f0 sqrt(eps_r)), using the substrate permittivity directly.
double guided_wavelength(double f0, double eps_r);

/// c / (4 f0 sqrt(eps_r)) in metres.
double stub_length(double f0, double eps_r);
StubSpec design_stub(double f0, double eps_r);

/// Inverse of stub_length: notch centre in Hz for a stub of `length` metres.
double notch_center(double length, double eps_r);

SlotSpec slot_dimensions(double f0, double eps_r);

struct GapPoint {
    double gap_mm;
    double bw_ghz;
    double f_low_ghz;
    double f_high_ghz;
};

struct GapPrediction {
    double bw_ghz;
    double f_low_ghz;
    double f_high_ghz;
};

/// Piecewise-linear map from stub-to-ground gap to rejection bandwidth.
class GapModel {
public:
    /// Throws DomainError unless gaps are strictly increasing and there are at least two points.
    explicit GapModel(std::vector<GapPoint> points);

    /// The two calibration points measured on the fabricated stub (0.25 mm and 1.5 mm).
    static GapModel defaults();

    /// `{"points": [{"gap_mm", "bw_ghz", "f_low_ghz", "f_high_ghz"}, ...]}`.
    static GapModel from_json(std::string_view text);

    const std::vector<GapPoint>& points() const noexcept { return points_; }

    /// Throws RangeError outside the calibrated gap span.
    GapPrediction predict(double gap_mm) const;

private:
    std::vector<GapPoint> points_;
};

inline GapPrediction notch_bandwidth_from_gap(double gap_mm, const GapModel& model) { return model.predict(gap_mm); }

}  // namespace mdk
