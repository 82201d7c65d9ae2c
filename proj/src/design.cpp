#include "mdk/design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "mdk/error.hpp"

namespace mdk {

namespace {

void check_domain(double f0, double eps_r) {
    if (!(f0 > 0.0) || !std::isfinite(f0)) throw DomainError("design frequency must be positive and finite");
    if (!(eps_r >= 1.0) || !std::isfinite(eps_r)) throw DomainError("relative permittivity must be >= 1");
}

}  // namespace

double guided_wavelength(double f0, double eps_r) {
    check_domain(f0, eps_r);
    return kSpeedOfLight / (f0 * std::sqrt(eps_r));
}

double stub_length(double f0, double eps_r) {
    check_domain(f0, eps_r);
    return kSpeedOfLight / (4.0 * f0 * std::sqrt(eps_r));
}

StubSpec design_stub(double f0, double eps_r) { return {f0, eps_r, stub_length(f0, eps_r)}; }

double notch_center(double length, double eps_r) {
    if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("stub length must be positive and finite");
    if (!(eps_r >= 1.0) || !std::isfinite(eps_r)) throw DomainError("relative permittivity must be >= 1");
    return kSpeedOfLight / (4.0 * length * std::sqrt(eps_r));
}

SlotSpec slot_dimensions(double f0, double eps_r) {
    check_domain(f0, eps_r);
    const double eighth = kSpeedOfLight / (8.0 * f0 * std::sqrt(eps_r));
    return {f0, eps_r, 2.0 * eighth, eighth};
}

GapModel::GapModel(std::vector<GapPoint> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw DomainError("gap model needs at least two calibration points");
    for (std::size_t k = 0; k < points_.size(); ++k) {
        const auto& p = points_[k];
        if (!std::isfinite(p.gap_mm) || !std::isfinite(p.bw_ghz) || !std::isfinite(p.f_low_ghz) ||
            !std::isfinite(p.f_high_ghz))
            throw DomainError("gap model point " + std::to_string(k) + " has a non-finite value");
        if (k > 0 && !(p.gap_mm > points_[k - 1].gap_mm))
            throw DomainError("gap model gaps must be strictly increasing");
    }
}

GapModel GapModel::defaults() {
    return GapModel({
        {0.25, 1.0, 5.25, 6.25},
        {1.50, 2.6, 3.70, 6.30},
    });
}

GapModel GapModel::from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, std::string("gap model JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("points") || !j["points"].is_array())
        throw ParseError(0, "gap model JSON must be an object with a 'points' array");
    std::vector<GapPoint> pts;
    for (const auto& p : j["points"]) {
        auto num = [&](const char* key) {
            if (!p.is_object() || !p.contains(key) || !p[key].is_number())
                throw ParseError(0, std::string("gap model point is missing numeric '") + key + "'");
            return p[key].get<double>();
        };
        pts.push_back({num("gap_mm"), num("bw_ghz"), num("f_low_ghz"), num("f_high_ghz")});
    }
    return GapModel(std::move(pts));
}

GapPrediction GapModel::predict(double gap_mm) const {
    const double lo = points_.front().gap_mm, hi = points_.back().gap_mm;
    if (!(gap_mm >= lo && gap_mm <= hi))
        throw RangeError("gap " + std::to_string(gap_mm) + " mm outside calibrated span [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "] mm");
    auto it = std::lower_bound(points_.begin(), points_.end(), gap_mm,
                               [](const GapPoint& p, double g) { return p.gap_mm < g; });
    if (it->gap_mm == gap_mm) return {it->bw_ghz, it->f_low_ghz, it->f_high_ghz};
    const auto& a = *(it - 1);
    const auto& b = *it;
    const double t = (gap_mm - a.gap_mm) / (b.gap_mm - a.gap_mm);
    auto lerp = [t](double x, double y) { return x + t * (y - x); };
    return {lerp(a.bw_ghz, b.bw_ghz), lerp(a.f_low_ghz, b.f_low_ghz), lerp(a.f_high_ghz, b.f_high_ghz)};
}

}  // namespace mdk
