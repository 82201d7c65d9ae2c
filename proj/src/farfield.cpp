#include "mdk/farfield.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "mdk/error.hpp"
#include "text_util.hpp"

namespace mdk {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kAngleTol = 1e-9;

bool near(double a, double b) { return std::abs(a - b) <= kAngleTol * std::max(1.0, std::abs(b)); }

// First index whose spacing breaks the constant step, or size() when regular.
std::size_t first_irregular(const std::vector<double>& v) {
    if (v.size() < 3) return v.size();
    const double step = v[1] - v[0];
    for (std::size_t i = 2; i < v.size(); ++i) {
        if (!near(v[i] - v[i - 1], step)) return i;
    }
    return v.size();
}

std::size_t locate(const std::vector<double>& axis, double value, const char* name) {
    auto it = std::lower_bound(axis.begin(), axis.end(), value - kAngleTol);
    if (it != axis.end() && near(*it, value)) return static_cast<std::size_t>(it - axis.begin());
    throw DomainError(std::string(name) + " = " + detail::format_g(value, 12) + " deg is not on the pattern grid");
}

}  // namespace

double sin_deg(double deg) {
    if (deg == 0.0 || deg == 180.0 || deg == 360.0) return 0.0;
    if (deg == 90.0) return 1.0;
    if (deg == 270.0) return -1.0;
    return std::sin(deg * kDeg);
}

double cos_deg(double deg) {
    if (deg == 90.0 || deg == 270.0) return 0.0;
    if (deg == 0.0 || deg == 360.0) return 1.0;
    if (deg == 180.0) return -1.0;
    return std::cos(deg * kDeg);
}

PatternGrid::PatternGrid(std::vector<double> theta_deg, std::vector<double> phi_deg)
    : theta_(std::move(theta_deg)), phi_(std::move(phi_deg)) {
    if (theta_.size() < 2) throw DomainError("theta axis needs at least two samples");
    if (phi_.empty()) throw DomainError("phi axis is empty");
    if (theta_.front() != 0.0 || !near(theta_.back(), 180.0)) throw DomainError("theta axis must span [0, 180]");
    if (phi_.front() != 0.0) throw DomainError("phi axis must start at 0");
    for (std::size_t i = 1; i < theta_.size(); ++i)
        if (!(theta_[i] > theta_[i - 1])) throw DomainError("theta axis must be strictly increasing");
    for (std::size_t i = 1; i < phi_.size(); ++i)
        if (!(phi_[i] > phi_[i - 1])) throw DomainError("phi axis must be strictly increasing");
    if (first_irregular(theta_) != theta_.size()) throw DomainError("theta axis step is not constant");
    if (first_irregular(phi_) != phi_.size()) throw DomainError("phi axis step is not constant");
    if (phi_.size() > 1 && !near(phi_.back() + (phi_[1] - phi_[0]), 360.0))
        throw DomainError("phi axis must cover [0, 360) with the last sample one step below 360");
    theta_.back() = 180.0;
}

PatternGrid PatternGrid::regular(double theta_step_deg, double phi_step_deg) {
    if (!(theta_step_deg > 0.0) || !(phi_step_deg > 0.0)) throw DomainError("grid steps must be positive");
    const double nt = 180.0 / theta_step_deg;
    const double np = 360.0 / phi_step_deg;
    if (!near(nt, std::round(nt)) || !near(np, std::round(np)))
        throw DomainError("grid step must divide 180 (theta) and 360 (phi) evenly");
    const auto n_theta = static_cast<std::size_t>(std::lround(nt)) + 1;
    const auto n_phi = static_cast<std::size_t>(std::lround(np));
    std::vector<double> theta(n_theta), phi(n_phi);
    for (std::size_t i = 0; i < n_theta; ++i) theta[i] = 180.0 * static_cast<double>(i) / static_cast<double>(n_theta - 1);
    for (std::size_t j = 0; j < n_phi; ++j) phi[j] = 360.0 * static_cast<double>(j) / static_cast<double>(n_phi);
    return PatternGrid(std::move(theta), std::move(phi));
}

std::size_t PatternGrid::theta_index(double theta_deg) const { return locate(theta_, theta_deg, "theta"); }
std::size_t PatternGrid::phi_index(double phi_deg) const { return locate(phi_, phi_deg, "phi"); }

SphereQuadrature::SphereQuadrature(const PatternGrid& grid) {
    const double dtheta = grid.theta_step_deg() * kDeg;
    const double dphi = grid.phi_step_deg() * kDeg;
    const std::size_t nt = grid.n_theta();
    n_phi_ = grid.n_phi();
    row_w_.resize(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        const double end = (i == 0 || i + 1 == nt) ? 0.5 : 1.0;
        row_w_[i] = end * dtheta * dphi * sin_deg(grid.theta_deg()[i]);
    }
}

double SphereQuadrature::integrate(const Eigen::MatrixXd& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < row_w_.size(); ++i) sum += row_w_[i] * f.row(static_cast<Eigen::Index>(i)).sum();
    return sum;
}

double SphereQuadrature::total() const {
    double s = 0.0;
    for (double w : row_w_) s += w;
    return s * static_cast<double>(n_phi_);
}

FarFieldPattern::FarFieldPattern(double freq, PatternGrid grid, Eigen::MatrixXcd e_theta, Eigen::MatrixXcd e_phi)
    : freq_(freq), grid_(std::move(grid)), e_theta_(std::move(e_theta)), e_phi_(std::move(e_phi)) {
    if (!(freq_ > 0.0) || !std::isfinite(freq_)) throw DomainError("pattern frequency must be positive");
    const auto nt = static_cast<Eigen::Index>(grid_.n_theta());
    const auto np = static_cast<Eigen::Index>(grid_.n_phi());
    if (e_theta_.rows() != nt || e_theta_.cols() != np || e_phi_.rows() != nt || e_phi_.cols() != np)
        throw DomainError("field sample arrays do not match the grid shape");
    if (!e_theta_.allFinite() || !e_phi_.allFinite()) throw DomainError("field samples must be finite");
}

Eigen::MatrixXd FarFieldPattern::intensity() const { return e_theta_.cwiseAbs2() + e_phi_.cwiseAbs2(); }

PatternParseResult parse_pattern_csv(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    auto lines = detail::split_lines(text);
    if (lines.empty() || detail::trim(lines[0]) != kPatternCsvHeader)
        throw ParseError(1, "expected header '" + std::string(kPatternCsvHeader) + "'");

    struct Row {
        std::size_t line;
        double theta, phi;
        std::complex<double> et, ep;
    };
    struct Block {
        double freq;
        std::vector<Row> rows;
    };
    std::vector<Block> blocks;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::size_t lineno = li + 1;
        auto line = detail::trim(lines[li]);
        if (line.empty()) continue;
        auto fields = detail::split_char(line, ',');
        if (fields.size() != 7)
            throw ParseError(lineno, "expected 7 comma-separated fields, found " + std::to_string(fields.size()));
        double v[7];
        for (std::size_t k = 0; k < 7; ++k) {
            auto d = detail::parse_double(detail::trim(fields[k]));
            if (!d) throw ParseError(lineno, "non-numeric field '" + std::string(detail::trim(fields[k])) + "'");
            if (!std::isfinite(*d)) throw ParseError(lineno, "non-finite field");
            v[k] = *d;
        }
        if (!(v[0] > 0.0)) throw ParseError(lineno, "frequency must be positive");
        if (v[1] < 0.0 || v[1] > 180.0) throw ParseError(lineno, "theta out of range [0, 180]");
        if (v[2] < 0.0 || v[2] >= 360.0) throw ParseError(lineno, "phi out of range [0, 360)");
        if (blocks.empty() || blocks.back().freq != v[0]) {
            for (const auto& b : blocks)
                if (b.freq == v[0]) throw ParseError(lineno, "rows for this frequency are not contiguous");
            blocks.push_back({v[0], {}});
        }
        blocks.back().rows.push_back({lineno, v[1], v[2], {v[3], v[4]}, {v[5], v[6]}});
    }
    if (blocks.empty()) throw ParseError(0, "no pattern rows found");

    PatternParseResult result;
    for (const auto& b : blocks) {
        // Collect distinct axis values, remembering the row that introduced each.
        std::map<double, std::size_t> theta_first, phi_first;
        for (const auto& r : b.rows) {
            theta_first.emplace(r.theta, r.line);
            phi_first.emplace(r.phi, r.line);
        }
        std::vector<double> theta, phi;
        for (auto& [t, _] : theta_first) theta.push_back(t);
        for (auto& [p, _] : phi_first) phi.push_back(p);
        if (auto bad = first_irregular(theta); bad != theta.size())
            throw ParseError(theta_first[theta[bad]], "irregular theta step");
        if (auto bad = first_irregular(phi); bad != phi.size())
            throw ParseError(phi_first[phi[bad]], "irregular phi step");
        if (theta.size() < 2 || theta.front() != 0.0 || theta.back() != 180.0)
            throw ParseError(b.rows.front().line, "theta samples must span 0 to 180 inclusive");
        if (phi.front() != 0.0) throw ParseError(b.rows.front().line, "phi samples must start at 0");

        std::optional<PatternGrid> grid;
        try {
            grid.emplace(theta, phi);
        } catch (const DomainError& e) {
            throw ParseError(b.rows.front().line, e.what());
        }
        const auto nt = static_cast<Eigen::Index>(theta.size());
        const auto np = static_cast<Eigen::Index>(phi.size());
        Eigen::MatrixXcd et(nt, np), ep(nt, np);
        std::vector<std::size_t> seen(theta.size() * phi.size(), 0);
        for (const auto& r : b.rows) {
            auto i = grid->theta_index(r.theta);
            auto j = grid->phi_index(r.phi);
            auto& s = seen[i * phi.size() + j];
            if (s) throw ParseError(r.line, "duplicate sample (theta, phi) = (" + detail::format_g(r.theta, 12) + ", " +
                                                detail::format_g(r.phi, 12) + ") first given on line " +
                                                std::to_string(s));
            s = r.line;
            et(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.et;
            ep(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.ep;
        }
        for (std::size_t i = 0; i < theta.size(); ++i)
            for (std::size_t j = 0; j < phi.size(); ++j)
                if (!seen[i * phi.size() + j])
                    throw ParseError(b.rows.back().line, "missing grid point (theta, phi) = (" +
                                                             detail::format_g(theta[i], 12) + ", " +
                                                             detail::format_g(phi[j], 12) + ") in frequency block");
        if (grid->theta_step_deg() > kCoarseGridWarnDeg || grid->phi_step_deg() > kCoarseGridWarnDeg)
            result.warnings.push_back("pattern at " + detail::format_g(b.freq, 12) + " Hz uses a grid step above " +
                                      detail::format_g(kCoarseGridWarnDeg, 3) + " deg; metrics lose accuracy");
        result.patterns.emplace_back(b.freq, std::move(*grid), std::move(et), std::move(ep));
    }
    std::sort(result.patterns.begin(), result.patterns.end(),
              [](const FarFieldPattern& a, const FarFieldPattern& b) { return a.freq() < b.freq(); });
    return result;
}

std::string write_pattern_csv(const std::vector<FarFieldPattern>& patterns, int precision) {
    std::ostringstream out;
    out << kPatternCsvHeader << '\n';
    for (const auto& p : patterns) {
        const auto& g = p.grid();
        const std::string f = detail::format_g(p.freq(), precision);
        for (std::size_t i = 0; i < g.n_theta(); ++i) {
            for (std::size_t j = 0; j < g.n_phi(); ++j) {
                const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
                const auto et = p.e_theta()(ii, jj), ep = p.e_phi()(ii, jj);
                out << f << ',' << detail::format_g(g.theta_deg()[i], precision) << ','
                    << detail::format_g(g.phi_deg()[j], precision) << ',' << detail::format_g(et.real(), precision)
                    << ',' << detail::format_g(et.imag(), precision) << ',' << detail::format_g(ep.real(), precision)
                    << ',' << detail::format_g(ep.imag(), precision) << '\n';
            }
        }
    }
    return out.str();
}

double radiated_power(const FarFieldPattern& p) {
    return SphereQuadrature(p.grid()).integrate(p.intensity());
}

double directivity(const FarFieldPattern& p, double theta_deg, double phi_deg) {
    const auto i = static_cast<Eigen::Index>(p.grid().theta_index(theta_deg));
    const auto j = static_cast<Eigen::Index>(p.grid().phi_index(phi_deg));
    const double prad = radiated_power(p);
    if (!(prad > 0.0)) throw DegenerateError("pattern radiates no power");
    const double u = std::norm(p.e_theta()(i, j)) + std::norm(p.e_phi()(i, j));
    return 4.0 * std::numbers::pi * u / prad;
}

double max_directivity(const FarFieldPattern& p) {
    const double prad = radiated_power(p);
    if (!(prad > 0.0)) throw DegenerateError("pattern radiates no power");
    return 4.0 * std::numbers::pi * p.intensity().maxCoeff() / prad;
}

double peak_gain(const FarFieldPattern& p, double efficiency) {
    if (!(efficiency > 0.0 && efficiency <= 1.0)) throw DomainError("efficiency must lie in (0, 1]");
    return 10.0 * std::log10(efficiency * max_directivity(p));
}

}  // namespace mdk
