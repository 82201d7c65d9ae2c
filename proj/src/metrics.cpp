#include "mdk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "mdk/error.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace mdk {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

void check_pair(const NetworkData& net, std::size_t i, std::size_t j) {
    if (!(i >= 1 && i < j && j <= net.port_count()))
        throw DomainError("port pair (" + std::to_string(i) + ", " + std::to_string(j) + ") must satisfy 1 <= i < j <= " +
                          std::to_string(net.port_count()));
}

MetricSeries make_series(MetricId id, const NetworkData& net) {
    MetricSeries s{id, net.freqs(), std::vector<double>(net.size(), 0.0), std::vector<bool>(net.size(), false), {}};
    return s;
}

double rounded(double v) {
    auto txt = detail::format_g(v, kOutputDigits);
    return std::strtod(txt.c_str(), nullptr);
}

void check_same_grid(const FarFieldPattern& a, const FarFieldPattern& b) {
    if (!(a.grid() == b.grid())) throw DomainError("patterns are sampled on different grids");
    if (a.freq() != b.freq()) throw DomainError("patterns are at different frequencies");
}

}  // namespace

// ---------------------------------------------------------------------------
// Environment

Environment Environment::uniform(double xpr_db) {
    Environment e;
    e.kind = EnvironmentKind::Uniform;
    e.xpr_db = xpr_db;
    return e;
}

Environment Environment::gaussian(double xpr_db, double m_v, double m_h, double sigma_v, double sigma_h) {
    Environment e{EnvironmentKind::Gaussian, xpr_db, m_v, m_h, sigma_v, sigma_h};
    e.validate();
    return e;
}

Environment Environment::indoor() { return gaussian(5.0); }
Environment Environment::outdoor() { return gaussian(1.0); }

Environment Environment::preset(std::string_view name) {
    if (name == "uniform") return uniform();
    if (name == "indoor") return indoor();
    if (name == "outdoor") return outdoor();
    if (name == "gaussian") return gaussian(0.0);
    throw DomainError("unknown environment '" + std::string(name) + "' (uniform, indoor, outdoor, gaussian)");
}

double Environment::xpr_linear() const { return std::pow(10.0, xpr_db / 10.0); }

void Environment::validate() const {
    if (!std::isfinite(xpr_db)) throw DomainError("environment XPR must be finite");
    if (kind == EnvironmentKind::Gaussian) {
        if (!(sigma_v > 0.0) || !(sigma_h > 0.0)) throw DomainError("gaussian environment spreads must be positive");
        if (!std::isfinite(m_v) || !std::isfinite(m_h)) throw DomainError("gaussian environment means must be finite");
    }
}

std::string Environment::describe() const {
    std::ostringstream o;
    if (kind == EnvironmentKind::Uniform) {
        o << "uniform xpr_db=" << detail::format_g(xpr_db, kOutputDigits);
    } else {
        o << "gaussian xpr_db=" << detail::format_g(xpr_db, kOutputDigits) << " m_v=" << detail::format_g(m_v, 6)
          << " m_h=" << detail::format_g(m_h, 6) << " sigma_v=" << detail::format_g(sigma_v, 6)
          << " sigma_h=" << detail::format_g(sigma_h, 6);
    }
    return o.str();
}

AngularDensity angular_density(const Environment& env, const PatternGrid& grid) {
    env.validate();
    const SphereQuadrature quad(grid);
    const std::size_t nt = grid.n_theta();
    auto profile = [&](double m, double sigma) {
        std::vector<double> p(nt, 1.0);
        if (env.kind == EnvironmentKind::Gaussian) {
            const double centre = 90.0 - m;
            for (std::size_t i = 0; i < nt; ++i) {
                const double d = grid.theta_deg()[i] - centre;
                p[i] = std::exp(-d * d / (2.0 * sigma * sigma));
            }
        }
        double total = 0.0;
        for (std::size_t i = 0; i < nt; ++i) total += p[i] * quad.row_weight(i);
        total *= static_cast<double>(grid.n_phi());
        if (!(total > 0.0)) throw DomainError("environment density vanishes on this grid");
        for (auto& v : p) v /= total;
        return p;
    };
    return {profile(env.m_v, env.sigma_v), profile(env.m_h, env.sigma_h)};
}

// ---------------------------------------------------------------------------
// Series

std::string_view metric_name(MetricId id) {
    switch (id) {
        case MetricId::EccFarField: return "ecc_ff";
        case MetricId::EccSParams: return "ecc_sp";
        case MetricId::TarcDb: return "tarc_db";
        case MetricId::CclBits: return "ccl_bits";
        case MetricId::MegDb: return "meg_db";
        case MetricId::MegRatio: return "meg_ratio";
        case MetricId::SDb: return "s_db";
    }
    return "unknown";
}

bool MetricSeries::any_unreliable() const { return std::find(unreliable.begin(), unreliable.end(), true) != unreliable.end(); }

void MetricSeries::validate() const {
    if (freqs.size() != values.size() || unreliable.size() != values.size())
        throw DomainError("metric series: frequency and value counts differ");
    for (std::size_t k = 1; k < freqs.size(); ++k)
        if (!(freqs[k] > freqs[k - 1])) throw DomainError("metric series: frequencies must be strictly increasing");
}

std::string to_csv(const MetricSeries& s) {
    std::string out = "freq_hz,value\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
        out += detail::format_g(s.freqs[k], kOutputDigits);
        out += ',';
        out += detail::format_g(s.values[k], kOutputDigits);
        out += '\n';
    }
    return out;
}

std::string to_json(const MetricSeries& s) {
    nlohmann::ordered_json j;
    j["metric_id"] = metric_name(s.metric_id);
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.meta) j["meta"][k] = v;
    auto points = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < s.size(); ++k) {
        nlohmann::ordered_json p;
        p["freq_hz"] = rounded(s.freqs[k]);
        p["value"] = rounded(s.values[k]);
        if (s.unreliable[k]) p["unreliable"] = true;
        points.push_back(std::move(p));
    }
    j["points"] = std::move(points);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Far-field metrics

double ecc_farfield(const FarFieldPattern& a, const FarFieldPattern& b, const Environment& env) {
    check_same_grid(a, b);
    const auto& grid = a.grid();
    const SphereQuadrature quad(grid);
    const auto dens = angular_density(env, grid);
    const double xpr = env.xpr_linear();

    cplx f12 = 0.0;
    double f11 = 0.0, f22 = 0.0;
    for (std::size_t i = 0; i < grid.n_theta(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double wt = quad.row_weight(i) * xpr * dens.p_theta[i];
        const double wp = quad.row_weight(i) * dens.p_phi[i];
        const auto ta = a.e_theta().row(ii), tb = b.e_theta().row(ii);
        const auto pa = a.e_phi().row(ii), pb = b.e_phi().row(ii);
        f12 += wt * ta.cwiseProduct(tb.conjugate()).sum() + wp * pa.cwiseProduct(pb.conjugate()).sum();
        f11 += wt * ta.cwiseAbs2().sum() + wp * pa.cwiseAbs2().sum();
        f22 += wt * tb.cwiseAbs2().sum() + wp * pb.cwiseAbs2().sum();
    }
    if (!(f11 > 0.0) || !(f22 > 0.0))
        throw DegenerateError("pattern has no power in the environment's weighting");
    return std::clamp(std::norm(f12) / (f11 * f22), 0.0, 1.0);
}

double meg(const FarFieldPattern& p, const Environment& env) {
    const double prad = radiated_power(p);
    if (!(prad > 0.0)) throw DegenerateError("pattern radiates no power");
    const auto& grid = p.grid();
    const SphereQuadrature quad(grid);
    const auto dens = angular_density(env, grid);
    const double xpr = env.xpr_linear();
    const double kt = xpr / (1.0 + xpr), kp = 1.0 / (1.0 + xpr);

    double sum = 0.0;
    for (std::size_t i = 0; i < grid.n_theta(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        sum += quad.row_weight(i) * (kt * dens.p_theta[i] * p.e_theta().row(ii).cwiseAbs2().sum() +
                                     kp * dens.p_phi[i] * p.e_phi().row(ii).cwiseAbs2().sum());
    }
    return kFourPi * sum / prad;
}

double meg_ratio(const FarFieldPattern& a, const FarFieldPattern& b, const Environment& env) {
    if (a.freq() != b.freq()) throw DomainError("patterns are at different frequencies");
    const double mb = meg(b, env);
    if (!(mb > 0.0)) throw DegenerateError("second pattern has zero mean effective gain");
    return meg(a, env) / mb;
}

// ---------------------------------------------------------------------------
// S-parameter metrics

MetricSeries s_db(const NetworkData& net, std::size_t i, std::size_t j) {
    if (i < 1 || j < 1 || i > net.port_count() || j > net.port_count())
        throw DomainError("port index out of range");
    auto s = make_series(MetricId::SDb, net);
    s.meta["param"] = "S" + std::to_string(i) + "," + std::to_string(j);
    for (std::size_t k = 0; k < net.size(); ++k) {
        const double mag = std::abs(net.at(k, i - 1, j - 1));
        s.values[k] = mag > 0.0 ? std::max(kTarcFloorDb, 20.0 * std::log10(mag)) : kTarcFloorDb;
    }
    return s;
}

MetricSeries ecc_sparams(const NetworkData& net, std::size_t i, std::size_t j, unsigned jobs) {
    check_pair(net, i, j);
    auto s = make_series(MetricId::EccSParams, net);
    s.meta["pair"] = std::to_string(i) + "," + std::to_string(j);
    const std::size_t a = i - 1, b = j - 1;
    std::vector<char> flag(net.size(), 0);
    detail::parallel_for(net.size(), jobs, [&](std::size_t k) {
        const cplx sii = net.at(k, a, a), sij = net.at(k, a, b), sji = net.at(k, b, a), sjj = net.at(k, b, b);
        const double num = std::norm(std::conj(sii) * sij + std::conj(sji) * sjj);
        double den = (1.0 - std::norm(sii) - std::norm(sji)) * (1.0 - std::norm(sjj) - std::norm(sij));
        if (den <= kEccDenominatorFloor) {
            den = kEccDenominatorFloor;
            flag[k] = 1;
        }
        s.values[k] = num / den;
    });
    for (std::size_t k = 0; k < net.size(); ++k) s.unreliable[k] = flag[k] != 0;
    return s;
}

double tarc_db_at(const Eigen::MatrixXcd& s, const std::vector<double>& phases_all) {
    const auto n = s.rows();
    Eigen::VectorXcd a(n);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index k = 0; k < n; ++k) a(k) = std::polar(amp, phases_all[static_cast<std::size_t>(k)]);
    const double ratio = (s * a).norm() / a.norm();
    if (!(ratio > 0.0)) return kTarcFloorDb;
    return std::max(kTarcFloorDb, 20.0 * std::log10(ratio));
}

MetricSeries tarc(const NetworkData& net, const std::vector<double>& phases, unsigned jobs) {
    const std::size_t n = net.port_count();
    if (phases.size() != n - 1)
        throw DomainError("tarc needs " + std::to_string(n - 1) + " phases (ports 2.." + std::to_string(n) + ")");
    std::vector<double> all(n, 0.0);
    std::copy(phases.begin(), phases.end(), all.begin() + 1);
    auto s = make_series(MetricId::TarcDb, net);
    std::ostringstream desc;
    for (std::size_t k = 0; k < all.size(); ++k) desc << (k ? "," : "") << detail::format_g(all[k], kOutputDigits);
    s.meta["phases_rad"] = desc.str();
    detail::parallel_for(net.size(), jobs, [&](std::size_t k) { s.values[k] = tarc_db_at(net.s(k), all); });
    return s;
}

MetricSeries tarc_envelope(const NetworkData& net, std::size_t n_phase_samples, unsigned jobs) {
    if (n_phase_samples < 2) throw DomainError("tarc envelope needs at least 2 phase samples");
    const std::size_t n = net.port_count();
    const std::size_t free = n - 1;
    const std::size_t q = n_phase_samples;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(q);
    const bool factorial = n <= 4;

    std::size_t count = 1;
    if (factorial) {
        for (std::size_t k = 0; k < free; ++k) count *= q;
    } else {
        count = q * q * q;
    }

    auto s = make_series(MetricId::TarcDb, net);
    s.meta["mode"] = factorial ? "factorial" : "monte_carlo";
    s.meta["phase_samples"] = std::to_string(q);
    s.meta["excitations"] = std::to_string(count);
    if (!factorial) s.meta["seed"] = "0x5EED";

    detail::parallel_for(net.size(), jobs, [&](std::size_t k) {
        std::vector<double> ph(n, 0.0);
        double worst = kTarcFloorDb;
        if (factorial) {
            for (std::size_t c = 0; c < count; ++c) {
                std::size_t r = c;
                for (std::size_t p = 1; p < n; ++p) {
                    ph[p] = step * static_cast<double>(r % q);
                    r /= q;
                }
                worst = std::max(worst, tarc_db_at(net.s(k), ph));
            }
        } else {
            // One substream per frequency index keeps results independent of scheduling.
            std::seed_seq seq{static_cast<std::uint32_t>(kTarcSeed), static_cast<std::uint32_t>(kTarcSeed >> 32),
                              static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
            std::mt19937_64 rng(seq);
            for (std::size_t c = 0; c < count; ++c) {
                for (std::size_t p = 1; p < n; ++p) ph[p] = step * static_cast<double>(rng() % q);
                worst = std::max(worst, tarc_db_at(net.s(k), ph));
            }
        }
        s.values[k] = worst;
    });
    return s;
}

MetricSeries ccl_pair(const NetworkData& net, std::size_t i, std::size_t j, unsigned jobs) {
    check_pair(net, i, j);
    auto s = make_series(MetricId::CclBits, net);
    s.meta["pair"] = std::to_string(i) + "," + std::to_string(j);
    const std::size_t a = i - 1, b = j - 1;
    std::vector<char> flag(net.size(), 0);
    detail::parallel_for(net.size(), jobs, [&](std::size_t k) {
        const cplx sii = net.at(k, a, a), sij = net.at(k, a, b), sji = net.at(k, b, a), sjj = net.at(k, b, b);
        const cplx p11 = 1.0 - (std::norm(sii) + std::norm(sij));
        const cplx p22 = 1.0 - (std::norm(sjj) + std::norm(sji));
        const cplx p12 = -(std::conj(sii) * sij + std::conj(sji) * sjj);
        const cplx p21 = -(std::conj(sjj) * sji + std::conj(sij) * sii);
        double det = (p11 * p22 - p12 * p21).real();
        if (det <= kCclDetClamp) {
            det = kCclDetClamp;
            flag[k] = 1;
        }
        s.values[k] = -std::log2(det);
    });
    for (std::size_t k = 0; k < net.size(); ++k) s.unreliable[k] = flag[k] != 0;
    return s;
}

// ---------------------------------------------------------------------------
// Notch detection

std::vector<NotchBand> detect_notch(const MetricSeries& series, double threshold_db) {
    if (series.metric_id != MetricId::SDb) throw DomainError("notch detection needs an s_db series");
    if (series.size() == 0) throw DomainError("notch detection on an empty series");
    series.validate();
    const auto& f = series.freqs;
    const auto& v = series.values;
    const std::size_t n = v.size();

    auto crossing = [&](std::size_t lo, std::size_t hi) {
        const double t = (threshold_db - v[lo]) / (v[hi] - v[lo]);
        return f[lo] + t * (f[hi] - f[lo]);
    };

    std::vector<NotchBand> bands;
    std::size_t k = 0;
    while (k < n) {
        if (!(v[k] > threshold_db)) {
            ++k;
            continue;
        }
        const std::size_t start = k;
        while (k < n && v[k] > threshold_db) ++k;
        const std::size_t end = k - 1;
        NotchBand b{};
        b.f_low = start == 0 ? f[0] : crossing(start - 1, start);
        b.f_high = end + 1 == n ? f[end] : crossing(end, end + 1);
        std::size_t peak = start;
        for (std::size_t m = start; m <= end; ++m)
            if (v[m] > v[peak]) peak = m;
        b.center = f[peak];
        b.worst_level_db = v[peak];
        if (!(b.f_high > b.f_low)) continue;  // one-sample series: no band width to report
        bands.push_back(b);
    }
    return bands;
}

std::vector<NotchBand> merge_notches(std::vector<NotchBand> bands) {
    std::sort(bands.begin(), bands.end(), [](const NotchBand& a, const NotchBand& b) { return a.f_low < b.f_low; });
    std::vector<NotchBand> out;
    for (const auto& b : bands) {
        if (!out.empty() && b.f_low <= out.back().f_high) {
            auto& m = out.back();
            m.f_high = std::max(m.f_high, b.f_high);
            if (b.worst_level_db > m.worst_level_db) {
                m.worst_level_db = b.worst_level_db;
                m.center = b.center;
            }
        } else {
            out.push_back(b);
        }
    }
    return out;
}

}  // namespace mdk
