#include "mdk/touchstone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mdk/error.hpp"
#include "text_util.hpp"

namespace mdk {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Options {
    FreqUnit unit = FreqUnit::GHz;
    DataFormat format = DataFormat::MA;
    double resistance = 50.0;
};

Options parse_option_line(std::string_view line, std::size_t lineno) {
    Options opt;
    auto toks = detail::split_ws(line.substr(1));
    for (std::size_t i = 0; i < toks.size(); ++i) {
        auto t = detail::lower(toks[i]);
        if (t == "hz") opt.unit = FreqUnit::Hz;
        else if (t == "khz") opt.unit = FreqUnit::kHz;
        else if (t == "mhz") opt.unit = FreqUnit::MHz;
        else if (t == "ghz") opt.unit = FreqUnit::GHz;
        else if (t == "ri") opt.format = DataFormat::RI;
        else if (t == "ma") opt.format = DataFormat::MA;
        else if (t == "db") opt.format = DataFormat::DB;
        else if (t == "s") continue;
        else if (t == "y" || t == "z" || t == "h" || t == "g")
            throw ParseError(lineno, "unsupported parameter type '" + std::string(toks[i]) + "' (only S)");
        else if (t == "r") {
            if (i + 1 >= toks.size()) throw ParseError(lineno, "option line: 'R' without a resistance");
            auto r = detail::parse_double(toks[++i]);
            if (!r || !(*r > 0.0) || !std::isfinite(*r))
                throw ParseError(lineno, "option line: invalid resistance '" + std::string(toks[i]) + "'");
            opt.resistance = *r;
        } else {
            throw ParseError(lineno, "malformed option line: unknown token '" + std::string(toks[i]) + "'");
        }
    }
    return opt;
}

cplx to_complex(double a, double b, DataFormat fmt) {
    switch (fmt) {
        case DataFormat::RI: return {a, b};
        case DataFormat::MA: return std::polar(a, b * kDeg);
        case DataFormat::DB: return std::polar(std::pow(10.0, a / 20.0), b * kDeg);
    }
    return {};
}

// Touchstone v1 stores 2-port data as S11 S21 S12 S22; every other N is row-major.
std::pair<std::size_t, std::size_t> entry_position(std::size_t idx, std::size_t n) {
    if (n == 2) {
        static constexpr std::pair<std::size_t, std::size_t> order[] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
        return order[idx];
    }
    return {idx / n, idx % n};
}

}  // namespace

double unit_scale(FreqUnit unit) noexcept {
    switch (unit) {
        case FreqUnit::Hz: return 1.0;
        case FreqUnit::kHz: return 1e3;
        case FreqUnit::MHz: return 1e6;
        case FreqUnit::GHz: return 1e9;
    }
    return 1.0;
}

NetworkData::NetworkData(std::size_t port_count, double ref_impedance, std::vector<double> freqs,
                         std::vector<Eigen::MatrixXcd> s)
    : ports_(port_count), z0_(ref_impedance), freqs_(std::move(freqs)), s_(std::move(s)) {
    if (ports_ < 1) throw DomainError("network needs at least one port");
    if (!(z0_ > 0.0) || !std::isfinite(z0_)) throw DomainError("reference impedance must be positive");
    if (freqs_.size() != s_.size()) throw DomainError("frequency and matrix counts differ");
    for (std::size_t k = 0; k < freqs_.size(); ++k) {
        if (!(freqs_[k] > 0.0) || !std::isfinite(freqs_[k])) throw DomainError("frequencies must be positive and finite");
        if (k > 0 && !(freqs_[k] > freqs_[k - 1])) throw DomainError("frequencies must be strictly increasing");
        const auto& m = s_[k];
        if (static_cast<std::size_t>(m.rows()) != ports_ || static_cast<std::size_t>(m.cols()) != ports_)
            throw DomainError("scattering matrix shape does not match port count");
        if (!m.allFinite()) throw DomainError("scattering matrix has a non-finite entry");
    }
}

NetworkData parse_touchstone(std::string_view text, std::size_t declared_ports) {
    if (declared_ports < 1) throw ParseError(0, "declared port count must be at least 1");
    const std::size_t n = declared_ports;
    const std::size_t record = 1 + 2 * n * n;

    Options opt;
    bool have_options = false;
    std::vector<double> freqs;
    std::vector<Eigen::MatrixXcd> mats;
    std::vector<double> pending;
    std::size_t record_line = 0;

    auto lines = detail::split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t lineno = li + 1;
        auto line = lines[li];
        if (auto bang = line.find('!'); bang != std::string_view::npos) line = line.substr(0, bang);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            throw ParseError(lineno, "Touchstone v2 keyword '" + std::string(line) +
                                         "' not supported (version 1 files only)");
        }
        if (line.front() == '#') {
            if (!have_options) {
                opt = parse_option_line(line, lineno);
                have_options = true;
            }
            continue;  // v1: later option lines are ignored
        }
        if (pending.empty()) record_line = lineno;
        for (auto tok : detail::split_ws(line)) {
            auto v = detail::parse_double(tok);
            if (!v) throw ParseError(lineno, "non-numeric token '" + std::string(tok) + "'");
            if (!std::isfinite(*v)) throw ParseError(lineno, "non-finite value '" + std::string(tok) + "'");
            pending.push_back(*v);
        }
        if (pending.size() > record)
            throw ParseError(lineno, "too many values for a " + std::to_string(n) + "-port record (expected " +
                                         std::to_string(record) + ")");
        if (pending.size() == record) {
            const double f = pending[0] * unit_scale(opt.unit);
            if (!(f > 0.0)) throw ParseError(record_line, "frequency must be positive");
            if (!freqs.empty() && !(f > freqs.back()))
                throw ParseError(record_line, "frequencies are not strictly increasing");
            Eigen::MatrixXcd m(n, n);
            for (std::size_t e = 0; e < n * n; ++e) {
                auto [r, c] = entry_position(e, n);
                m(r, c) = to_complex(pending[1 + 2 * e], pending[2 + 2 * e], opt.format);
            }
            if (!m.allFinite()) throw ParseError(record_line, "value overflows to a non-finite entry");
            freqs.push_back(f);
            mats.push_back(std::move(m));
            pending.clear();
        }
    }
    if (!pending.empty())
        throw ParseError(record_line, "incomplete record: " + std::to_string(pending.size()) + " values, expected " +
                                          std::to_string(record) + " per frequency");
    if (freqs.empty()) throw ParseError(0, "no network data found");
    return NetworkData(n, opt.resistance, std::move(freqs), std::move(mats));
}

std::size_t ports_from_filename(std::string_view path) {
    auto dot = path.rfind('.');
    if (dot == std::string_view::npos) return 0;
    auto ext = detail::lower(path.substr(dot + 1));
    if (ext.size() < 3 || ext.front() != 's' || ext.back() != 'p') return 0;
    std::size_t n = 0;
    for (std::size_t i = 1; i + 1 < ext.size(); ++i) {
        if (ext[i] < '0' || ext[i] > '9') return 0;
        n = n * 10 + static_cast<std::size_t>(ext[i] - '0');
    }
    return n;
}

std::string write_touchstone(const NetworkData& net, const TouchstoneWriteOptions& opts) {
    static constexpr const char* unit_names[] = {"Hz", "kHz", "MHz", "GHz"};
    static constexpr const char* fmt_names[] = {"RI", "MA", "DB"};
    const std::size_t n = net.port_count();
    const int p = opts.precision;

    std::ostringstream out;
    out << "! " << n << "-port S-parameters\n";
    out << "# " << unit_names[static_cast<int>(opts.unit)] << " S " << fmt_names[static_cast<int>(opts.format)]
        << " R " << detail::format_g(net.ref_impedance(), p) << '\n';

    const double scale = unit_scale(opts.unit);
    for (std::size_t k = 0; k < net.size(); ++k) {
        out << detail::format_g(net.freqs()[k] / scale, p);
        for (std::size_t e = 0; e < n * n; ++e) {
            auto [r, c] = entry_position(e, n);
            const cplx z = net.s(k)(r, c);
            double a = 0, b = 0;
            switch (opts.format) {
                case DataFormat::RI: a = z.real(); b = z.imag(); break;
                case DataFormat::MA: a = std::abs(z); b = std::arg(z) / kDeg; break;
                case DataFormat::DB: a = 20.0 * std::log10(std::abs(z)); b = std::arg(z) / kDeg; break;
            }
            // v1 wraps N >= 3 data at four complex values per line.
            if (n >= 3 && e > 0 && e % 4 == 0) out << '\n';
            out << ' ' << detail::format_g(a, p) << ' ' << detail::format_g(b, p);
        }
        out << '\n';
    }
    return out.str();
}

NetworkData resample(const NetworkData& net, std::span<const double> grid) {
    const auto& f = net.freqs();
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(grid.size());
    for (double g : grid) {
        if (!(g >= f.front() && g <= f.back()))
            throw RangeError("resample: " + detail::format_g(g, 12) + " Hz outside measured span [" +
                             detail::format_g(f.front(), 12) + ", " + detail::format_g(f.back(), 12) + "] Hz");
        auto hi = std::lower_bound(f.begin(), f.end(), g);
        auto k = static_cast<std::size_t>(hi - f.begin());
        if (*hi == g) {
            out.push_back(net.s(k));
            continue;
        }
        const double t = (g - f[k - 1]) / (f[k] - f[k - 1]);
        const auto& a = net.s(k - 1);
        const auto& b = net.s(k);
        Eigen::MatrixXcd m(a.rows(), a.cols());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            m(i) = cplx(a(i).real() + t * (b(i).real() - a(i).real()), a(i).imag() + t * (b(i).imag() - a(i).imag()));
        }
        out.push_back(std::move(m));
    }
    return NetworkData(net.port_count(), net.ref_impedance(), std::vector<double>(grid.begin(), grid.end()),
                       std::move(out));
}

std::vector<PassivityPoint> check_passivity(const NetworkData& net) {
    std::vector<PassivityPoint> out;
    out.reserve(net.size());
    for (std::size_t k = 0; k < net.size(); ++k) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(net.s(k));
        const double smax = svd.singularValues()(0);
        out.push_back({net.freqs()[k], smax, smax > 1.0 + kPassivityTolerance});
    }
    return out;
}

}  // namespace mdk
