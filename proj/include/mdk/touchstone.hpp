#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mdk {

using cplx = std::complex<double>;

/// Frequency-indexed N-port scattering matrices.
///
/// Immutable once built; the factory validates that frequencies are strictly
/// increasing and positive, that every matrix is port_count x port_count, and
/// that every entry is finite.
class NetworkData {
public:
    NetworkData(std::size_t port_count, double ref_impedance, std::vector<double> freqs,
                std::vector<Eigen::MatrixXcd> s);

    std::size_t port_count() const noexcept { return ports_; }
    double ref_impedance() const noexcept { return z0_; }
    std::size_t size() const noexcept { return freqs_.size(); }
    const std::vector<double>& freqs() const noexcept { return freqs_; }
    const std::vector<Eigen::MatrixXcd>& s() const noexcept { return s_; }
    const Eigen::MatrixXcd& s(std::size_t k) const { return s_.at(k); }

    /// 0-based port indices.
    cplx at(std::size_t k, std::size_t row, std::size_t col) const { return s_.at(k)(row, col); }

    friend bool operator==(const NetworkData&, const NetworkData&) = default;

private:
    std::size_t ports_;
    double z0_;
    std::vector<double> freqs_;
    std::vector<Eigen::MatrixXcd> s_;
};

enum class DataFormat { RI, MA, DB };
enum class FreqUnit { Hz, kHz, MHz, GHz };

double unit_scale(FreqUnit unit) noexcept;

/// Parse a Touchstone v1 file. `declared_ports` is the N of the `.sNp`
/// extension. Throws ParseError naming the offending line.
NetworkData parse_touchstone(std::string_view text, std::size_t declared_ports);

/// Port count from a `.sNp` file name, 0 when the name does not follow it.
std::size_t ports_from_filename(std::string_view path);

struct TouchstoneWriteOptions {
    DataFormat format = DataFormat::RI;
    FreqUnit unit = FreqUnit::GHz;
    int precision = 17;
};

std::string write_touchstone(const NetworkData& net, const TouchstoneWriteOptions& opts = {});

/// Linear interpolation of real and imaginary parts onto `grid`.
/// Throws RangeError for points outside the measured span.
NetworkData resample(const NetworkData& net, std::span<const double> grid);

struct PassivityPoint {
    double freq;
    double max_singular_value;
    bool flagged;
};

inline constexpr double kPassivityTolerance = 1e-6;

std::vector<PassivityPoint> check_passivity(const NetworkData& net);

}  // namespace mdk
