#include "mdk/synth.hpp"

#include <bit>
#include <cmath>

#include "mdk/error.hpp"

namespace mdk {

namespace {

// Symmetric +-1 pattern with zero diagonal whose spectral radius is 3 (the
// all-ones pattern has 7). With a real diagonal and +-90 deg coupling the
// matrix is normal, so sigma^2 = |S_ii|^2 + c^2 mu^2 over its eigenvalues mu.
// Leading principal submatrices keep the bound for fewer ports (interlacing).
constexpr int kSigns[8][8] = {
    {0, -1, 1, -1, -1, -1, 1, 1},  {-1, 0, 1, 1, 1, 1, 1, -1},  {1, 1, 0, 1, -1, -1, -1, -1},
    {-1, 1, 1, 0, -1, 1, -1, 1},   {-1, 1, -1, -1, 0, -1, 1, -1}, {-1, 1, -1, 1, -1, 0, 1, 1},
    {1, 1, -1, -1, 1, 1, 0, 1},    {1, -1, -1, 1, -1, 1, 1, 0},
};

}  // namespace

FarFieldPattern hertzian_dipole(const DipoleSpec& spec, const PatternGrid& grid) {
    const auto nt = static_cast<Eigen::Index>(grid.n_theta());
    const auto np = static_cast<Eigen::Index>(grid.n_phi());
    Eigen::MatrixXcd et = Eigen::MatrixXcd::Zero(nt, np);
    Eigen::MatrixXcd ep = Eigen::MatrixXcd::Zero(nt, np);
    for (Eigen::Index i = 0; i < nt; ++i) {
        const double th = grid.theta_deg()[static_cast<std::size_t>(i)];
        const double st = sin_deg(th), ct = cos_deg(th);
        for (Eigen::Index j = 0; j < np; ++j) {
            const double ph = grid.phi_deg()[static_cast<std::size_t>(j)];
            const double sp = sin_deg(ph), cp = cos_deg(ph);
            switch (spec.axis) {
                case DipoleAxis::Z: et(i, j) = st; break;
                case DipoleAxis::X: et(i, j) = ct * cp; ep(i, j) = -sp; break;
                case DipoleAxis::Y: et(i, j) = ct * sp; ep(i, j) = cp; break;
            }
        }
    }
    return FarFieldPattern(spec.freq, grid, std::move(et), std::move(ep));
}

void NotchModel::validate() const {
    if (!(f_min < f_center && f_center < f_max)) throw DomainError("notch model: need f_min < f_center < f_max");
    if (!(f_min > 0.0)) throw DomainError("notch model: f_min must be positive");
    if (!(bandwidth > 0.0)) throw DomainError("notch model: bandwidth must be positive");
    if (!(depth_db > kMatchThresholdDb)) throw DomainError("notch model: depth_db must exceed -10 dB");
    if (!(depth_db <= 0.0)) throw DomainError("notch model: depth_db must not exceed 0 dB");
    if (!std::isfinite(coupling_db) || !(coupling_db <= 0.0)) throw DomainError("notch model: coupling_db must be <= 0 dB");
}

double NotchModel::reflection(double f) const {
    const double floor = std::pow(10.0, kInBandReflectionDb / 20.0);
    const double x = 2.0 * (f - f_center) / bandwidth;
    if (std::abs(x) > 1.0) return floor;
    const double peak = std::pow(10.0, depth_db / 20.0);
    return std::max(floor, peak / std::sqrt(1.0 + x * x));
}

int coupling_sign(std::size_t i, std::size_t j) {
    if (i == j) return 0;
    if (i < 8 && j < 8) return kSigns[i][j];
    return (std::popcount((i + 1) & (j + 1)) % 2) ? -1 : 1;
}

NetworkData notched_monopole_sparams(const NotchModel& model, std::span<const double> freqs, std::size_t n_ports) {
    model.validate();
    if (n_ports < 1) throw DomainError("need at least one port");
    const double c = std::pow(10.0, model.coupling_db / 20.0);
    const auto n = static_cast<Eigen::Index>(n_ports);
    Eigen::MatrixXcd coupling = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) coupling(i, j) = cplx(0.0, c * coupling_sign(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));

    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(freqs.size());
    for (double f : freqs) {
        if (!(f > 0.0)) throw DomainError("frequencies must be positive");
        Eigen::MatrixXcd m = coupling;
        m.diagonal().setConstant(cplx(model.reflection(f), 0.0));
        mats.push_back(std::move(m));
    }
    return NetworkData(n_ports, 50.0, std::vector<double>(freqs.begin(), freqs.end()), std::move(mats));
}

std::vector<double> linear_sweep(double f_min, double f_max, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {f_min};
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = f_min + (f_max - f_min) * static_cast<double>(k) / static_cast<double>(n - 1);
    out.back() = f_max;
    return out;
}

}  // namespace mdk
