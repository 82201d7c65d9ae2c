#pragma once

#include <cstddef>
#include <span>

#include "mdk/farfield.hpp"
#include "mdk/touchstone.hpp"

namespace mdk {

enum class DipoleAxis { X, Y, Z };

struct DipoleSpec {
    DipoleAxis axis = DipoleAxis::Z;
    double freq = 1e9;
};

/// Ideal short dipole along `axis`, real-valued samples.
FarFieldPattern hertzian_dipole(const DipoleSpec& spec, const PatternGrid& grid);

/// Reflection level of the matched band.
inline constexpr double kInBandReflectionDb = -15.0;
/// Default coupling level between any two ports.
inline constexpr double kDefaultCouplingDb = -20.0;
/// Reflection level that counts as matched; notch depth must stay above it.
inline constexpr double kMatchThresholdDb = -10.0;

/// Band-notched multiport model.
///
/// Inside [f_center - bandwidth/2, f_center + bandwidth/2] the reflection follows a
/// Lorentzian |G| = A / sqrt(1 + x^2), x = 2 (f - f_center) / bandwidth, with
/// A = 10^(depth_db/20), so the half-power points sit on the band edges. Outside the
/// window, and wherever the Lorentzian falls below it, the reflection is the
/// in-band -15 dB level.
struct NotchModel {
    double f_center = 5.6e9;
    double bandwidth = 1.5e9;
    double depth_db = -1.0;
    double f_min = 2e9;
    double f_max = 12e9;
    double coupling_db = kDefaultCouplingDb;

    /// Throws DomainError on a violated invariant.
    void validate() const;
    /// |S_ii| at f.
    double reflection(double f) const;
};

/// Sign of the quadrature coupling between ports i and j (0-based, i != j).
int coupling_sign(std::size_t i, std::size_t j);

/// Synthetic reciprocal network: S_ii = reflection(f) (real), S_ij = j * sign(i, j) * 10^(coupling_db/20).
NetworkData notched_monopole_sparams(const NotchModel& model, std::span<const double> freqs, std::size_t n_ports);

/// n evenly spaced points over [f_min, f_max].
std::vector<double> linear_sweep(double f_min, double f_max, std::size_t n);

}  // namespace mdk
