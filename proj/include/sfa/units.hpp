#pragma once

// Laser/atom inputs in laboratory units and the derived atomic-unit field.
// Everything downstream of derive_field_params works in atomic units
// (hbar = m = e = 1).

#include <numbers>
#include <string>
#include <vector>

namespace sfa {

/// CODATA 2018 values.
namespace codata {
inline constexpr double hartree_ev = 27.211386245988;
inline constexpr double bohr_nm = 0.0529177210903;
inline constexpr double inverse_fine_structure = 137.035999084;  // c in a.u.
inline constexpr double au_time_s = 2.4188843265857e-17;
/// Cycle-averaged intensity of a linearly polarized field with peak
/// amplitude of one atomic unit of electric field, W/cm^2.
inline constexpr double au_intensity_wcm2 = 3.50944758e16;
}  // namespace codata

struct LaserConfig {
  double wavelength_nm = 800.0;
  double intensity_wcm2 = 0.0;
  double ip_ev = 0.0;
  double second_harmonic_ratio = 0.0;  // A2/A1 perturbation parameter
  double phi = 0.0;                    // relative phase of the 2w field, rad
};

/// Monochromatic field A(t) = a1 sin(omega t) plus the perturbative second
/// harmonic lambda2 * a1 sin(2 omega t + phi). Templated on the real scalar
/// so closed forms can be cross-checked in extended precision.
template <typename Real>
struct BasicFieldParams {
  Real omega{};
  Real a1{};
  Real lambda2{};
  Real phi{};
  Real up{};
  Real ip{};
  Real period{};

  Real photon_energy() const { return omega; }
  Real nominal_cutoff() const { return Real(1.3) * ip + Real(3.2) * up; }

  template <typename Other>
  BasicFieldParams<Other> cast() const {
    return {Other(omega), Other(a1), Other(lambda2), Other(phi), Other(up), Other(ip), Other(period)};
  }
};

using FieldParams = BasicFieldParams<double>;

/// Throws DomainError for non-finite or negative inputs.
FieldParams derive_field_params(const LaserConfig& config);

/// Inverse of derive_field_params.
LaserConfig to_laser_config(const FieldParams& params);

/// Non-fatal validity notes (e.g. second harmonic too strong for the
/// perturbative treatment).
std::vector<std::string> validity_warnings(const LaserConfig& config);

/// sqrt(Ip / 2Up). Throws DomainError when up == 0.
double keldysh(const FieldParams& params);

inline double ev_to_hartree(double ev) { return ev / codata::hartree_ev; }
inline double hartree_to_ev(double h) { return h * codata::hartree_ev; }

}  // namespace sfa
