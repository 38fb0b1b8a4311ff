#pragma once

#include "sfa/units.hpp"

namespace sfa::testing {

inline constexpr double argon_ev = 15.76;

inline FieldParams field(double wavelength_nm, double intensity, double ip_ev, double lambda2 = 0.0) {
  LaserConfig c;
  c.wavelength_nm = wavelength_nm;
  c.intensity_wcm2 = intensity;
  c.ip_ev = ip_ev;
  c.second_harmonic_ratio = lambda2;
  return derive_field_params(c);
}

/// Rule-of-thumb ponderomotive energy, Up[eV] = 9.33e-14 I[W/cm^2] lambda[um]^2.
inline double up_rule_of_thumb_ev(double intensity, double wavelength_nm) {
  const double um = wavelength_nm / 1000.0;
  return 9.33e-14 * intensity * um * um;
}

/// Photon energy from hc = 1239.84198 eV nm.
inline double photon_energy_ev(double wavelength_nm) { return 1239.84198 / wavelength_nm; }

}  // namespace sfa::testing
