#include "sfa/units.hpp"

#include <cmath>
#include <sstream>

#include "sfa/errors.hpp"

namespace sfa {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::config: return "config";
    case ErrorKind::range: return "range";
    case ErrorKind::no_solution: return "no_solution";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::branch_jump: return "branch_jump";
    case ErrorKind::homotopy: return "homotopy";
    case ErrorKind::degenerate: return "degenerate_saddle";
    case ErrorKind::nonlinearity: return "nonlinearity";
    case ErrorKind::validation: return "validation";
  }
  return "unknown";
}

namespace {

void require_finite_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    std::ostringstream os;
    os << name << " must be finite and non-negative (got " << value << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

FieldParams derive_field_params(const LaserConfig& config) {
  if (!std::isfinite(config.wavelength_nm) || config.wavelength_nm <= 0.0) {
    throw DomainError("wavelength_nm must be finite and positive");
  }
  require_finite_nonnegative(config.intensity_wcm2, "intensity_wcm2");
  require_finite_nonnegative(config.ip_ev, "ip_ev");
  require_finite_nonnegative(config.second_harmonic_ratio, "second_harmonic_ratio");
  if (!std::isfinite(config.phi)) throw DomainError("phi must be finite");

  const double wavelength_au = config.wavelength_nm / codata::bohr_nm;
  FieldParams f;
  f.omega = 2.0 * std::numbers::pi * codata::inverse_fine_structure / wavelength_au;
  f.period = 2.0 * std::numbers::pi / f.omega;
  const double e0 = std::sqrt(config.intensity_wcm2 / codata::au_intensity_wcm2);
  f.a1 = e0 / f.omega;
  f.up = f.a1 * f.a1 / 4.0;
  f.ip = ev_to_hartree(config.ip_ev);
  f.lambda2 = config.second_harmonic_ratio;
  f.phi = config.phi;
  return f;
}

LaserConfig to_laser_config(const FieldParams& params) {
  LaserConfig c;
  c.wavelength_nm = 2.0 * std::numbers::pi * codata::inverse_fine_structure / params.omega * codata::bohr_nm;
  const double e0 = params.a1 * params.omega;
  c.intensity_wcm2 = e0 * e0 * codata::au_intensity_wcm2;
  c.ip_ev = hartree_to_ev(params.ip);
  c.second_harmonic_ratio = params.lambda2;
  c.phi = params.phi;
  return c;
}

std::vector<std::string> validity_warnings(const LaserConfig& config) {
  std::vector<std::string> out;
  if (config.second_harmonic_ratio > 0.1) {
    out.push_back("second_harmonic_ratio > 0.1: outside the perturbative regime");
  }
  return out;
}

double keldysh(const FieldParams& params) {
  if (!(params.up > 0.0)) throw DomainError("Keldysh parameter undefined for zero ponderomotive energy");
  return std::sqrt(params.ip / (2.0 * params.up));
}

}  // namespace sfa
