#include "sfa/dipole.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sfa/errors.hpp"

namespace sfa {

namespace {

constexpr cd I{0.0, 1.0};

/// Field-parity sign of the prefactor: +1 for the half cycle that contains
/// the base saddles (Re t0 near (0, T/4)), alternating every T/2.
double field_parity(const cd& t0, const FieldParams& f) {
  const double k = std::round((t0.real() - f.period / 8.0) / (f.period / 2.0));
  return std::fmod(std::abs(k), 2.0) == 0.0 ? 1.0 : -1.0;
}

}  // namespace

cd action(const SaddlePoint& sp, const FieldParams& params) { return action(sp.p, sp.t, sp.t0, params); }

cd hessian_det(const SaddlePoint& sp, const FieldParams& params) {
  const cd span = sp.t - sp.t0;
  const cd det = action_hessian(sp.p, sp.t, sp.t0, params).determinant() * span * span;
  if (std::abs(det) < 1e-30) {
    std::ostringstream os;
    os << "degenerate saddle at order " << sp.omega_h / params.omega << " (|det M| = " << std::abs(det) << ")";
    throw DegenerateSaddleError(os.str());
  }
  return det;
}

DipoleContribution half_period_dipole(const SaddlePoint& sp, const FieldParams& params,
                                      const DipoleContribution* reference) {
  DipoleContribution c;
  c.omega_h = sp.omega_h;
  c.branch = sp.branch;
  c.action = action(sp, params);
  c.hessdet = hessian_det(sp, params);

  // Decaying member of the conjugate pair.
  const cd s_bar = std::conj(c.action);
  const cd det_bar = std::conj(c.hessdet);
  const cd t_bar = std::conj(sp.t);

  c.prefactor = field_parity(sp.t0, params) * std::sqrt(I * planck_h5 / det_bar);
  if (reference != nullptr && std::abs(std::arg(c.prefactor / reference->prefactor)) > std::numbers::pi / 2) {
    c.prefactor = -c.prefactor;
  }
  c.amplitude = c.prefactor * std::exp(I * s_bar - I * sp.omega_h * t_bar);
  return c;
}

std::vector<DipoleContribution> trajectory_dipole(const BranchTrajectory& traj) {
  const auto& pts = traj.points;
  std::vector<DipoleContribution> out(pts.size());
  if (pts.empty()) return out;
  const std::size_t ia = traj.nearest_index(anchor_frequency(traj.params));
  out[ia] = half_period_dipole(pts[ia], traj.params);
  for (std::size_t i = ia + 1; i < pts.size(); ++i) out[i] = half_period_dipole(pts[i], traj.params, &out[i - 1]);
  for (std::size_t i = ia; i-- > 0;) out[i] = half_period_dipole(pts[i], traj.params, &out[i + 1]);
  return out;
}

cd half_period_phase(double omega_h, const FieldParams& params) {
  const double order = omega_h / params.omega;
  const double nearest = std::round(order);
  if (std::abs(order - nearest) < 1e-9) {
    return std::fmod(std::abs(nearest), 2.0) == 1.0 ? cd(-1.0) : cd(1.0);
  }
  return std::exp(-I * std::numbers::pi * order);
}

cd half_period_bracket(double omega_h, const FieldParams& params) {
  return 1.0 - half_period_phase(omega_h, params);
}

cd total_dipole(std::span<const DipoleContribution> contribs, double omega_h, const FieldParams& params) {
  cd sum = 0.0;
  for (const auto& c : contribs) sum += c.amplitude;
  return sum * half_period_bracket(omega_h, params);
}

}  // namespace sfa
