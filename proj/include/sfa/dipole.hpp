#pragma once

// Quasiclassical action, stationary-phase Hessian and the per-branch
// half-period harmonic dipole (prefactor Lambda reduced to its field parity).

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sfa/saddle.hpp"

namespace sfa {

/// S = int_{t0}^{t} [(p - A)^2 / 2 + Ip] dt' in closed form.
template <typename Real>
Complex<Real> action(const Complex<Real>& p, const Complex<Real>& t, const Complex<Real>& t0,
                     const BasicFieldParams<Real>& f) {
  const Complex<Real> span = t - t0;
  const Real w = f.omega;
  // int A = a1 (cos w t0 - cos w t) / w
  // int A^2 = a1^2 [span / 2 - (sin 2wt - sin 2wt0) / (4w)]
  // sin a - sin b = 2 cos((a+b)/2) sin((a-b)/2)
  const Complex<Real> sin2_diff = Real(2) * std::cos(w * (t + t0)) * std::sin(w * span);
  const Complex<Real> int_a = vector_potential_integral(f, t0, t);
  const Complex<Real> int_a2 = f.a1 * f.a1 * (span / Real(2) - sin2_diff / (Real(4) * w));
  return p * p * span / Real(2) - p * int_a + int_a2 / Real(2) + f.ip * span;
}

template <typename Real>
using Matrix3c = Eigen::Matrix<Complex<Real>, 3, 3>;

/// Second derivatives of S - Omega t with respect to (p_par, t, t0).
template <typename Real>
Matrix3c<Real> action_hessian(const Complex<Real>& p, const Complex<Real>& t, const Complex<Real>& t0,
                              const BasicFieldParams<Real>& f) {
  const Complex<Real> k0 = p - vector_potential(f, t0);
  const Complex<Real> k1 = p - vector_potential(f, t);
  Matrix3c<Real> m;
  m(0, 0) = t - t0;
  m(0, 1) = m(1, 0) = k1;
  m(0, 2) = m(2, 0) = -k0;
  m(1, 1) = -k1 * vector_potential_rate(f, t);
  m(2, 2) = k0 * vector_potential_rate(f, t0);
  m(1, 2) = m(2, 1) = Complex<Real>(0);
  return m;
}

/// Gradient of S - Omega t with respect to (p_par, t, t0); vanishes at a saddle.
template <typename Real>
Eigen::Matrix<Complex<Real>, 3, 1> action_gradient(const Complex<Real>& p, const Complex<Real>& t,
                                                   const Complex<Real>& t0, Real omega_h,
                                                   const BasicFieldParams<Real>& f) {
  const Complex<Real> k0 = p - vector_potential(f, t0);
  const Complex<Real> k1 = p - vector_potential(f, t);
  Eigen::Matrix<Complex<Real>, 3, 1> g;
  g(0) = p * (t - t0) - vector_potential_integral(f, t0, t);
  g(1) = k1 * k1 / Real(2) + f.ip - omega_h;
  g(2) = -(k0 * k0 / Real(2) + f.ip);
  return g;
}

cd action(const SaddlePoint& sp, const FieldParams& params);

/// Determinant of the full 5x5 Hessian: the 3x3 (p_par, t, t0) block times
/// (t - t0)^2 from the two transverse momenta. Throws DegenerateSaddleError
/// when |det| < 1e-30.
cd hessian_det(const SaddlePoint& sp, const FieldParams& params);

struct DipoleContribution {
  double omega_h = 0.0;
  int branch = 1;
  cd action;     // S at the saddle
  cd hessdet;    // 5x5 determinant
  cd prefactor;  // Lambda (i h^5 / det M)^(1/2), sign fixed by continuity
  cd amplitude;  // x_Omega with |Lambda| = 1
};

/// (h^5) with h = 2 pi in atomic units.
inline constexpr double planck_h5 = 9792.629913129004;  // (2 pi)^5

/// Stationary-phase half-period dipole
///   x = Lambda (i h^5 / det M)^(1/2) exp(i S - i Omega t),
/// evaluated at the decaying member (p*, t*, t0*) of the conjugate pair so
/// that |exp(i S - i Omega t)| <= 1. Lambda is the field-parity sign of the
/// half cycle containing Re(t0). `reference`, when given, fixes the sign of
/// the square root by phase continuity with a neighbouring amplitude.
DipoleContribution half_period_dipole(const SaddlePoint& sp, const FieldParams& params,
                                      const DipoleContribution* reference = nullptr);

/// Amplitudes along a trajectory, square-root branch fixed at the anchor
/// (principal root) and propagated outward by phase continuity.
std::vector<DipoleContribution> trajectory_dipole(const BranchTrajectory& traj);

/// exp(-i Omega T / 2); exactly -1 (+1) for odd (even) integer orders.
cd half_period_phase(double omega_h, const FieldParams& params);

/// 1 - exp(-i Omega T / 2); exactly 2 (0) for odd (even) integer orders.
cd half_period_bracket(double omega_h, const FieldParams& params);

/// Total one-color dipole from both half periods of a cycle.
cd total_dipole(std::span<const DipoleContribution> contribs, double omega_h, const FieldParams& params);

}  // namespace sfa
