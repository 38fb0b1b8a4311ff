#pragma once

// Slow reference computations that share no code path with the closed
// forms: contour quadrature, finite differences, grid scans and direct
// integration of the classical equations of motion. Used by `validate` and
// the test suites.

#include <functional>
#include <string>
#include <vector>

#include "sfa/twocolor.hpp"

namespace sfa::oracle {

/// Adaptive Gauss-Kronrod (7/15) integral of f over the straight segment a -> b.
cd contour_integral(const std::function<cd(cd)>& f, cd a, cd b, double rel_tol = 1e-13, double abs_tol = 1e-300);

/// Action integrand (p - A)^2 / 2 + Ip integrated from t0 to t.
cd action_by_quadrature(const SaddlePoint& sp, const FieldParams& params);

/// -lambda int (p - a1 sin w t') a1 sin(2 w t' + phi) dt' from t0 to t.
cd sigma_by_quadrature(const SaddlePoint& sp, double phi, const FieldParams& params);

/// Hessian of S - Omega t in (p, t, t0) by central differences of the gradient.
Matrix3c<double> hessian_by_differences(const SaddlePoint& sp, const FieldParams& params, double h = 1e-6);

/// dS/dt at fixed (p, t0) by central differences.
cd action_time_derivative(const SaddlePoint& sp, const FieldParams& params, double h = 1e-6);

/// argmax of |sigma(phi)|^2 over `samples` evenly spaced phases in [0, pi).
double phi0_by_scan(const SigmaCoefficients& coeffs, int samples = 10000);

struct ClassicalPeak {
  double energy_over_up = 0.0;
  double launch_phase = 0.0;  // w t0, rad
  double return_phase = 0.0;  // w t, rad
};

/// Brute-force scan of launch phases in (0, pi/2) with RK4 integration of the
/// free-electron trajectory (zero initial velocity), first return to x = 0.
ClassicalPeak classical_peak(const FieldParams& params, int phases = 2000, int steps_per_cycle = 4000);

struct Check {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  bool passed() const { return max_error < tolerance; }
};

struct ValidationOptions {
  int random_saddles = 20;
  unsigned seed = 20130101;
};

/// The oracle suite on one configuration: action, sigma and Hessian
/// against their references at random plateau saddles, phi0 against a grid
/// scan, the dS/dt identity, residuals of every traced point and the
/// classical cutoff.
std::vector<Check> validate(const FieldParams& params, const ValidationOptions& options = {});

}  // namespace sfa::oracle
