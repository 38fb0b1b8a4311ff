#pragma once

// Complex stationary points of S - Omega t for the one-color field
// A(t) = a1 sin(omega t), and their continuation along Omega.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "sfa/units.hpp"

namespace sfa {

template <typename Real>
using Complex = std::complex<Real>;

using cd = std::complex<double>;

// --- closed-form field kernels, valid for complex time -------------------

template <typename Real>
Complex<Real> vector_potential(const BasicFieldParams<Real>& f, const Complex<Real>& t) {
  return f.a1 * std::sin(f.omega * t);
}

template <typename Real>
Complex<Real> vector_potential_rate(const BasicFieldParams<Real>& f, const Complex<Real>& t) {
  return f.a1 * f.omega * std::cos(f.omega * t);
}

/// Primitive of A: -a1 cos(omega t) / omega.
template <typename Real>
Complex<Real> vector_potential_primitive(const BasicFieldParams<Real>& f, const Complex<Real>& t) {
  return -f.a1 * std::cos(f.omega * t) / f.omega;
}

/// Integral of A over [t0, t] in closed form, written as a product so it
/// stays accurate when t is close to t0.
template <typename Real>
Complex<Real> vector_potential_integral(const BasicFieldParams<Real>& f, const Complex<Real>& t0,
                                        const Complex<Real>& t) {
  // cos(a) - cos(b) = -2 sin((a+b)/2) sin((a-b)/2)
  const Complex<Real> half_sum = f.omega * (t + t0) / Real(2);
  const Complex<Real> half_diff = f.omega * (t - t0) / Real(2);
  return Real(2) * f.a1 / f.omega * std::sin(half_sum) * std::sin(half_diff);
}

/// Drift momentum fixed by the return condition (p eliminated exactly).
template <typename Real>
Complex<Real> drift_momentum(const BasicFieldParams<Real>& f, const Complex<Real>& t0, const Complex<Real>& t) {
  return vector_potential_integral(f, t0, t) / (t - t0);
}

template <typename Real>
struct BasicResidual {
  Complex<Real> r1;  // return:     int A - (t - t0) p
  Complex<Real> r2;  // tunneling:  (p - A(t0))^2 / 2 + Ip
  Complex<Real> r3;  // energy:     (p - A(t))^2 / 2 - (Omega - Ip)
  Real norm() const { return std::sqrt(std::norm(r1) + std::norm(r2) + std::norm(r3)); }
};

using Residual = BasicResidual<double>;

template <typename Real>
BasicResidual<Real> residual(const Complex<Real>& p, const Complex<Real>& t, const Complex<Real>& t0, Real omega_h,
                             const BasicFieldParams<Real>& f) {
  const Complex<Real> k0 = p - vector_potential(f, t0);
  const Complex<Real> k1 = p - vector_potential(f, t);
  return {vector_potential_integral(f, t0, t) - (t - t0) * p, k0 * k0 / Real(2) + f.ip,
          k1 * k1 / Real(2) - (omega_h - f.ip)};
}

// --- saddle points ----------------------------------------------------------

struct SaddlePoint {
  double omega_h = 0.0;
  cd p;
  cd t;
  cd t0;
  int branch = 1;  // 1 short, 2 long
  double residual_norm = 0.0;
  bool physical = true;
  int iterations = 0;
};

struct SaddleGuess {
  cd p;  // ignored by the reduced solver, kept for symmetry with SaddlePoint
  cd t;
  cd t0;
  int branch = 1;
};

struct SolveOptions {
  double tolerance = 1e-12;
  int max_iterations = 50;
  int max_halvings = 8;
  /// Continuity threshold on |delta t| relative to the laser period.
  double jump_fraction = 0.05;
};

/// Damped Newton on the reduced system in (t0, t):
///   p(t0, t) - A(t0) + i sqrt(2 Ip) = 0,   (p - A(t))^2 / 2 + Ip - Omega = 0.
/// On the plateau the linear tunneling condition selects the root with Im(t0) > 0.
SaddlePoint solve(const SaddleGuess& guess, double omega_h, const FieldParams& params,
                  const SolveOptions& options = {});

inline SaddleGuess as_guess(const SaddlePoint& sp) { return {sp.p, sp.t, sp.t0, sp.branch}; }

/// Maps a saddle to the next half cycle: (p, t, t0) -> (-p, t + T/2, t0 + T/2).
SaddlePoint half_period_translate(const SaddlePoint& sp, const FieldParams& params);

// --- classical (Ip = 0) trajectories -----------------------------------------

struct ClassicalTimes {
  double t0 = 0.0;
  double t = 0.0;
};

/// Real launch/return times for Ip = 0, tabulated over launch phases in
/// (0, T/4). The return kinetic energy rises from zero (long-branch end) to
/// its maximum at the cutoff phase and falls back to zero (short-branch end).
class ClassicalMap {
 public:
  explicit ClassicalMap(const FieldParams& params, int samples = 2000);

  /// Maximum return kinetic energy (a.u.), about 3.17 Up.
  double max_energy() const { return max_energy_; }
  ClassicalTimes cutoff_times() const { return cutoff_; }

  /// Times whose return kinetic energy equals `energy`. Throws
  /// NoSolutionError above max_energy().
  ClassicalTimes times_for(double energy, int branch) const;

  /// Return time and kinetic energy for launch time t0 (first return).
  std::pair<double, double> return_for(double t0) const;

 private:
  FieldParams params_;
  std::vector<double> t0_;
  std::vector<double> energy_;
  std::size_t peak_ = 0;
  double max_energy_ = 0.0;
  ClassicalTimes cutoff_;
};

/// Real (t0, t) with return kinetic energy omega_h, treating Ip as zero.
ClassicalTimes classical_guess(double omega_h, int branch, const FieldParams& params);

// --- continuation -----------------------------------------------------------

struct BranchTrajectory {
  int branch = 1;
  FieldParams params;
  std::vector<SaddlePoint> points;  // strictly increasing omega_h

  std::size_t nearest_index(double omega_h) const;
};

struct TraceOptions {
  SolveOptions solve;
  int homotopy_steps = 20;
  double homotopy_start_fraction = 1e-6;
};

/// Mid-plateau anchor 1.3 Ip + 1.6 Up where tracing is seeded.
inline double anchor_frequency(const FieldParams& f) { return 1.3 * f.ip + 1.6 * f.up; }

/// Seeds the branch at the anchor by an Ip homotopy from the classical
/// solution, then continues outward in both directions across the grid.
/// Branch-1 points above the nominal cutoff are flagged physical = false.
BranchTrajectory trace_branch(int branch, std::span<const double> omega_grid, const FieldParams& params,
                              const TraceOptions& options = {});

/// Uniform grid from Ip + 0.1 Up to (nominal cutoff + 10 w) with spacing
/// step_fraction * w; `hi_extra` extends the upper end (a.u.).
std::vector<double> default_omega_grid(const FieldParams& params, double step_fraction = 0.1,
                                       double hi_extra = 0.0);

}  // namespace sfa
