#pragma once

// Perturbative second harmonic: the first-order action correction sigma,
// in-situ phases and the relative-phase spectrogram.

#include <span>
#include <vector>

#include "sfa/dipole.hpp"

namespace sfa {

/// sigma = -lambda int_{t0}^{t} (p - A1(t')) A2(t', phi) dt' with
/// A2 = a1 sin(2 w t' + phi), in closed form between complex limits.
template <typename Real>
Complex<Real> sigma(const Complex<Real>& p, const Complex<Real>& t, const Complex<Real>& t0, Real phi,
                    const BasicFieldParams<Real>& f) {
  const Real w = f.omega;
  auto primitive = [&](const Complex<Real>& x) {
    return p * std::cos(Real(2) * w * x + phi) / (Real(2) * w) -
           f.a1 * (std::sin(Real(3) * w * x + phi) / (Real(6) * w) - std::sin(w * x + phi) / (Real(2) * w));
  };
  return f.lambda2 * f.a1 * (primitive(t) - primitive(t0));
}

cd sigma(const SaddlePoint& sp, double phi, const FieldParams& params);

struct SigmaCoefficients {
  double omega_h = 0.0;
  int branch = 1;
  cd c_cos;
  cd c_sin;

  cd operator()(double phi) const { return c_cos * std::cos(phi) + c_sin * std::sin(phi); }
};

SigmaCoefficients sigma_coefficients(const SaddlePoint& sp, const FieldParams& params);

/// Default bound on |sigma| for the first-order treatment.
inline constexpr double perturbative_limit = 0.3;

/// |sigma| is below `limit`.
bool perturbative(const SigmaCoefficients& coeffs, double phi, double limit = perturbative_limit);

/// Single-branch even-harmonic intensity |sigma(phi)|^2.
double even_intensity(const SigmaCoefficients& coeffs, double phi);

/// Relative phase in [0, pi) maximizing |c_cos cos(phi) + c_sin sin(phi)|.
/// Throws DegenerateSaddleError when both coefficients vanish.
double in_situ_phase(const SigmaCoefficients& coeffs);

/// Removes jumps larger than `threshold` by shifting with multiples of `period`.
std::vector<double> unwrap(std::span<const double> values, double period, double threshold);

struct InSituPoint {
  double omega_h = 0.0;
  double phi0 = 0.0;  // unwrapped
};

/// phi0 along a trajectory, unwrapped in Omega (period pi, threshold pi/2).
/// The maximizing phase does not depend on lambda2, so a unit ratio is used
/// when params.lambda2 is zero.
std::vector<InSituPoint> in_situ_curve(const BranchTrajectory& traj);

/// Two-color dipole sum_n x_n [exp(i sigma_n) - exp(-i Omega T / 2) exp(-i sigma_n)]
/// with sigma taken at the same (conjugate) saddle as the amplitude.
cd two_color_dipole(std::span<const DipoleContribution> contribs, std::span<const SigmaCoefficients> sigmas,
                    double phi, const FieldParams& params);

enum class SpectrogramMode { branch1, branch2, coherent };

const char* to_string(SpectrogramMode mode);

struct Spectrogram {
  SpectrogramMode mode = SpectrogramMode::coherent;
  std::vector<int> orders;
  std::vector<double> phi;     // relative phase grid, rad
  std::vector<double> delays;  // tau = -phi / (2 w), units of T
  Eigen::MatrixXd intensity;   // rows: orders, cols: phi grid
  std::vector<double> max_phi;    // per order, parabolic refinement
  std::vector<double> max_delay;  // per order, units of T
};

/// Evenly spaced phases on [0, pi) (the spectrogram is pi-periodic).
std::vector<double> default_phi_grid(int steps);

/// Intensity vs relative phase per harmonic order. Single-branch modes use
/// |2i sin sigma|^2 (even) or |2 cos sigma|^2 (odd); coherent mode weights
/// each branch by its stationary-phase amplitude and skips unphysical points.
/// Saddles are re-solved at the exact order from the nearest traced point.
/// Throws RangeError for orders outside the traced range.
Spectrogram spectrogram(std::span<const BranchTrajectory> branches, std::span<const int> orders,
                        std::span<const double> phi_grid, SpectrogramMode mode, const FieldParams& params);

}  // namespace sfa
