#include "sfa/twocolor.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sfa/errors.hpp"
#include "sfa/parallel.hpp"

namespace sfa {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cd I{0.0, 1.0};

bool is_even(int order) { return order % 2 == 0; }

/// Parabolic refinement of a maximum at index i; wraps around when the
/// grid covers one full period.
double refine_peak(std::span<const double> x, const Eigen::RowVectorXd& y, Eigen::Index i, bool periodic) {
  const Eigen::Index n = y.size();
  if (n < 3) return x[i];
  if (!periodic && (i == 0 || i == n - 1)) return x[i];
  const double ym = y((i + n - 1) % n);
  const double y0 = y(i);
  const double yp = y((i + 1) % n);
  const double denom = ym - 2.0 * y0 + yp;
  if (denom >= 0.0) return x[i];
  const double h = x[1] - x[0];
  const double shift = 0.5 * (ym - yp) / denom;
  double peak = x[i] + shift * h;
  if (periodic) peak = std::fmod(std::fmod(peak - x[0], pi) + pi, pi) + x[0];
  return peak;
}

bool covers_period(std::span<const double> phi) {
  const std::size_t n = phi.size();
  if (n < 3) return false;
  const double h = phi[1] - phi[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(phi[i] - phi[i - 1] - h) > 1e-9 * std::abs(h)) return false;
  }
  return std::abs(h * static_cast<double>(n) - pi) < 1e-9;
}

struct ExactSaddle {
  SaddlePoint sp;
  DipoleContribution dipole;
  SigmaCoefficients sigma;
};

}  // namespace

cd sigma(const SaddlePoint& sp, double phi, const FieldParams& params) { return sigma(sp.p, sp.t, sp.t0, phi, params); }

SigmaCoefficients sigma_coefficients(const SaddlePoint& sp, const FieldParams& params) {
  return {sp.omega_h, sp.branch, sigma(sp, 0.0, params), sigma(sp, pi / 2, params)};
}

bool perturbative(const SigmaCoefficients& coeffs, double phi, double limit) { return std::abs(coeffs(phi)) < limit; }

double even_intensity(const SigmaCoefficients& coeffs, double phi) { return std::norm(coeffs(phi)); }

double in_situ_phase(const SigmaCoefficients& coeffs) {
  const double cc = std::norm(coeffs.c_cos);
  const double ss = std::norm(coeffs.c_sin);
  if (cc == 0.0 && ss == 0.0) {
    throw DegenerateSaddleError("in-situ phase undefined: both sigma coefficients vanish");
  }
  // |sigma|^2 = const + (cc - ss)/2 cos 2phi + Re(c_cos conj(c_sin)) sin 2phi
  const double two_phi = std::atan2(2.0 * std::real(coeffs.c_cos * std::conj(coeffs.c_sin)), cc - ss);
  double phi0 = std::fmod(0.5 * two_phi, pi);
  if (phi0 < 0.0) phi0 += pi;
  if (phi0 >= pi) phi0 -= pi;
  return phi0;
}

std::vector<double> unwrap(std::span<const double> values, double period, double threshold) {
  std::vector<double> out(values.begin(), values.end());
  double offset = 0.0;
  for (std::size_t i = 1; i < out.size(); ++i) {
    const double jump = values[i] + offset - out[i - 1];
    if (std::abs(jump) > threshold) offset -= period * std::round(jump / period);
    out[i] = values[i] + offset;
  }
  return out;
}

std::vector<InSituPoint> in_situ_curve(const BranchTrajectory& traj) {
  FieldParams f = traj.params;
  if (f.lambda2 == 0.0) f.lambda2 = 1.0;
  std::vector<double> raw;
  raw.reserve(traj.points.size());
  for (const auto& sp : traj.points) raw.push_back(in_situ_phase(sigma_coefficients(sp, f)));
  const auto smooth = unwrap(raw, pi, pi / 2);
  std::vector<InSituPoint> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = {traj.points[i].omega_h, smooth[i]};
  return out;
}

cd two_color_dipole(std::span<const DipoleContribution> contribs, std::span<const SigmaCoefficients> sigmas,
                    double phi, const FieldParams& params) {
  if (contribs.size() != sigmas.size()) throw ConfigError("two_color_dipole: contribution/sigma count mismatch");
  cd sum = 0.0;
  for (std::size_t n = 0; n < contribs.size(); ++n) {
    const cd s = std::conj(sigmas[n](phi));
    const cd shift = half_period_phase(contribs[n].omega_h, params);
    sum += contribs[n].amplitude * (std::exp(I * s) - shift * std::exp(-I * s));
  }
  return sum;
}

const char* to_string(SpectrogramMode mode) {
  switch (mode) {
    case SpectrogramMode::branch1: return "branch1";
    case SpectrogramMode::branch2: return "branch2";
    case SpectrogramMode::coherent: return "coherent";
  }
  return "unknown";
}

std::vector<double> default_phi_grid(int steps) {
  if (steps < 3) throw ConfigError("phi grid needs at least 3 steps");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = pi * i / steps;
  return out;
}

Spectrogram spectrogram(std::span<const BranchTrajectory> branches, std::span<const int> orders,
                        std::span<const double> phi_grid, SpectrogramMode mode, const FieldParams& params) {
  if (phi_grid.empty()) throw ConfigError("empty phi grid");
  std::vector<const BranchTrajectory*> used;
  for (const auto& b : branches) {
    if (b.points.empty()) continue;
    if (mode == SpectrogramMode::branch1 && b.branch != 1) continue;
    if (mode == SpectrogramMode::branch2 && b.branch != 2) continue;
    used.push_back(&b);
  }
  if (used.empty()) throw ConfigError(std::string("no trajectory for spectrogram mode ") + to_string(mode));

  for (int q : orders) {
    const double omega_h = q * params.omega;
    for (const auto* b : used) {
      if (omega_h < b->points.front().omega_h || omega_h > b->points.back().omega_h) {
        std::ostringstream os;
        os << "order " << q << " outside the traced range of branch " << b->branch;
        throw RangeError(os.str());
      }
    }
  }

  std::vector<std::vector<DipoleContribution>> dipoles;
  if (mode == SpectrogramMode::coherent) {
    for (const auto* b : used) dipoles.push_back(trajectory_dipole(*b));
  }

  Spectrogram out;
  out.mode = mode;
  out.orders.assign(orders.begin(), orders.end());
  out.phi.assign(phi_grid.begin(), phi_grid.end());
  for (double phi : phi_grid) out.delays.push_back(-phi / (4.0 * pi));

  const std::size_t nphi = phi_grid.size();
  const bool periodic = covers_period(phi_grid);
  const double cutoff = params.nominal_cutoff();

  auto rows = parallel_map<Eigen::RowVectorXd>(orders.size(), [&](std::size_t k) {
    const int q = orders[k];
    const double omega_h = q * params.omega;
    std::vector<ExactSaddle> saddles;
    for (std::size_t m = 0; m < used.size(); ++m) {
      const auto& traj = *used[m];
      if (mode == SpectrogramMode::coherent && traj.branch == 1 && omega_h > cutoff) continue;
      const std::size_t i = traj.nearest_index(omega_h);
      ExactSaddle e;
      e.sp = solve(as_guess(traj.points[i]), omega_h, params);
      e.sigma = sigma_coefficients(e.sp, params);
      if (mode == SpectrogramMode::coherent) e.dipole = half_period_dipole(e.sp, params, &dipoles[m][i]);
      saddles.push_back(e);
    }
    Eigen::RowVectorXd row(static_cast<Eigen::Index>(nphi));
    for (std::size_t j = 0; j < nphi; ++j) {
      const double phi = phi_grid[j];
      double value = 0.0;
      if (mode == SpectrogramMode::coherent) {
        cd sum = 0.0;
        for (const auto& e : saddles) {
          const cd s = std::conj(e.sigma(phi));
          sum += e.dipole.amplitude * (is_even(q) ? 2.0 * I * std::sin(s) : 2.0 * std::cos(s));
        }
        value = std::norm(sum);
      } else {
        const cd s = saddles.front().sigma(phi);
        value = std::norm(is_even(q) ? 2.0 * I * std::sin(s) : 2.0 * std::cos(s));
      }
      row(static_cast<Eigen::Index>(j)) = value;
    }
    return row;
  });

  out.intensity.resize(static_cast<Eigen::Index>(orders.size()), static_cast<Eigen::Index>(nphi));
  for (std::size_t k = 0; k < orders.size(); ++k) {
    const auto& row = rows[k];
    out.intensity.row(static_cast<Eigen::Index>(k)) = row;
    Eigen::Index imax = 0;
    const double peak = row.maxCoeff(&imax);
    if (!(peak > 0.0) || row.minCoeff() == peak) {
      out.max_phi.push_back(std::numeric_limits<double>::quiet_NaN());
      out.max_delay.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double phi_max = refine_peak(phi_grid, row, imax, periodic);
    out.max_phi.push_back(phi_max);
    out.max_delay.push_back(-phi_max / (4.0 * pi));
  }
  return out;
}

}  // namespace sfa
