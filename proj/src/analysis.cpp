#include "sfa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sfa/errors.hpp"
#include "sfa/parallel.hpp"

namespace sfa {

namespace {

constexpr double pi = std::numbers::pi;

}  // namespace

double phi0_at(std::span<const InSituPoint> curve, double omega_h) {
  if (curve.empty()) throw RangeError("empty in-situ curve");
  if (omega_h <= curve.front().omega_h) return curve.front().phi0;
  if (omega_h >= curve.back().omega_h) return curve.back().phi0;
  auto it = std::lower_bound(curve.begin(), curve.end(), omega_h,
                             [](const InSituPoint& a, double w) { return a.omega_h < w; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double u = (omega_h - a.omega_h) / (b.omega_h - a.omega_h);
  return a.phi0 + u * (b.phi0 - a.phi0);
}

namespace {

void require_shared_grid(std::span<const InSituPoint> a, std::span<const InSituPoint> b) {
  if (a.size() != b.size()) throw ConfigError("in-situ curves are not on a shared grid");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].omega_h - b[i].omega_h) > 1e-12 * std::max(1.0, std::abs(a[i].omega_h))) {
      throw ConfigError("in-situ curves are not on a shared grid");
    }
  }
}

}  // namespace

std::vector<EmissionTime> emission_times(const BranchTrajectory& traj) {
  std::vector<EmissionTime> out;
  out.reserve(traj.points.size());
  for (const auto& sp : traj.points) {
    out.push_back({sp.omega_h, sp.t.real(), sp.t.real() / traj.params.period});
  }
  return out;
}

const char* to_string(WindowMode mode) { return mode == WindowMode::interior ? "interior" : "literal"; }

Window central_window(const FieldParams& params, WindowMode mode) {
  if (!(params.up > 0.0)) throw DomainError("central window has zero width when up == 0");
  const double half = 0.25 * 3.2 * params.up;
  if (mode == WindowMode::literal) {
    const double c = params.nominal_cutoff();
    return {c - half, c + half};
  }
  const double mid = 1.3 * params.ip + 1.6 * params.up;
  return {mid - half, mid + half};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y, Window window) {
  if (x.size() != y.size()) throw ConfigError("fit_line: size mismatch");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= window.lo && x[i] <= window.hi) idx.push_back(i);
  }
  LineFit fit;
  fit.count = idx.size();
  if (idx.size() < 2) return fit;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(idx.size()), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
  const double x0 = x[idx.front()];
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    a(r, 0) = x[idx[k]] - x0;  // centered for conditioning
    a(r, 1) = 1.0;
    b(r) = y[idx[k]];
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  fit.slope = c(0);
  fit.intercept = c(1) - c(0) * x0;
  const Eigen::VectorXd dev = a * c - b;
  const double span = std::abs(fit.slope) * (x[idx.back()] - x0);
  const double worst = dev.cwiseAbs().maxCoeff();
  fit.residual = span > 0.0 ? worst / span : (worst > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  return fit;
}

GammaReport gamma_ratio(const BranchTrajectory& traj, std::span<const InSituPoint> phi0, Window window,
                        double max_fit_residual) {
  const auto& pts = traj.points;
  if (pts.empty()) throw RangeError("gamma_ratio: empty trajectory");
  if (phi0.size() != pts.size()) throw ConfigError("gamma_ratio: phi0 and trajectory lengths differ");
  if (window.lo < pts.front().omega_h || window.hi > pts.back().omega_h) {
    std::ostringstream os;
    os << "window [" << window.lo << ", " << window.hi << "] a.u. outside traced range [" << pts.front().omega_h
       << ", " << pts.back().omega_h << "]";
    throw RangeError(os.str());
  }
  std::vector<double> x, tr, ph;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    x.push_back(pts[i].omega_h);
    tr.push_back(pts[i].t.real());
    ph.push_back(phi0[i].phi0);
  }
  const LineFit ft = fit_line(x, tr, window);
  const LineFit fp = fit_line(x, ph, window);
  if (ft.count < min_window_points) {
    std::ostringstream os;
    os << "only " << ft.count << " grid points inside the window (need " << min_window_points << ")";
    throw RangeError(os.str());
  }
  GammaReport r;
  r.branch = traj.branch;
  r.params = traj.params;
  r.window = window;
  r.slope_tr = ft.slope;
  r.slope_phi0 = fp.slope;
  r.fit_residual = std::max(ft.residual, fp.residual);
  if (!(r.fit_residual <= max_fit_residual)) {
    std::ostringstream os;
    os << "branch " << traj.branch << " fit residual " << r.fit_residual << " exceeds " << max_fit_residual
       << " (window likely touches the cutoff)";
    throw NonlinearityError(os.str());
  }
  if (r.slope_phi0 == 0.0) throw NonlinearityError("in-situ phase is flat over the window");
  r.gamma = -traj.params.omega * r.slope_tr / r.slope_phi0;
  return r;
}

double phase_difference_mod_pi(double a, double b) {
  double d = std::fmod(a - b, pi);
  if (d > pi / 2) d -= pi;
  if (d <= -pi / 2) d += pi;
  return d;
}

std::optional<double> intra_plateau_crossing(std::span<const InSituPoint> phi0_b1,
                                             std::span<const InSituPoint> phi0_b2, double below) {
  require_shared_grid(phi0_b1, phi0_b2);
  const std::size_t n = phi0_b1.size();
  for (std::size_t i = 0; i < n && phi0_b1[i].omega_h < below; ++i) {
    const double d0 = phase_difference_mod_pi(phi0_b1[i].phi0, phi0_b2[i].phi0);
    if (d0 == 0.0) return phi0_b1[i].omega_h;
    if (i + 1 >= n || phi0_b1[i + 1].omega_h >= below) break;
    const double d1 = phase_difference_mod_pi(phi0_b1[i + 1].phi0, phi0_b2[i + 1].phi0);
    // a change of sign across the +-pi/2 seam is a wrap, not a crossing
    if (std::abs(d0) < pi / 4 && std::abs(d1) < pi / 4 && d0 * d1 < 0.0) {
      const double u = d0 / (d0 - d1);
      return phi0_b1[i].omega_h + u * (phi0_b1[i + 1].omega_h - phi0_b1[i].omega_h);
    }
  }
  return std::nullopt;
}

PlateauMarkers plateau_markers(const FieldParams& f, std::span<const InSituPoint> phi0_b1,
                               std::span<const InSituPoint> phi0_b2) {
  PlateauMarkers m;
  m.nominal_cutoff = f.nominal_cutoff();
  m.classical_cutoff = f.ip + (f.up > 0.0 ? ClassicalMap(f).max_energy() : 0.0);
  m.intra_plateau_crossing = intra_plateau_crossing(phi0_b1, phi0_b2, m.nominal_cutoff);
  const double a = phi0_at(phi0_b1, m.nominal_cutoff);
  const double b = phi0_at(phi0_b2, m.nominal_cutoff);
  m.insitu_gap_at_cutoff = std::abs(phase_difference_mod_pi(a, b));
  m.insitu_merge_at_cutoff = m.insitu_gap_at_cutoff < merge_tolerance_rad;
  return m;
}

double trajectory_cutoff(const BranchTrajectory& traj) {
  const auto& pts = traj.points;
  if (pts.size() < 3) throw RangeError("trajectory too short to locate the cutoff");
  const std::size_t ia = traj.nearest_index(anchor_frequency(traj.params));
  double steepest = -1.0, where = pts.back().omega_h;
  for (std::size_t i = std::max<std::size_t>(ia, 1); i < pts.size(); ++i) {
    const double slope = std::abs((pts[i].t.imag() - pts[i - 1].t.imag()) / (pts[i].omega_h - pts[i - 1].omega_h));
    if (slope > steepest) {
      steepest = slope;
      where = 0.5 * (pts[i].omega_h + pts[i - 1].omega_h);
    }
  }
  return where;
}

int nearest_branch(double phi, double phi0_b1, double phi0_b2) {
  return std::abs(phase_difference_mod_pi(phi, phi0_b1)) <= std::abs(phase_difference_mod_pi(phi, phi0_b2)) ? 1 : 2;
}

double tau0(double phi0, const FieldParams& params) { return -phi0 / (2.0 * params.omega); }

double tau0_half_periods(double phi0, const FieldParams& params) {
  return tau0(phi0, params) / (params.period / 2.0);
}

PipelineResult run_pipeline(const FieldParams& params, const PipelineOptions& options) {
  PipelineResult r;
  r.params = params;
  r.grid = default_omega_grid(params, options.omega_step, options.hi_extra);
  auto traces = parallel_map<BranchTrajectory>(
      2, [&](std::size_t k) { return trace_branch(static_cast<int>(k) + 1, r.grid, params, options.trace); });
  r.branch1 = std::move(traces[0]);
  r.branch2 = std::move(traces[1]);
  r.phi0_b1 = in_situ_curve(r.branch1);
  r.phi0_b2 = in_situ_curve(r.branch2);
  r.markers = plateau_markers(params, r.phi0_b1, r.phi0_b2);
  if (options.compute_gamma) {
    const Window w = central_window(params, options.window);
    r.gamma_b1 = gamma_ratio(r.branch1, r.phi0_b1, w, options.max_fit_residual);
    r.gamma_b2 = gamma_ratio(r.branch2, r.phi0_b2, w, options.max_fit_residual);
  }
  return r;
}

std::vector<GammaRow> gamma_scan(std::span<const LaserConfig> configs, const PipelineOptions& options) {
  return parallel_map<GammaRow>(configs.size(), [&](std::size_t i) {
    GammaRow row;
    row.config = configs[i];
    try {
      const FieldParams f = derive_field_params(configs[i]);
      row.up_over_ip = f.ip > 0.0 ? f.up / f.ip : std::numeric_limits<double>::infinity();
      PipelineOptions opts = options;
      opts.compute_gamma = true;
      const PipelineResult r = run_pipeline(f, opts);
      row.gamma_b1 = r.gamma_b1->gamma;
      row.gamma_b2 = r.gamma_b2->gamma;
      row.fit_residual_b1 = r.gamma_b1->fit_residual;
      row.fit_residual_b2 = r.gamma_b2->fit_residual;
    } catch (const Error& e) {
      row.error = std::string(to_string(e.kind())) + ": " + e.what();
      row.gamma_b1 = row.gamma_b2 = std::numeric_limits<double>::quiet_NaN();
    }
    return row;
  });
}

std::vector<GammaRow> universal_curve(std::span<const LaserConfig> configs, const PipelineOptions& options) {
  for (const auto& c : configs) {
    if (!(c.ip_ev > 0.0)) throw DomainError("universal curve requires ip > 0 for every configuration");
  }
  auto rows = gamma_scan(configs, options);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const GammaRow& a, const GammaRow& b) { return a.up_over_ip < b.up_over_ip; });
  return rows;
}

}  // namespace sfa
