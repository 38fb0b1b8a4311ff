#pragma once

// Emission times, windowed slopes, gamma ratios, plateau markers and the
// multi-configuration drivers built on top of them.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfa/twocolor.hpp"

namespace sfa {

struct EmissionTime {
  double omega_h = 0.0;
  double t_r = 0.0;  // a.u.
  double t_r_over_period = 0.0;
};

std::vector<EmissionTime> emission_times(const BranchTrajectory& traj);

enum class WindowMode { interior, literal };

const char* to_string(WindowMode mode);

struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

/// interior: central half of [1.3 Ip, 1.3 Ip + 3.2 Up]; literal: nominal
/// cutoff +- 0.25 * 3.2 Up. Throws DomainError when up == 0.
Window central_window(const FieldParams& params, WindowMode mode = WindowMode::interior);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |deviation| / |fitted span|
  std::size_t count = 0;
};

/// Ordinary least squares of y(x) restricted to x in [lo, hi].
LineFit fit_line(std::span<const double> x, std::span<const double> y, Window window);

inline constexpr double default_max_fit_residual = 0.1;
inline constexpr std::size_t min_window_points = 8;

struct GammaReport {
  int branch = 1;
  FieldParams params;
  Window window;
  double slope_tr = 0.0;    // d t_R / d Omega
  double slope_phi0 = 0.0;  // d phi0 / d Omega
  double gamma = 0.0;
  double fit_residual = 0.0;
};

/// gamma = -w (d t_R/d Omega) / (d phi0/d Omega) from linear fits on the
/// window. `phi0` must be unwrapped and share the trajectory's grid.
/// Throws RangeError (window outside the trace, or fewer than 8 points) and
/// NonlinearityError (fit residual above `max_fit_residual`).
GammaReport gamma_ratio(const BranchTrajectory& traj, std::span<const InSituPoint> phi0, Window window,
                        double max_fit_residual = default_max_fit_residual);

/// First Omega below `below` where the two in-situ curves intersect modulo
/// pi, by linear interpolation of the wrapped difference.
std::optional<double> intra_plateau_crossing(std::span<const InSituPoint> phi0_b1,
                                             std::span<const InSituPoint> phi0_b2, double below);

/// Difference of two phases defined modulo pi, wrapped to (-pi/2, pi/2].
double phase_difference_mod_pi(double a, double b);

/// phi0 at omega_h by linear interpolation (clamped at the ends).
double phi0_at(std::span<const InSituPoint> curve, double omega_h);

/// 1 or 2: the branch whose in-situ phase is closer to `phi` modulo pi.
int nearest_branch(double phi, double phi0_b1, double phi0_b2);

struct PlateauMarkers {
  double nominal_cutoff = 0.0;
  double classical_cutoff = 0.0;  // Ip + max classical return energy
  std::optional<double> intra_plateau_crossing;
  bool insitu_merge_at_cutoff = false;
  double insitu_gap_at_cutoff = 0.0;  // |phi0_1 - phi0_2| mod pi at the nominal cutoff
};

inline constexpr double merge_tolerance_rad = 0.1;

PlateauMarkers plateau_markers(const FieldParams& params, std::span<const InSituPoint> phi0_b1,
                               std::span<const InSituPoint> phi0_b2);

/// Omega above the anchor where branch-1 Im(t) changes fastest, i.e. where
/// it leaves its plateau trend and turns over at the cutoff.
double trajectory_cutoff(const BranchTrajectory& branch1);

/// tau0 = -phi0 / (2 w), a.u.
double tau0(double phi0, const FieldParams& params);
/// tau0 in units of T/2.
double tau0_half_periods(double phi0, const FieldParams& params);

// --- pipeline -----------------------------------------------------------------

struct PipelineOptions {
  double omega_step = 0.1;  // grid spacing in units of w
  double hi_extra = 0.0;    // extra Omega range above cutoff + 10 w, a.u.
  WindowMode window = WindowMode::interior;
  double max_fit_residual = default_max_fit_residual;
  bool compute_gamma = true;
  TraceOptions trace;
};

struct PipelineResult {
  FieldParams params;
  std::vector<double> grid;
  BranchTrajectory branch1;
  BranchTrajectory branch2;
  std::vector<InSituPoint> phi0_b1;
  std::vector<InSituPoint> phi0_b2;
  std::optional<GammaReport> gamma_b1;
  std::optional<GammaReport> gamma_b2;
  PlateauMarkers markers;
};

/// Traces both branches (in parallel), in-situ curves, markers and gammas.
PipelineResult run_pipeline(const FieldParams& params, const PipelineOptions& options = {});

struct GammaRow {
  LaserConfig config;
  double up_over_ip = 0.0;
  double gamma_b1 = 0.0;
  double gamma_b2 = 0.0;
  double fit_residual_b1 = 0.0;
  double fit_residual_b2 = 0.0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

/// gamma for each config, in input order, dispatched to a worker pool.
/// Failures are recorded per row.
std::vector<GammaRow> gamma_scan(std::span<const LaserConfig> configs, const PipelineOptions& options = {});

/// gamma_scan sorted by Up/Ip. Throws DomainError if any config has ip == 0.
std::vector<GammaRow> universal_curve(std::span<const LaserConfig> configs, const PipelineOptions& options = {});

}  // namespace sfa
