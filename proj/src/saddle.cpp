#include "sfa/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sfa/errors.hpp"

namespace sfa {

namespace {

using Vec2 = Eigen::Vector2cd;
using Mat2 = Eigen::Matrix2cd;

constexpr cd I{0.0, 1.0};

struct ReducedSystem {
  const FieldParams& f;
  double omega_h;
  cd tunnel;  // i sqrt(2 Ip)

  ReducedSystem(const FieldParams& params, double omega)
      : f(params), omega_h(omega), tunnel(I * std::sqrt(2.0 * params.ip)) {}

  Vec2 value(const cd& t0, const cd& t) const {
    const cd p = drift_momentum(f, t0, t);
    const cd k1 = p - vector_potential(f, t);
    return {p - vector_potential(f, t0) + tunnel, k1 * k1 / 2.0 + f.ip - omega_h};
  }

  Mat2 jacobian(const cd& t0, const cd& t) const {
    const cd p = drift_momentum(f, t0, t);
    const cd span = t - t0;
    const cd dp_dt0 = (p - vector_potential(f, t0)) / span;
    const cd dp_dt = (vector_potential(f, t) - p) / span;
    const cd k1 = p - vector_potential(f, t);
    Mat2 j;
    j(0, 0) = dp_dt0 - vector_potential_rate(f, t0);
    j(0, 1) = dp_dt;
    j(1, 0) = k1 * dp_dt0;
    j(1, 1) = k1 * (dp_dt - vector_potential_rate(f, t));
    return j;
  }
};

bool finite(const cd& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string where(double omega_h, const FieldParams& f) {
  std::ostringstream os;
  os << "Omega = " << omega_h << " a.u. (order " << omega_h / f.omega << ")";
  return os.str();
}

}  // namespace

SaddlePoint solve(const SaddleGuess& guess, double omega_h, const FieldParams& params, const SolveOptions& options) {
  const ReducedSystem sys(params, omega_h);
  cd t0 = guess.t0;
  cd t = guess.t;

  auto full_norm = [&](const cd& a, const cd& b) {
    return residual(drift_momentum(params, a, b), b, a, omega_h, params).norm();
  };

  Vec2 g = sys.value(t0, t);
  double merit = g.norm();
  int iterations = 0;
  bool converged = merit < options.tolerance && full_norm(t0, t) < options.tolerance;

  while (!converged && iterations < options.max_iterations) {
    const Vec2 step = sys.jacobian(t0, t).partialPivLu().solve(-g);
    if (!finite(step(0)) || !finite(step(1))) break;

    double scale = 1.0;
    cd t0_try = t0 + step(0);
    cd t_try = t + step(1);
    Vec2 g_try = sys.value(t0_try, t_try);
    for (int h = 0; h < options.max_halvings && !(g_try.norm() < merit); ++h) {
      scale *= 0.5;
      t0_try = t0 + scale * step(0);
      t_try = t + scale * step(1);
      g_try = sys.value(t0_try, t_try);
    }
    if (!finite(g_try(0)) || !finite(g_try(1))) break;
    t0 = t0_try;
    t = t_try;
    g = g_try;
    merit = g.norm();
    ++iterations;
    converged = merit < options.tolerance && full_norm(t0, t) < options.tolerance;
  }

  if (!converged) {
    std::ostringstream os;
    os << "Newton did not converge within " << options.max_iterations << " iterations at " << where(omega_h, params)
       << " (|g| = " << merit << ")";
    throw ConvergenceError(os.str());
  }
  if (std::abs(t - guess.t) >= options.jump_fraction * params.period) {
    std::ostringstream os;
    os << "branch jump at " << where(omega_h, params) << ": |dt| = " << std::abs(t - guess.t) / params.period
       << " T";
    throw BranchJumpError(os.str());
  }

  SaddlePoint sp;
  sp.omega_h = omega_h;
  sp.t0 = t0;
  sp.t = t;
  sp.p = drift_momentum(params, t0, t);
  sp.branch = guess.branch;
  sp.residual_norm = full_norm(t0, t);
  sp.iterations = iterations;
  return sp;
}

SaddlePoint half_period_translate(const SaddlePoint& sp, const FieldParams& params) {
  SaddlePoint out = sp;
  out.p = -sp.p;
  out.t = sp.t + params.period / 2.0;
  out.t0 = sp.t0 + params.period / 2.0;
  return out;
}

// --- classical map ----------------------------------------------------------

ClassicalMap::ClassicalMap(const FieldParams& params, int samples) : params_(params) {
  params_.ip = 0.0;
  if (!(params_.up > 0.0)) throw DomainError("classical trajectories need a nonzero field");
  const double quarter = params_.period / 4.0;
  t0_.reserve(samples);
  energy_.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    const double t0 = quarter * (k + 0.5) / samples;
    t0_.push_back(t0);
    energy_.push_back(return_for(t0).second);
  }
  peak_ = static_cast<std::size_t>(std::max_element(energy_.begin(), energy_.end()) - energy_.begin());

  // Golden-section refinement of the peak between neighbouring samples.
  double a = t0_[peak_ == 0 ? 0 : peak_ - 1];
  double b = t0_[std::min(peak_ + 1, t0_.size() - 1)];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double ec = return_for(c).second;
  double ed = return_for(d).second;
  for (int it = 0; it < 100 && (b - a) > 1e-13 * params_.period; ++it) {
    if (ec > ed) {
      b = d;
      d = c;
      ed = ec;
      c = b - ratio * (b - a);
      ec = return_for(c).second;
    } else {
      a = c;
      c = d;
      ec = ed;
      d = a + ratio * (b - a);
      ed = return_for(d).second;
    }
  }
  const double t_peak = 0.5 * (a + b);
  const auto [t_ret, e_peak] = return_for(t_peak);
  max_energy_ = e_peak;
  cutoff_ = {t_peak, t_ret};
}

std::pair<double, double> ClassicalMap::return_for(double t0) const {
  const FieldParams& f = params_;
  const double a0 = f.a1 * std::sin(f.omega * t0);
  // Excursion x(t0 + d) = A(t0) d - int A, divided by d^2 to remove the
  // trivial double root at d = 0. It starts negative for t0 in (0, T/4)
  // and is positive at d = T.
  auto excursion = [&](double d) {
    return (a0 * d - vector_potential_integral<double>(f, t0, t0 + d).real()) / (d * d);
  };
  const int scan = 600;
  const double d_min = 1e-7 * f.period;
  const double d_max = f.period;
  const double log_ratio = std::log(d_max / d_min);
  double lo = d_min;
  double h_lo = excursion(lo);
  double hi = lo;
  bool bracketed = false;
  for (int k = 1; k <= scan; ++k) {
    hi = d_min * std::exp(log_ratio * k / scan);
    const double h_hi = excursion(hi);
    if (h_lo < 0.0 && h_hi >= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
    h_lo = h_hi;
  }
  if (!bracketed) throw NoSolutionError("no classical return within one period");
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * f.period; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excursion(mid) < 0.0 ? lo : hi) = mid;
  }
  const double t = t0 + 0.5 * (lo + hi);
  const double v = a0 - f.a1 * std::sin(f.omega * t);
  return {t, 0.5 * v * v};
}

ClassicalTimes ClassicalMap::times_for(double energy, int branch) const {
  if (branch != 1 && branch != 2) throw DomainError("branch must be 1 or 2");
  if (!(energy >= 0.0) || energy > max_energy_) {
    std::ostringstream os;
    os << "return energy " << energy << " a.u. outside classical range [0, " << max_energy_ << "]";
    throw NoSolutionError(os.str());
  }
  if (energy == max_energy_) return cutoff_;

  // Branch 2 (long): energy increases with t0 on (0, t_peak].
  // Branch 1 (short): energy decreases with t0 on [t_peak, T/4).
  const double t_peak = cutoff_.t0;
  double lo = 0.0;
  double hi = params_.period / 4.0;
  if (branch == 2) {
    hi = t_peak;
    for (std::size_t k = 0; k < t0_.size() && t0_[k] < t_peak; ++k) {
      (energy_[k] < energy ? lo : hi) = t0_[k];
      if (energy_[k] >= energy) break;
    }
  } else {
    lo = t_peak;
    for (std::size_t k = t0_.size(); k-- > 0 && t0_[k] > t_peak;) {
      (energy_[k] < energy ? hi : lo) = t0_[k];
      if (energy_[k] >= energy) break;
    }
  }
  // The endpoints 0 and T/4 carry zero return energy and are never evaluated.
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * params_.period; ++it) {
    const double mid = 0.5 * (lo + hi);
    const bool below = return_for(mid).second < energy;
    if (branch == 2) {
      (below ? lo : hi) = mid;
    } else {
      (below ? hi : lo) = mid;
    }
  }
  const double t0 = 0.5 * (lo + hi);
  return {t0, return_for(t0).first};
}

ClassicalTimes classical_guess(double omega_h, int branch, const FieldParams& params) {
  return ClassicalMap(params).times_for(omega_h, branch);
}

// --- continuation -----------------------------------------------------------

std::size_t BranchTrajectory::nearest_index(double omega_h) const {
  if (points.empty()) throw RangeError("empty trajectory");
  auto it = std::lower_bound(points.begin(), points.end(), omega_h,
                             [](const SaddlePoint& sp, double w) { return sp.omega_h < w; });
  if (it == points.end()) return points.size() - 1;
  const auto i = static_cast<std::size_t>(it - points.begin());
  if (i > 0 && omega_h - points[i - 1].omega_h < it->omega_h - omega_h) return i - 1;
  return i;
}

namespace {

SaddlePoint seed_at_anchor(int branch, double omega_anchor, const FieldParams& params, const TraceOptions& opt) {
  const ClassicalMap classical(params);
  const double kinetic = 1.6 * params.up;
  const ClassicalTimes ct = classical.times_for(params.ip > 0.0 ? kinetic : omega_anchor, branch);
  SaddleGuess guess{cd(params.a1 * std::sin(params.omega * ct.t0)), cd(ct.t), cd(ct.t0), branch};

  if (params.ip > 0.0) {
    // Geometric Ip schedule from homotopy_start_fraction to 1; the target
    // frequency follows the 1.3 Ip shift of the cutoff.
    const int n = std::max(2, opt.homotopy_steps);
    double last_good = 0.0;
    auto step_to = [&](double fraction) {
      FieldParams partial = params;
      partial.ip = fraction * params.ip;
      return solve(guess, kinetic + 1.3 * partial.ip, partial, opt.solve);
    };
    for (int k = 0; k < n; ++k) {
      const double fraction = std::pow(opt.homotopy_start_fraction, double(n - 1 - k) / double(n - 1));
      try {
        guess = as_guess(step_to(fraction));
      } catch (const Error&) {
        const double mid = last_good > 0.0 ? std::sqrt(last_good * fraction) : 0.5 * fraction;
        try {
          guess = as_guess(step_to(mid));
          guess = as_guess(step_to(fraction));
        } catch (const Error& e) {
          std::ostringstream os;
          os << "Ip homotopy failed after fraction " << last_good << ": " << e.what();
          throw HomotopyError(os.str(), last_good);
        }
      }
      last_good = fraction;
    }
  }
  return solve(guess, omega_anchor, params, opt.solve);
}

SaddlePoint continue_to(double omega_h, const SaddlePoint& prev, const SaddlePoint* prev2, const FieldParams& params,
                        const SolveOptions& opt) {
  std::vector<SaddleGuess> attempts;
  if (prev2 != nullptr) {
    const double r = (omega_h - prev.omega_h) / (prev.omega_h - prev2->omega_h);
    attempts.push_back({prev.p + r * (prev.p - prev2->p), prev.t + r * (prev.t - prev2->t),
                        prev.t0 + r * (prev.t0 - prev2->t0), prev.branch});
  }
  attempts.push_back(as_guess(prev));
  // Off-axis kicks let Newton leave the real axis where real saddles
  // coalesce (Ip = 0 at the classical cutoff). Above the cutoff the short
  // branch continues with Im(t0) > 0 and the long branch with Im(t0) < 0,
  // which is the Ip -> 0+ limit of both.
  const double kick = 1e-3 / params.omega;
  const double preferred = prev.branch == 1 ? 1.0 : -1.0;
  for (double sign : {preferred, -preferred}) {
    SaddleGuess g = attempts.front();
    g.t0 += sign * kick * I;
    g.t -= sign * kick * I;
    attempts.push_back(g);
  }

  std::string last_error;
  for (const SaddleGuess& g : attempts) {
    try {
      SaddlePoint sp = solve(g, omega_h, params, opt);
      if (std::abs(sp.t - prev.t) >= opt.jump_fraction * params.period) {
        last_error = "branch jump relative to previous grid point";
        continue;
      }
      // Short-branch returns keep Im(t) <= 0, long-branch returns Im(t) >= 0.
      if (preferred * sp.t.imag() > 1e-9 * params.period) {
        last_error = "root on the other branch's side of the real axis";
        continue;
      }
      return sp;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  std::ostringstream os;
  os << "branch " << prev.branch << " lost at " << where(omega_h, params) << ": " << last_error;
  throw BranchJumpError(os.str());
}

}  // namespace

BranchTrajectory trace_branch(int branch, std::span<const double> omega_grid, const FieldParams& params,
                              const TraceOptions& options) {
  if (branch != 1 && branch != 2) throw DomainError("branch must be 1 or 2");
  if (!(params.up > 0.0)) throw DomainError("tracing needs a nonzero field (Up > 0)");
  if (omega_grid.size() < 2) throw RangeError("omega grid needs at least two points");
  const double max_spacing = 0.1 * params.omega * (1.0 + 1e-9);
  for (std::size_t i = 1; i < omega_grid.size(); ++i) {
    const double d = omega_grid[i] - omega_grid[i - 1];
    if (!(d > 0.0)) throw RangeError("omega grid must be strictly increasing");
    if (d > max_spacing) throw RangeError("omega grid spacing exceeds 0.1 hbar*omega");
  }
  const double anchor = anchor_frequency(params);
  if (anchor < omega_grid.front() || anchor > omega_grid.back()) {
    throw RangeError("omega grid does not contain the mid-plateau anchor 1.3 Ip + 1.6 Up");
  }

  BranchTrajectory traj;
  traj.branch = branch;
  traj.params = params;
  traj.points.resize(omega_grid.size());

  const auto ia = static_cast<std::size_t>(
      std::min_element(omega_grid.begin(), omega_grid.end(),
                       [&](double a, double b) { return std::abs(a - anchor) < std::abs(b - anchor); }) -
      omega_grid.begin());
  traj.points[ia] = seed_at_anchor(branch, omega_grid[ia], params, options);

  for (std::size_t i = ia + 1; i < omega_grid.size(); ++i) {
    const SaddlePoint* prev2 = i >= ia + 2 ? &traj.points[i - 2] : nullptr;
    traj.points[i] = continue_to(omega_grid[i], traj.points[i - 1], prev2, params, options.solve);
  }
  for (std::size_t i = ia; i-- > 0;) {
    const SaddlePoint* prev2 = i + 2 <= ia ? &traj.points[i + 2] : nullptr;
    traj.points[i] = continue_to(omega_grid[i], traj.points[i + 1], prev2, params, options.solve);
  }

  const double cutoff = params.nominal_cutoff();
  for (auto& sp : traj.points) {
    sp.branch = branch;
    sp.physical = !(branch == 1 && sp.omega_h > cutoff);
  }
  return traj;
}

std::vector<double> default_omega_grid(const FieldParams& params, double step_fraction, double hi_extra) {
  if (!(step_fraction > 0.0)) throw ConfigError("omega step must be positive");
  const double lo = params.ip + 0.1 * params.up;
  const double hi = params.nominal_cutoff() + 10.0 * params.omega + std::max(0.0, hi_extra);
  const double step = step_fraction * params.omega;
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = lo + step * static_cast<double>(k);
  return grid;
}

}  // namespace sfa
