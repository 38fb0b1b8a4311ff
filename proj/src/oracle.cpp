#include "sfa/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "sfa/analysis.hpp"
#include "sfa/errors.hpp"

namespace sfa::oracle {

namespace {

constexpr double pi = std::numbers::pi;

constexpr std::array<double, 8> xgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                       0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                       0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                       0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> wgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                       0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                       0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                       0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

cd kronrod(const std::function<cd(cd)>& f, cd a, cd b, cd& err) {
  const cd center = 0.5 * (a + b);
  const cd half = 0.5 * (b - a);
  const cd fc = f(center);
  cd k = wgk[7] * fc;
  cd g = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const cd f1 = f(center - half * xgk[static_cast<std::size_t>(j)]);
    const cd f2 = f(center + half * xgk[static_cast<std::size_t>(j)]);
    k += wgk[static_cast<std::size_t>(j)] * (f1 + f2);
    if (j % 2 == 1) g += wg[static_cast<std::size_t>(j / 2)] * (f1 + f2);
  }
  err = (k - g) * half;
  return k * half;
}

cd adaptive(const std::function<cd(cd)>& f, cd a, cd b, double rel_tol, double abs_tol, cd whole, int depth) {
  cd err;
  const cd value = kronrod(f, a, b, err);
  if (depth > 40 || std::abs(err) <= std::max(abs_tol, rel_tol * std::abs(whole))) return value;
  const cd mid = 0.5 * (a + b);
  return adaptive(f, a, mid, rel_tol, abs_tol, whole, depth + 1) +
         adaptive(f, mid, b, rel_tol, abs_tol, whole, depth + 1);
}

double relative(cd a, cd ref) { return std::abs(a - ref) / std::max(std::abs(ref), 1e-300); }

/// Phase distance modulo pi.
double mod_pi_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), pi);
  return std::min(d, pi - d);
}

struct ClassicalReturn {
  bool found = false;
  double energy = 0.0;
  double t = 0.0;
};

ClassicalReturn integrate_return(const FieldParams& f, double t0, int steps_per_cycle) {
  // x' = v, v' = dA/dt (velocity p - A(t) with p = A(t0))
  const double h = f.period / steps_per_cycle;
  auto accel = [&](double t) { return f.a1 * f.omega * std::cos(f.omega * t); };
  double t = t0, x = 0.0, v = 0.0;
  for (int step = 0; step < 2 * steps_per_cycle; ++step) {
    const double k1x = v, k1v = accel(t);
    const double k2x = v + 0.5 * h * k1v, k2v = accel(t + 0.5 * h);
    const double k3x = v + 0.5 * h * k2v, k3v = k2v;
    const double k4x = v + h * k3v, k4v = accel(t + h);
    const double xn = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    const double vn = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    if (step > 0 && x * xn <= 0.0 && x != 0.0) {
      // cubic Hermite interpolation of the crossing inside the step
      double lo = 0.0, hi = 1.0;
      auto xs = [&](double u) {
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * x + (u3 - 2 * u2 + u) * h * v + (-2 * u3 + 3 * u2) * xn + (u3 - u2) * h * vn;
      };
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (xs(lo) * xs(mid) <= 0.0) hi = mid; else lo = mid;
      }
      const double u = 0.5 * (lo + hi);
      const double tr = t + u * h;
      const double vr = f.a1 * (std::sin(f.omega * tr) - std::sin(f.omega * t0));
      return {true, 0.5 * vr * vr, tr};
    }
    x = xn;
    v = vn;
    t += h;
  }
  return {};
}

}  // namespace

cd contour_integral(const std::function<cd(cd)>& f, cd a, cd b, double rel_tol, double abs_tol) {
  cd err;
  const cd rough = kronrod(f, a, b, err);
  return adaptive(f, a, b, rel_tol, abs_tol, rough, 0);
}

cd action_by_quadrature(const SaddlePoint& sp, const FieldParams& f) {
  return contour_integral(
      [&](cd s) {
        const cd k = sp.p - f.a1 * std::sin(f.omega * s);
        return 0.5 * k * k + f.ip;
      },
      sp.t0, sp.t);
}

cd sigma_by_quadrature(const SaddlePoint& sp, double phi, const FieldParams& f) {
  return contour_integral(
      [&](cd s) {
        return -f.lambda2 * (sp.p - f.a1 * std::sin(f.omega * s)) * f.a1 * std::sin(2.0 * f.omega * s + phi);
      },
      sp.t0, sp.t);
}

Matrix3c<double> hessian_by_differences(const SaddlePoint& sp, const FieldParams& f, double h) {
  Matrix3c<double> m;
  const std::array<cd, 3> x = {sp.p, sp.t, sp.t0};
  for (int j = 0; j < 3; ++j) {
    auto plus = x, minus = x;
    plus[static_cast<std::size_t>(j)] += h;
    minus[static_cast<std::size_t>(j)] -= h;
    const auto gp = action_gradient(plus[0], plus[1], plus[2], sp.omega_h, f);
    const auto gm = action_gradient(minus[0], minus[1], minus[2], sp.omega_h, f);
    m.col(j) = (gp - gm) / (2.0 * h);
  }
  return m;
}

cd action_time_derivative(const SaddlePoint& sp, const FieldParams& f, double h) {
  auto s = [&](cd t) { return action(sp.p, t, sp.t0, f); };
  return (s(sp.t + h) - s(sp.t - h)) / (2.0 * h);
}

double phi0_by_scan(const SigmaCoefficients& coeffs, int samples) {
  double best = 0.0, best_value = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double phi = pi * i / samples;
    const double v = std::norm(coeffs(phi));
    if (v > best_value) {
      best_value = v;
      best = phi;
    }
  }
  return best;
}

ClassicalPeak classical_peak(const FieldParams& f, int phases, int steps_per_cycle) {
  if (!(f.up > 0.0)) throw DomainError("classical peak needs a non-zero field");
  ClassicalPeak peak;
  for (int i = 1; i < phases; ++i) {
    const double phase = 0.5 * pi * i / phases;
    const auto r = integrate_return(f, phase / f.omega, steps_per_cycle);
    if (r.found && r.energy / f.up > peak.energy_over_up) {
      peak = {r.energy / f.up, phase, f.omega * r.t};
    }
  }
  return peak;
}

std::vector<Check> validate(const FieldParams& params, const ValidationOptions& options) {
  FieldParams f = params;
  if (f.lambda2 == 0.0) f.lambda2 = 0.05;
  PipelineOptions popts;
  popts.compute_gamma = false;
  const PipelineResult run = run_pipeline(f, popts);

  std::vector<const SaddlePoint*> plateau;
  for (const auto* traj : {&run.branch1, &run.branch2}) {
    for (const auto& sp : traj->points) {
      if (sp.omega_h > f.ip + 0.2 * f.up && sp.omega_h < f.nominal_cutoff()) plateau.push_back(&sp);
    }
  }
  if (plateau.empty()) throw RangeError("no plateau saddles to validate");
  std::mt19937 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, plateau.size() - 1);
  std::vector<const SaddlePoint*> sample;
  for (int i = 0; i < options.random_saddles; ++i) sample.push_back(plateau[pick(rng)]);

  Check act{"action closed form vs contour quadrature (relative)", 0.0, 1e-8, 0};
  Check sig{"sigma closed form vs contour quadrature (relative)", 0.0, 1e-8, 0};
  Check hes{"Hessian entries vs central differences (relative)", 0.0, 1e-6, 0};
  Check dsdt{"dS/dt at the saddle vs Omega (relative)", 0.0, 1e-6, 0};
  Check phi{"phi0 closed form vs 1e4-point grid scan (rad)", 0.0, 1e-3, 0};
  for (const auto* sp : sample) {
    act.max_error = std::max(act.max_error, relative(action(*sp, f), action_by_quadrature(*sp, f)));
    ++act.samples;
    for (double ph : {0.0, 0.7, 2.1}) {
      sig.max_error = std::max(sig.max_error, relative(sigma(*sp, ph, f), sigma_by_quadrature(*sp, ph, f)));
      ++sig.samples;
    }
    const auto a = action_hessian(sp->p, sp->t, sp->t0, f);
    const auto d = hessian_by_differences(*sp, f);
    const double scale = a.cwiseAbs().maxCoeff();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double denom = std::max(std::abs(a(i, j)), 1e-3 * scale);
        hes.max_error = std::max(hes.max_error, std::abs(a(i, j) - d(i, j)) / denom);
        ++hes.samples;
      }
    }
    dsdt.max_error = std::max(dsdt.max_error, relative(action_time_derivative(*sp, f), cd(sp->omega_h)));
    ++dsdt.samples;
    const auto c = sigma_coefficients(*sp, f);
    phi.max_error = std::max(phi.max_error, mod_pi_distance(in_situ_phase(c), phi0_by_scan(c)));
    ++phi.samples;
  }
  {
    const SigmaCoefficients c{0.0, 1, cd(1.0, 2.0), cd(0.3, -1.0)};
    phi.max_error = std::max(phi.max_error, mod_pi_distance(in_situ_phase(c), phi0_by_scan(c)));
    ++phi.samples;
  }

  Check res{"saddle residual norm, every traced point (a.u.)", 0.0, 1e-12, 0};
  for (const auto* traj : {&run.branch1, &run.branch2}) {
    for (const auto& sp : traj->points) {
      res.max_error = std::max(res.max_error, residual(sp.p, sp.t, sp.t0, sp.omega_h, f).norm());
      ++res.samples;
    }
  }

  std::vector<Check> out = {act, sig, hes, dsdt, phi, res};
  if (f.up > 0.0) {
    const ClassicalPeak oracle_peak = classical_peak(f);
    const ClassicalMap map(f);
    Check cut{"classical max return energy, map vs RK4 scan (Up)", 0.0, 2e-3, 1};
    cut.max_error = std::abs(map.max_energy() / f.up - oracle_peak.energy_over_up);
    out.push_back(cut);
  }
  return out;
}

}  // namespace sfa::oracle
