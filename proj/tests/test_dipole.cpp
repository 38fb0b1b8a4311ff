#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "common.hpp"
#include "sfa/dipole.hpp"
#include "sfa/errors.hpp"
#include "sfa/oracle.hpp"

using namespace sfa;
using sfa::testing::argon_ev;
using sfa::testing::field;

namespace {

constexpr double pi = std::numbers::pi;

struct Traced {
  FieldParams f;
  BranchTrajectory b1, b2;
};

const Traced& argon() {
  static const Traced t = [] {
    Traced r;
    r.f = field(800, 2e14, argon_ev);
    const auto grid = default_omega_grid(r.f);
    r.b1 = trace_branch(1, grid, r.f);
    r.b2 = trace_branch(2, grid, r.f);
    return r;
  }();
  return t;
}

bool in_plateau(const SaddlePoint& sp, const FieldParams& f) {
  return sp.omega_h > f.ip + 0.2 * f.up && sp.omega_h < f.nominal_cutoff();
}

}  // namespace

TEST_CASE("action: free particle and Ip separation") {
  FieldParams f = field(800, 0.0, 0.0);
  const cd p(0.7, 0.2), t(90.0, -3.0), t0(12.0, 14.0);
  CHECK(std::abs(action(p, t, t0, f) - p * p * (t - t0) / 2.0) < 1e-12);
  f = field(800, 2e14, 0.0);
  FieldParams g = f;
  g.ip = 0.58;
  CHECK(std::abs(action(p, t, t0, g) - action(p, t, t0, f) - 0.58 * (t - t0)) < 1e-10);
}

TEST_CASE("action matches contour quadrature") {
  const Traced& a = argon();
  for (const auto* tr : {&a.b1, &a.b2}) {
    for (std::size_t i = 0; i < tr->points.size(); i += 37) {
      const SaddlePoint& sp = tr->points[i];
      if (!in_plateau(sp, a.f)) continue;
      const cd ref = oracle::action_by_quadrature(sp, a.f);
      CHECK(std::abs(action(sp, a.f) - ref) / std::abs(ref) < 1e-8);
    }
  }
}

TEST_CASE("Hessian: analytic entries vs central differences at random plateau points") {
  const Traced& a = argon();
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, a.b1.points.size() - 1);
  int tested = 0;
  while (tested < 10) {
    const SaddlePoint& sp = (tested % 2 ? a.b1 : a.b2).points[pick(rng)];
    if (!in_plateau(sp, a.f)) continue;
    ++tested;
    const auto h = action_hessian(sp.p, sp.t, sp.t0, a.f);
    const auto d = oracle::hessian_by_differences(sp, a.f);
    const double scale = h.cwiseAbs().maxCoeff();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(h(i, j) - d(i, j)) / std::max(std::abs(h(i, j)), 1e-3 * scale) < 1e-6);
      }
    }
    CHECK(h(0, 0) == sp.t - sp.t0);
  }
}

TEST_CASE("Hessian determinant vanishes as classical branches merge") {
  const FieldParams f = field(800, 2e14, 0.0);
  const ClassicalMap map(f);
  auto det_at = [&](double e) {
    const ClassicalTimes c = classical_guess(e, 1, f);
    SaddlePoint sp;
    sp.omega_h = e;
    sp.t0 = c.t0;
    sp.t = c.t;
    sp.p = drift_momentum(f, sp.t0, sp.t);
    return std::abs(hessian_det(sp, f));
  };
  const double mid = det_at(1.6 * f.up);
  const double near = det_at(map.max_energy() * (1 - 1e-4));
  const double nearer = det_at(map.max_energy() * (1 - 1e-6));
  CHECK(near < 0.1 * mid);
  CHECK(nearer < 0.2 * near);

  SaddlePoint degenerate;
  degenerate.t0 = degenerate.t = cd(10.0, 0.0);
  CHECK_THROWS_AS(hessian_det(degenerate, f), DegenerateSaddleError);
}

TEST_CASE("dS/dt equals Omega at the saddle") {
  const Traced& a = argon();
  for (std::size_t i = 0; i < a.b2.points.size(); i += 50) {
    const SaddlePoint& sp = a.b2.points[i];
    CHECK(std::abs(oracle::action_time_derivative(sp, a.f) - sp.omega_h) / sp.omega_h < 1e-6);
  }
}

TEST_CASE("amplitudes along the trajectory") {
  const Traced& a = argon();
  const auto x1 = trajectory_dipole(a.b1);
  const auto x2 = trajectory_dipole(a.b2);

  SUBCASE("decaying exponential in the plateau") {
    for (std::size_t i = 0; i < x1.size(); ++i) {
      for (const auto* tr : {&a.b1, &a.b2}) {
        const SaddlePoint& sp = tr->points[i];
        if (!in_plateau(sp, a.f)) continue;
        const cd e = std::exp(cd(0, 1) * std::conj(action(sp, a.f)) - cd(0, 1) * sp.omega_h * std::conj(sp.t));
        CHECK(std::abs(e) <= 1.0 + 1e-9);
      }
    }
  }
  SUBCASE("short branch is more damped in the plateau") {
    const std::size_t i = a.b1.nearest_index(anchor_frequency(a.f));
    CHECK(std::abs(x1[i].amplitude) < std::abs(x2[i].amplitude));
    CHECK(a.b1.points[i].t0.imag() > a.b2.points[i].t0.imag());
  }
  SUBCASE("phase advances at rate -Re t") {
    // full amplitude on the central plateau; the prefactor phase turns quickly
    // only near Ip, so the exponent alone is checked over the whole plateau
    for (const auto* pair : {&x1, &x2}) {
      const auto& x = *pair;
      const auto& tr = pair == &x1 ? a.b1 : a.b2;
      for (std::size_t i = 1; i < x.size(); ++i) {
        const SaddlePoint& sp = tr.points[i];
        const SaddlePoint& prev = tr.points[i - 1];
        if (!in_plateau(sp, a.f)) continue;
        const double dw = sp.omega_h - prev.omega_h;
        const double expected = -0.5 * (sp.t.real() + prev.t.real());
        const cd e1 = cd(0, 1) * std::conj(action(sp, a.f)) - cd(0, 1) * sp.omega_h * std::conj(sp.t);
        const cd e0 = cd(0, 1) * std::conj(action(prev, a.f)) - cd(0, 1) * prev.omega_h * std::conj(prev.t);
        CHECK(std::abs((e1 - e0).imag() / dw - expected) < 1e-3 * a.f.period);
        if (sp.omega_h > 1.3 * a.f.ip + 0.8 * a.f.up && sp.omega_h < 1.3 * a.f.ip + 2.4 * a.f.up) {
          const double rate = std::arg(x[i].amplitude / x[i - 1].amplitude) / dw;
          CHECK(std::abs(rate - expected) < 0.05 * a.f.period);
        }
      }
    }
  }
  SUBCASE("square-root branch is continuous") {
    for (const auto* x : {&x1, &x2}) {
      for (std::size_t i = 1; i < x->size(); ++i) {
        CHECK(std::abs(std::arg((*x)[i].prefactor / (*x)[i - 1].prefactor)) < pi / 2);
      }
    }
  }
  SUBCASE("beyond the cutoff the long branch decays, the short branch is flagged") {
    double last = INFINITY;
    for (std::size_t i = 0; i < x2.size(); ++i) {
      if (a.b2.points[i].omega_h < a.f.nominal_cutoff() + 2 * a.f.omega) continue;
      CHECK(std::abs(x2[i].amplitude) < last);
      last = std::abs(x2[i].amplitude);
      CHECK_FALSE(a.b1.points[i].physical);
    }
  }
}

TEST_CASE("half-period relation and parity") {
  const Traced& a = argon();
  SUBCASE("translated saddle gives -x exp(-i Omega T/2)") {
    for (const auto* tr : {&a.b1, &a.b2}) {
      for (std::size_t i = 0; i < tr->points.size(); i += 41) {
        const SaddlePoint& sp = tr->points[i];
        if (!in_plateau(sp, a.f)) continue;
        const cd x = half_period_dipole(sp, a.f).amplitude;
        const cd y = half_period_dipole(half_period_translate(sp, a.f), a.f).amplitude;
        const cd expected = -x * std::exp(cd(0, -1) * sp.omega_h * a.f.period / 2.0);
        CHECK(std::abs(y - expected) / std::abs(x) < 1e-9);
      }
    }
  }
  SUBCASE("bracket values") {
    const FieldParams& f = a.f;
    CHECK(half_period_bracket(17 * f.omega, f) == cd(2.0));
    CHECK(half_period_bracket(18 * f.omega, f) == cd(0.0));
    CHECK(std::abs(half_period_bracket(17.5 * f.omega, f)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
  SUBCASE("even orders cancel") {
    const auto x1 = trajectory_dipole(a.b1);
    const auto x2 = trajectory_dipole(a.b2);
    double odd = 0.0, even = 0.0;
    for (int q = 12; q <= 36; ++q) {
      const double w = q * a.f.omega;
      std::vector<DipoleContribution> c;
      const std::size_t i = a.b1.nearest_index(w);
      c.push_back(half_period_dipole(solve(as_guess(a.b1.points[i]), w, a.f), a.f, &x1[i]));
      c.push_back(half_period_dipole(solve(as_guess(a.b2.points[i]), w, a.f), a.f, &x2[i]));
      const double v = std::abs(total_dipole(c, w, a.f));
      (q % 2 ? odd : even) = std::max(q % 2 ? odd : even, v);
    }
    CHECK(odd > 0.0);
    CHECK(even / odd < 1e-10);
  }
}
