#include <doctest.h>

#include <cmath>
#include <numbers>
#include <map>
#include <random>

#include "common.hpp"
#include "sfa/analysis.hpp"
#include "sfa/errors.hpp"
#include "sfa/oracle.hpp"
#include "sfa/twocolor.hpp"

using namespace sfa;
using sfa::testing::argon_ev;
using sfa::testing::field;

namespace {

constexpr double pi = std::numbers::pi;

double mod_pi_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), pi);
  return std::min(d, pi - d);
}

struct Traced {
  FieldParams f;
  std::vector<BranchTrajectory> branches;
};

const Traced& argon(double intensity) {
  static std::map<double, Traced> cache;
  auto it = cache.find(intensity);
  if (it != cache.end()) return it->second;
  Traced r;
  r.f = field(800, intensity, argon_ev, 0.05);
  const auto grid = default_omega_grid(r.f);
  r.branches = {trace_branch(1, grid, r.f), trace_branch(2, grid, r.f)};
  return cache.emplace(intensity, std::move(r)).first->second;
}

}  // namespace

TEST_CASE("sigma closed form") {
  const Traced& a = argon(2e14);
  SUBCASE("vanishes without the second harmonic") {
    FieldParams f = a.f;
    f.lambda2 = 0.0;
    CHECK(sigma(a.branches[0].points[100], 0.3, f) == cd(0.0));
  }
  SUBCASE("matches contour quadrature of the integrand") {
    for (const auto& tr : a.branches) {
      for (std::size_t i = 0; i < tr.points.size(); i += 29) {
        const SaddlePoint& sp = tr.points[i];
        const cd ref = oracle::sigma_by_quadrature(sp, 0.7, a.f);
        CHECK(std::abs(sigma(sp, 0.7, a.f) - ref) / std::abs(ref) < 1e-8);
      }
    }
  }
  SUBCASE("half-period antisymmetry") {
    for (const auto& tr : a.branches) {
      for (const auto& sp : tr.points) {
        const SaddlePoint moved = half_period_translate(sp, a.f);
        for (double phi : {0.0, 1.1, 2.5}) {
          const cd s = sigma(sp, phi, a.f);
          CHECK(std::abs(sigma(moved, phi, a.f) + s) / std::abs(s) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("sigma coefficients") {
  const Traced& a = argon(2e14);
  const SaddlePoint& sp = a.branches[1].points[150];
  const SigmaCoefficients c = sigma_coefficients(sp, a.f);
  for (double phi : {0.1, 1.3, 2.9}) {
    const cd direct = sigma(sp, phi, a.f);
    CHECK(std::abs(c(phi) - direct) / std::abs(direct) < 1e-10);
    CHECK(std::abs(c(phi + pi) + c(phi)) < 1e-12 * std::abs(c(phi)));
  }
  FieldParams twice = a.f;
  twice.lambda2 *= 2.0;
  const SigmaCoefficients d = sigma_coefficients(sp, twice);
  CHECK(std::abs(d.c_cos - 2.0 * c.c_cos) < 1e-14 * std::abs(c.c_cos));
  CHECK(std::abs(d.c_sin - 2.0 * c.c_sin) < 1e-14 * std::abs(c.c_sin));

  SUBCASE("real for classical saddles") {
    const FieldParams f = field(800, 2e14, 0.0, 0.05);
    const auto tr = trace_branch(2, default_omega_grid(f), f);
    const double emax = ClassicalMap(f).max_energy();
    for (const auto& p : tr.points) {
      if (p.omega_h > emax * 0.999) break;
      const SigmaCoefficients k = sigma_coefficients(p, f);
      CHECK(std::abs(k.c_cos.imag()) < 1e-10);
      CHECK(std::abs(k.c_sin.imag()) < 1e-10);
    }
  }
}

TEST_CASE("even intensity and in-situ phase") {
  SUBCASE("pi periodicity") {
    const SigmaCoefficients c{0, 1, cd(0.02, -0.01), cd(-0.03, 0.015)};
    for (double phi : {0.0, 0.4, 1.9}) {
      CHECK(even_intensity(c, phi + pi) == doctest::Approx(even_intensity(c, phi)).epsilon(1e-12));
    }
    CHECK(perturbative(c, 0.3));
    CHECK_FALSE(perturbative(SigmaCoefficients{0, 1, cd(0.5), cd(0.0)}, 0.0));
  }
  SUBCASE("trivial coefficients") {
    CHECK(in_situ_phase({0, 1, cd(0.3, 0.1), cd(0.0)}) == doctest::Approx(0.0));
    CHECK(in_situ_phase({0, 1, cd(0.0), cd(0.2, -0.4)}) == doctest::Approx(pi / 2));
    CHECK_THROWS_AS(in_situ_phase({0, 1, cd(0.0), cd(0.0)}), DegenerateSaddleError);
  }
  SUBCASE("grid-scan oracle") {
    const SigmaCoefficients c{0, 1, cd(1.0, 2.0), cd(0.3, -1.0)};
    CHECK(mod_pi_distance(in_situ_phase(c), oracle::phi0_by_scan(c)) < 1e-3);
    std::mt19937 rng(11);
    std::normal_distribution<double> n;
    for (int k = 0; k < 50; ++k) {
      const SigmaCoefficients r{0, 1, cd(n(rng), n(rng)), cd(n(rng), n(rng))};
      const double phi0 = in_situ_phase(r);
      CHECK(phi0 >= 0.0);
      CHECK(phi0 < pi);
      CHECK(mod_pi_distance(phi0, oracle::phi0_by_scan(r)) < 1e-3);
    }
  }
}

TEST_CASE("in-situ phase does not depend on lambda2") {
  const Traced& a = argon(2e14);
  BranchTrajectory tr = a.branches[0];
  const auto base = in_situ_curve(tr);
  tr.params.lambda2 = 0.013;
  const auto scaled = in_situ_curve(tr);
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(std::abs(base[i].phi0 - scaled[i].phi0) < 1e-12);
}

TEST_CASE("classical in-situ phase from real trajectories") {
  const FieldParams f = field(800, 2e14, 0.0, 0.05);
  for (int b : {1, 2}) {
    const auto tr = trace_branch(b, default_omega_grid(f), f);
    const auto curve = in_situ_curve(tr);
    for (double e : {0.6, 1.4, 2.2, 2.9}) {
      // real launch/return times, p and sigma by real-axis quadrature
      const ClassicalTimes ct = classical_guess(e * f.up, b, f);
      const cd p = oracle::contour_integral([&](cd s) { return f.a1 * std::sin(f.omega * s); }, ct.t0, ct.t) /
                   (ct.t - ct.t0);
      SaddlePoint real;
      real.p = p;
      real.t = ct.t;
      real.t0 = ct.t0;
      const SigmaCoefficients c{e, b, oracle::sigma_by_quadrature(real, 0.0, f),
                                oracle::sigma_by_quadrature(real, pi / 2, f)};
      const double classical = in_situ_phase(c);
      const std::size_t i = tr.nearest_index(e * f.up);
      const SaddlePoint exact = solve(as_guess(tr.points[i]), e * f.up, f);
      CHECK(mod_pi_distance(in_situ_phase(sigma_coefficients(exact, f)), classical) < 1e-6);
      CHECK(mod_pi_distance(curve[i].phi0, in_situ_phase(sigma_coefficients(tr.points[i], f))) < 1e-12);
    }
  }
}

TEST_CASE("unwrap") {
  const std::vector<double> v = {3.0, 0.05, 0.1, 3.1, 0.0};
  const auto u = unwrap(v, pi, pi / 2);
  CHECK(u[1] == doctest::Approx(0.05 + pi));
  CHECK(u[2] == doctest::Approx(0.1 + pi));
  CHECK(u[3] == doctest::Approx(3.1));
  CHECK(u[4] == doctest::Approx(pi));
}

TEST_CASE("two-color dipole reduces to the even/odd factors") {
  const Traced& a = argon(2e14);
  std::vector<DipoleContribution> x;
  std::vector<SigmaCoefficients> s;
  const double w = 24 * a.f.omega;
  for (const auto& tr : a.branches) {
    const SaddlePoint sp = solve(as_guess(tr.points[tr.nearest_index(w)]), w, a.f);
    x.push_back(half_period_dipole(sp, a.f));
    s.push_back(sigma_coefficients(sp, a.f));
  }
  const cd direct = two_color_dipole(x, s, 0.6, a.f);
  cd expected = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) expected += x[n].amplitude * 2.0 * cd(0, 1) * std::sin(std::conj(s[n](0.6)));
  CHECK(std::abs(direct - expected) < 1e-12 * std::abs(expected));
}

TEST_CASE("spectrogram") {
  const Traced& a = argon(1.4e14);
  const std::vector<int> orders = {16, 17, 20, 24};
  const auto phi = default_phi_grid(90);

  SUBCASE("one-color limit") {
    FieldParams f = a.f;
    f.lambda2 = 0.0;
    const Spectrogram s = spectrogram(a.branches, orders, phi, SpectrogramMode::coherent, f);
    for (std::size_t k = 0; k < orders.size(); ++k) {
      const auto row = s.intensity.row(static_cast<Eigen::Index>(k));
      if (orders[k] % 2 == 0) {
        CHECK(row.maxCoeff() == 0.0);
      } else {
        CHECK(row.maxCoeff() - row.minCoeff() <= 1e-12 * row.maxCoeff());
        CHECK(row.maxCoeff() > 0.0);
      }
    }
  }
  SUBCASE("pi periodicity on a full-turn grid") {
    std::vector<double> turn;
    for (int i = 0; i < 40; ++i) turn.push_back(2 * pi * i / 40);
    const Spectrogram s = spectrogram(a.branches, orders, turn, SpectrogramMode::coherent, a.f);
    CHECK((s.intensity.array() >= 0.0).all());
    for (Eigen::Index k = 0; k < s.intensity.rows(); ++k) {
      for (int j = 0; j < 20; ++j) {
        CHECK(s.intensity(k, j) == doctest::Approx(s.intensity(k, j + 20)).epsilon(1e-10));
      }
    }
  }
  SUBCASE("single-branch maxima equal -phi0 / 2w") {
    FieldParams f = a.f;
    f.lambda2 = 0.005;
    const std::vector<int> even = {14, 18, 22, 26};
    for (auto [mode, b] : {std::pair{SpectrogramMode::branch1, 0}, std::pair{SpectrogramMode::branch2, 1}}) {
      const Spectrogram s = spectrogram(a.branches, even, default_phi_grid(360), mode, f);
      for (std::size_t k = 0; k < even.size(); ++k) {
        const double w = even[k] * f.omega;
        const auto& tr = a.branches[static_cast<std::size_t>(b)];
        const SaddlePoint sp = solve(as_guess(tr.points[tr.nearest_index(w)]), w, f);
        const double tau = -in_situ_phase(sigma_coefficients(sp, f)) / (2 * f.omega) / f.period;
        double d = std::fmod(std::abs(s.max_delay[k] - tau), 0.25);
        d = std::min(d, 0.25 - d);
        CHECK(d < 1e-3);
      }
    }
  }
  SUBCASE("orders outside the traced range") {
    const std::vector<int> bad = {2, 20};
    CHECK_THROWS_AS(spectrogram(a.branches, bad, phi, SpectrogramMode::coherent, a.f), RangeError);
  }
}
