#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "common.hpp"
#include "sfa/errors.hpp"

using namespace sfa;
using sfa::testing::field;

TEST_CASE("photon energy at 800 nm") {
  const FieldParams f = field(800, 2e14, 0.0);
  CHECK(hartree_to_ev(f.omega) == doctest::Approx(testing::photon_energy_ev(800)).epsilon(1e-7));
  CHECK(hartree_to_ev(f.omega) == doctest::Approx(1.5498).epsilon(1e-4));
  CHECK(f.omega == doctest::Approx(0.05695).epsilon(1e-3));
  CHECK(f.period * f.omega == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
}

TEST_CASE("ponderomotive energy") {
  const FieldParams f = field(800, 2e14, 0.0);
  CHECK(hartree_to_ev(f.up) == doctest::Approx(11.94).epsilon(2e-3));
  CHECK(hartree_to_ev(f.up) == doctest::Approx(testing::up_rule_of_thumb_ev(2e14, 800)).epsilon(2e-3));
  CHECK(f.up == doctest::Approx(f.a1 * f.a1 / 4.0).epsilon(1e-15));

  SUBCASE("zero field") {
    const FieldParams z = field(800, 0.0, 15.76);
    CHECK(z.a1 == 0.0);
    CHECK(z.up == 0.0);
  }
}

TEST_CASE("Up is linear in intensity and quadratic in wavelength") {
  const double base = field(800, 1e14, 0.0).up;
  for (double i : {1.0, 2.5, 4.0}) {
    for (double wl : {600.0, 800.0, 1300.0}) {
      const double expected = base * i * (wl / 800.0) * (wl / 800.0);
      CHECK(field(wl, i * 1e14, 0.0).up == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("round trip to laboratory units") {
  LaserConfig c;
  c.wavelength_nm = 1300.0;
  c.intensity_wcm2 = 2.7e14;
  c.ip_ev = 24.58;
  c.second_harmonic_ratio = 0.03;
  c.phi = 0.4;
  const LaserConfig back = to_laser_config(derive_field_params(c));
  CHECK(back.wavelength_nm == doctest::Approx(c.wavelength_nm).epsilon(1e-10));
  CHECK(back.intensity_wcm2 == doctest::Approx(c.intensity_wcm2).epsilon(1e-10));
  CHECK(back.ip_ev == doctest::Approx(c.ip_ev).epsilon(1e-10));
  CHECK(back.second_harmonic_ratio == c.second_harmonic_ratio);
  CHECK(back.phi == c.phi);
}

TEST_CASE("invalid inputs") {
  LaserConfig c;
  c.intensity_wcm2 = 1e14;
  c.wavelength_nm = -800.0;
  CHECK_THROWS_AS(derive_field_params(c), DomainError);
  c.wavelength_nm = 0.0;
  CHECK_THROWS_AS(derive_field_params(c), DomainError);
  c.wavelength_nm = 800.0;
  c.intensity_wcm2 = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(derive_field_params(c), DomainError);
  c.intensity_wcm2 = 1e14;
  c.ip_ev = -1.0;
  CHECK_THROWS_AS(derive_field_params(c), DomainError);
  c.ip_ev = 15.76;
  c.second_harmonic_ratio = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(derive_field_params(c), DomainError);
}

TEST_CASE("second-harmonic ratio above 0.1 warns but is accepted") {
  LaserConfig c;
  c.intensity_wcm2 = 1e14;
  c.second_harmonic_ratio = 0.2;
  CHECK_NOTHROW(derive_field_params(c));
  CHECK(validity_warnings(c).size() == 1);
  c.second_harmonic_ratio = 0.05;
  CHECK(validity_warnings(c).empty());
}

TEST_CASE("Keldysh parameter") {
  CHECK(keldysh(field(800, 2e14, 15.76)) == doctest::Approx(std::sqrt(15.76 / (2 * 11.94))).epsilon(2e-3));
  CHECK(keldysh(field(800, 2e14, 15.76)) == doctest::Approx(0.813).epsilon(2e-3));
  CHECK(keldysh(field(800, 2e14, 0.0)) == 0.0);
  FieldParams f = field(800, 2e14, 0.0);
  f.ip = 2.0 * f.up;
  CHECK(keldysh(f) == doctest::Approx(1.0));
  CHECK_THROWS_AS(keldysh(field(800, 0.0, 15.76)), DomainError);
}

TEST_CASE("float instantiation of the field parameters") {
  const FieldParams f = field(800, 2e14, 15.76);
  const auto g = f.cast<long double>();
  CHECK(static_cast<double>(g.nominal_cutoff()) == doctest::Approx(f.nominal_cutoff()));
}
