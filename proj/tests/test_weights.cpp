#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "berglab/errors.hpp"
#include "berglab/rng.hpp"
#include "berglab/weights.hpp"

using namespace berglab;
namespace w = berglab::weights;

TEST_CASE("fs potential derivatives agree with central differences") {
  const double h1 = 1e-6, h2 = 1e-4;
  for (double t = -30.0; t <= 30.0; t += 0.73) {
    const double fd1 =
        (w::fs_potential(t + h1) - w::fs_potential(t - h1)) / (2 * h1);
    CHECK(std::fabs(fd1 - w::fs_slope(t)) < 1e-6);
    const double fd2 = (w::fs_potential(t + h2) - 2 * w::fs_potential(t) +
                        w::fs_potential(t - h2)) /
                       (h2 * h2);
    CHECK(std::fabs(fd2 - w::fs_curvature(t)) < 1e-6);
  }
}

TEST_CASE("gaussian weight declares exact curvature data") {
  for (int n = 1; n <= 3; ++n) {
    const auto g = w::RadialWeight::gaussian(n, 0.7);
    CHECK(g.hessian_lower == 0.7);
    CHECK(g.laplacian_sup == 4.0 * n * 0.7);
    w::verify_radial_declarations(g, w::ReinhardtDomain::unit_polydisk(n));
  }
}

TEST_CASE("profile sampling declares safe bounds for polynomial weights") {
  const auto domain = w::ReinhardtDomain::unit_disk();
  const auto weight = w::RadialWeight::from_profiles(
      {w::polynomial_profile({0.0, 0.5, 0.25})}, domain);
  // g' + s g'' = 0.5 + s  on [0,1] up to the s^2 correction: min at s=0
  CHECK(weight.hessian_lower == doctest::Approx(0.5).epsilon(1e-9));
  w::verify_radial_declarations(weight, domain);
}

TEST_CASE("non-psh profiles are rejected") {
  const auto domain = w::ReinhardtDomain::unit_disk();
  CHECK_THROWS_AS(
      w::RadialWeight::from_profiles({w::polynomial_profile({0.0, -0.5})}, domain),
      PreconditionViolation);
}

TEST_CASE("planar subharmonicity spot-check accepts and rejects correctly") {
  w::PlanarWeight ok;
  ok.u = [](w::complexd z) { return std::norm(z) + 0.5 * (z * z).real(); };
  ok.radius = 1.0;
  CHECK_NOTHROW(w::check_subharmonic(ok));

  w::PlanarWeight bad;
  bad.u = [](w::complexd z) { return -std::norm(z); };
  bad.radius = 1.0;
  CHECK_THROWS_AS(w::check_subharmonic(bad), PreconditionViolation);
}

TEST_CASE("test potential matches its exact curvature bracket") {
  const auto phi = w::ToricPotential::test_potential(0.5, 1.0);
  const auto exact = w::test_potential_bounds(0.5, 1.0);
  CHECK(exact.a == doctest::Approx((1.0 + std::exp(-1.0)) / 2.0));
  CHECK(exact.A == doctest::Approx((1.0 + std::exp(1.0)) / 2.0));
  w::verify_curvature_bounds(phi, exact);
  const auto sampled = w::sampled_curvature_bounds(phi);
  CHECK(sampled.a == doctest::Approx(exact.a).epsilon(1e-3));
  CHECK(sampled.A == doctest::Approx(exact.A).epsilon(1e-3));
}

TEST_CASE("potential derivative accessors agree with finite differences") {
  Rng rng(2024);
  const auto phi = w::ToricPotential::sigmoid_mixture(
      {0.25, 0.5, 0.25}, {1.0, 0.8, 0.6}, {-2.0, 0.5, 3.0});
  for (int i = 0; i < 40; ++i) {
    const double t = rng.uniform(-20.0, 20.0);
    const double h1 = 1e-5;  // first difference: truncation ~h^2, roundoff ~eps/h
    const double fd1 = (phi.value(t + h1) - phi.value(t - h1)) / (2 * h1);
    CHECK(std::fabs(fd1 - phi.slope(t)) < 1e-6);
    const double h2 = 1e-4;  // second difference: roundoff ~eps*|phi|/h^2
    const double fd2 =
        (phi.value(t + h2) - 2 * phi.value(t) + phi.value(t - h2)) / (h2 * h2);
    CHECK(std::fabs(fd2 - phi.curvature(t)) < 1e-5);
  }
  w::verify_full_mass(phi);
}

TEST_CASE("spline potentials reproduce slope data and stay convex") {
  w::GridSpec grid{-10.0, 10.0, 801};
  std::vector<double> slopes(grid.knots);
  for (int i = 0; i < grid.knots; ++i) slopes[i] = w::fs_slope(grid.knot(i));
  const auto phi =
      w::ToricPotential::from_spline_slopes(grid, slopes, w::fs_potential(-10.0));
  for (int i = 0; i < grid.knots; i += 37) {
    const double t = grid.knot(i);
    CHECK(phi.slope(t) == doctest::Approx(w::fs_slope(t)).epsilon(1e-12));
    // trapezoid accumulation drifts by O(h^2/12 * total variation of phi'')
    CHECK(phi.value(t) == doctest::Approx(w::fs_potential(t)).epsilon(1e-4));
  }
  CHECK(phi.value(0.123) == doctest::Approx(w::fs_potential(0.123)).epsilon(1e-4));
}

TEST_CASE("slope violations are rejected") {
  w::GridSpec grid{-5.0, 5.0, 11};
  std::vector<double> bad(grid.knots, 0.5);
  bad[5] = 1.5;  // outside [0,1]
  CHECK_THROWS_AS(w::ToricPotential::from_spline_slopes(grid, bad, 0.0),
                  SlopeViolation);
  std::vector<double> dec(grid.knots, 0.5);
  dec[6] = 0.2;  // decreasing
  CHECK_THROWS_AS(w::ToricPotential::from_spline_slopes(grid, dec, 0.0),
                  SlopeViolation);
  CHECK_THROWS_AS(w::ToricPotential::test_potential(1.5, 1.0), SlopeViolation);
}

TEST_CASE("potential files round-trip through the spline loader") {
  const std::string path = "test_potential_io.txt";
  {
    std::ofstream out(path);
    out.precision(17);
    w::GridSpec grid{-15.0, 15.0, 601};
    for (int i = 0; i < grid.knots; ++i) {
      const double t = grid.knot(i);
      out << t << " " << w::fs_potential(t) << "\n";
    }
  }
  const auto phi = w::ToricPotential::from_values_file(path);
  CHECK(phi.value(0.0) == doctest::Approx(w::fs_potential(0.0)).epsilon(1e-10));
  CHECK(phi.value(3.3) == doctest::Approx(w::fs_potential(3.3)).epsilon(1e-3));
  std::remove(path.c_str());
}

TEST_CASE("pointwise max keeps convexity data coherent") {
  const auto a = w::ToricPotential::fubini_study();
  const auto b = w::ToricPotential::test_potential(0.5, 2.0);
  const auto m = w::ToricPotential::pointwise_max(a, b);
  for (double t = -12.0; t <= 12.0; t += 0.37) {
    CHECK(m.value(t) == doctest::Approx(std::max(a.value(t), b.value(t))));
    CHECK(m.value(t) >= a.value(t) - 1e-15);
    CHECK(m.value(t) >= b.value(t) - 1e-15);
  }
}

TEST_CASE("blend and shift behave affinely") {
  const auto a = w::ToricPotential::fubini_study();
  const auto b = w::ToricPotential::test_potential(1.0, 1.5);
  const auto mix = a.blended(b, 0.25);
  CHECK(mix.value(0.7) ==
        doctest::Approx(0.75 * a.value(0.7) + 0.25 * b.value(0.7)).epsilon(1e-14));
  const auto up = b.shifted(2.5);
  CHECK(up.value(-1.0) == doctest::Approx(b.value(-1.0) + 2.5));
  CHECK(up.slope(-1.0) == doctest::Approx(b.slope(-1.0)));
}
