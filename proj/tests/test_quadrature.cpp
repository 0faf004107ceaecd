#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "berglab/errors.hpp"
#include "berglab/quadrature.hpp"
#include "berglab/rng.hpp"
#include "berglab/weights.hpp"

using namespace berglab;
namespace quad = berglab::quadrature;
namespace w = berglab::weights;

namespace {
constexpr double kPi = 3.14159265358979323846264338327950;
}

TEST_CASE("polynomials are integrated to machine precision") {
  const auto r = quad::integrate([](double t) { return 4.0 * t * t * t; }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("semi-infinite transform reproduces the exponential integral") {
  const auto r =
      quad::integrate([](double t) { return std::exp(-t); }, 0.0, quad::kInf);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncated exponential moment matches the closed form") {
  const auto r =
      quad::integrate([](double t) { return t * std::exp(-t); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-13));
}

TEST_CASE("doubly infinite integrals split and converge") {
  const auto r = quad::integrate(
      [](double t) { return std::exp(-t * t); }, -quad::kInf, quad::kInf);
  CHECK(r.value == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("breakpoints let kinked integrands converge quickly") {
  quad::Integrand1D q;
  q.f = [](double t) { return std::fabs(t - 0.3); };
  q.lower = 0.0;
  q.upper = 1.0;
  q.breakpoints = {0.3};
  const auto r = quad::integrate(q);
  const double exact = 0.5 * (0.3 * 0.3 + 0.7 * 0.7);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("tightening the tolerance tightens the accepted error") {
  auto f = [](double t) { return std::sin(3.0 * t) * std::exp(-0.5 * t); };
  const auto loose = quad::integrate(f, 0.0, 8.0, 1e-6);
  const auto tight = quad::integrate(f, 0.0, 8.0, 5e-7);
  const bool improved = tight.error_estimate <= 0.5 * loose.error_estimate ||
                        std::fabs(tight.value - loose.value) <=
                            std::max(1e-6 * std::fabs(loose.value), 1e-6);
  CHECK(improved);
}

TEST_CASE("non-integrable singularities raise NonConvergent") {
  quad::Options opts;
  opts.tol = 1e-10;
  opts.max_evaluations = 20000;
  quad::Integrand1D q;
  q.f = [](double t) { return 1.0 / t; };
  q.lower = 0.0;
  q.upper = 1.0;
  CHECK_THROWS_AS(quad::integrate(q, opts), NonConvergent);
}

TEST_CASE("unweighted polydisk moments are products of pi/(alpha_i+1)") {
  for (int n = 1; n <= 3; ++n) {
    const auto domain = w::ReinhardtDomain::unit_polydisk(n);
    const auto weight = w::RadialWeight::zero(n);
    std::vector<int> alpha(n, 0);
    // walk a selection of indices with |alpha| <= 10
    Rng rng(12345);
    for (int trial = 0; trial < 25; ++trial) {
      int budget = 10;
      for (int i = 0; i < n; ++i) {
        alpha[i] = static_cast<int>(rng.index(budget + 1));
        budget -= alpha[i];
      }
      double exact = 1.0;
      for (int i = 0; i < n; ++i) exact *= kPi / (alpha[i] + 1.0);
      const double got = quad::moment(domain, weight, alpha);
      CHECK(got == doctest::Approx(exact).epsilon(1e-11));
    }
  }
}

TEST_CASE("gaussian disk moments match incomplete gamma closed forms") {
  const auto domain = w::ReinhardtDomain::unit_disk();
  const auto weight = w::RadialWeight::gaussian(1, 1.0);
  const int alpha0[] = {0};
  const int alpha1[] = {1};
  CHECK(quad::moment(domain, weight, alpha0) ==
        doctest::Approx(kPi * (1.0 - std::exp(-1.0))).epsilon(1e-12));
  CHECK(quad::moment(domain, weight, alpha1) ==
        doctest::Approx(kPi * (1.0 - 2.0 * std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("unweighted ball moments match the beta closed form") {
  // unit ball in C^n, u = 0: moment(alpha) = pi^n * prod(alpha_i!) / (n+|alpha|)!
  for (int n = 1; n <= 3; ++n) {
    const auto domain = w::ReinhardtDomain::ball(n, 1.0);
    const auto weight = w::RadialWeight::zero(n);
    std::vector<int> alpha(n, 0);
    alpha[0] = 2;
    if (n > 1) alpha[n - 1] = 1;
    double exact = std::pow(kPi, n);
    int total = 0;
    for (int i = 0; i < n; ++i) {
      exact *= std::tgamma(alpha[i] + 1.0);
      total += alpha[i];
    }
    exact /= std::tgamma(n + total + 1.0);
    CHECK(quad::moment(domain, weight, alpha) ==
          doctest::Approx(exact).epsilon(1e-11));
  }
}

TEST_CASE("ball moments reject non-linear profiles") {
  const auto domain = w::ReinhardtDomain::ball(2, 1.0);
  w::RadialWeight weight;
  weight.profiles = {w::polynomial_profile({0.0, 0.0, 1.0}),
                     w::polynomial_profile({0.0, 0.0, 1.0})};
  const int alpha[] = {0, 0};
  CHECK_THROWS_AS(quad::moment(domain, weight, alpha), PreconditionViolation);
}

TEST_CASE("moments decrease in the degree for non-decreasing profiles") {
  const auto domain = w::ReinhardtDomain::unit_disk();
  Rng rng(777);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = rng.uniform(0.0, 2.0);
    const double b = rng.uniform(0.0, 1.0);
    auto weight = w::RadialWeight::from_profiles(
        {w::polynomial_profile({0.0, a, b})}, domain);
    double prev = std::numeric_limits<double>::infinity();
    for (int m = 0; m <= 8; ++m) {
      const int alpha[] = {m};
      const double mom = quad::moment(domain, weight, alpha);
      CHECK(mom > 0.0);
      CHECK(mom < prev);
      prev = mom;
    }
  }
}
