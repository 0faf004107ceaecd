#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "berglab/bergman.hpp"
#include "berglab/errors.hpp"
#include "berglab/quadrature.hpp"
#include "berglab/rng.hpp"
#include "berglab/weights.hpp"

namespace bg = berglab::bergman;
namespace w = berglab::weights;
namespace quad = berglab::quadrature;
using berglab::CrossCheckMismatch;
using berglab::IllConditioned;
using berglab::NonConvergent;
using berglab::PreconditionViolation;
using berglab::Rng;
using w::complexd;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<complexd> pt(std::initializer_list<complexd> zs) { return zs; }

// brute-force polar midpoint Riemann sum of int_disk z^a conj(z)^b e^{-u} dlambda
complexd riemann_gram_entry(const std::function<double(complexd)>& u,
                            double radius, int a, int b, int nr = 2000,
                            int ntheta = 1537) {
  const double hr = radius / nr;
  const double ht = 2.0 * kPi / ntheta;
  std::complex<long double> acc(0.0L, 0.0L);
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * hr;
    for (int j = 0; j < ntheta; ++j) {
      const double theta = (j + 0.5) * ht;
      const complexd z = std::polar(r, theta);
      const double f = std::pow(r, a + b) * std::exp(-u(z)) * r;
      const double phase = (a - b) * theta;
      acc += std::complex<long double>(f * std::cos(phase), f * std::sin(phase));
    }
  }
  acc *= static_cast<long double>(hr * ht);
  return complexd(static_cast<double>(acc.real()),
                  static_cast<double>(acc.imag()));
}

}  // namespace

TEST_CASE("graded index enumeration is graded then lexicographic") {
  const auto idx = bg::graded_indices(2, 2);
  const std::vector<std::vector<int>> expected = {
      {0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  CHECK(idx == expected);
  // C(degree + n, n) indices in total
  CHECK(bg::graded_indices(3, 4).size() == 35);
  CHECK(bg::graded_indices(1, 7).size() == 8);
}

TEST_CASE("unweighted Gram matrices match closed-form moments") {
  const auto disk = w::ReinhardtDomain::unit_disk();
  const auto g1 = bg::gram_matrix(disk, w::RadialWeight::zero(1), 1);
  REQUIRE(g1.diagonal);
  CHECK(g1.entry(0, 0).real() == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(g1.entry(1, 1).real() == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(g1.entry(0, 1) == complexd(0.0, 0.0));

  const auto poly2 = w::ReinhardtDomain::unit_polydisk(2);
  const auto g2 = bg::gram_matrix(poly2, w::RadialWeight::zero(2), 1);
  CHECK(g2.entry(0, 0).real() == doctest::Approx(kPi * kPi).epsilon(1e-12));
  CHECK(g2.entry(1, 1).real() == doctest::Approx(kPi * kPi / 2).epsilon(1e-12));
  CHECK(g2.entry(2, 2).real() == doctest::Approx(kPi * kPi / 2).epsilon(1e-12));

  // unit ball in C^2: ||z^alpha||^2 = pi^2 a1! a2! / (2 + |a|)!
  const auto ball = w::ReinhardtDomain::ball(2, 1.0);
  const auto gb = bg::gram_matrix(ball, w::RadialWeight::zero(2), 3);
  for (int j = 0; j < gb.size(); ++j) {
    const auto& alpha = gb.indices[j];
    const double exact = kPi * kPi * std::tgamma(alpha[0] + 1.0) *
                         std::tgamma(alpha[1] + 1.0) /
                         std::tgamma(2.0 + alpha[0] + alpha[1] + 1.0);
    CHECK(gb.entry(j, j).real() == doctest::Approx(exact).epsilon(1e-11));
  }
}

TEST_CASE("radial Gram agrees with the standalone moment routine") {
  const auto domain = w::ReinhardtDomain::polydisk({1.0, 1.5});
  const auto weight = w::RadialWeight::from_profiles(
      {w::polynomial_profile({0.0, 0.7, 0.1}), w::linear_profile(0.4)}, domain);
  const auto g = bg::gram_matrix(domain, weight, 4);
  for (int j = 0; j < g.size(); ++j) {
    const double direct = quad::moment(domain, weight, g.indices[j]);
    CHECK(g.entry(j, j).real() == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("planar Gram matches a brute-force Riemann oracle") {
  w::PlanarWeight weight;
  weight.u = [](complexd z) { return z.real(); };  // e^{-Re z}, non-radial
  weight.radius = 1.0;
  const auto g = bg::gram_matrix_planar(weight, 2);
  REQUIRE(!g.diagonal);
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; b <= a; ++b) {
      const complexd oracle = riemann_gram_entry(weight.u, 1.0, a, b);
      const complexd got = g.entry(a, b);
      CHECK(std::abs(got - oracle) < 1e-4);
      // Hermitian symmetry
      CHECK(g.entry(b, a) == complexd(got.real(), -got.imag()));
    }
  }
  CHECK(std::abs(g.entry(0, 1)) > 0.1);  // genuinely non-diagonal
}

TEST_CASE("orthonormal basis transforms the Gram matrix to the identity") {
  w::PlanarWeight weight;
  weight.u = [](complexd z) { return 0.6 * std::norm(z) + 0.3 * z.real(); };
  weight.radius = 1.0;
  const auto g = bg::gram_matrix_planar(weight, 8);
  const auto basis = bg::orthonormalize(g);
  const int N = g.size();
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k <= j; ++k) {
      complexd s(0.0, 0.0);
      for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q)
          s += basis.coeff[j * N + p] * g.entry(p, q) *
               std::conj(basis.coeff[k * N + q]);
      CHECK(std::abs(s - (j == k ? complexd(1.0, 0.0) : complexd(0.0, 0.0))) <
            1e-10);
    }
  }
  CHECK(basis.condition > 1.0);
}

TEST_CASE("disk kernels reproduce the classical closed forms") {
  const auto disk = w::ReinhardtDomain::unit_disk();
  const auto basis =
      bg::orthonormalize(bg::gram_matrix(disk, w::RadialWeight::zero(1), 64));

  CHECK(bg::kernel_diag(basis, pt({complexd(0.0, 0.0)})) ==
        doctest::Approx(1.0 / kPi).epsilon(1e-12));
  // K(z) = 1/(pi (1-|z|^2)^2)
  const double k_half = bg::kernel_diag(basis, pt({complexd(0.5, 0.0)}));
  CHECK(k_half == doctest::Approx(1.0 / (kPi * 0.75 * 0.75)).epsilon(1e-9));

  const std::vector<complexd> v{complexd(1.0, 0.0)};
  CHECK(bg::tilde_kernel(basis, pt({complexd(0.0, 0.0)}), v) ==
        doctest::Approx(2.0 / kPi).epsilon(1e-12));
  CHECK(bg::bergman_metric(basis, pt({complexd(0.0, 0.0)}), v) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // hyperbolic metric 2/(1-|z|^2)^2
  CHECK(bg::bergman_metric(basis, pt({complexd(0.5, 0.0)}), v) ==
        doctest::Approx(2.0 / (0.75 * 0.75)).epsilon(1e-9));
}

TEST_CASE("Gaussian weight kernels match moment closed forms at the center") {
  const auto disk = w::ReinhardtDomain::unit_disk();
  const double a = 1.0;
  const auto basis = bg::orthonormalize(
      bg::gram_matrix(disk, w::RadialWeight::gaussian(1, a), 32));
  const double m0 = kPi * (1.0 - std::exp(-a)) / a;
  const double m1 = kPi * (1.0 - (1.0 + a) * std::exp(-a)) / (a * a);
  CHECK(bg::kernel_diag(basis, pt({complexd(0.0, 0.0)})) ==
        doctest::Approx(1.0 / m0).epsilon(1e-11));
  const std::vector<complexd> v{complexd(1.0, 0.0)};
  CHECK(bg::tilde_kernel(basis, pt({complexd(0.0, 0.0)}), v) ==
        doctest::Approx(1.0 / m1).epsilon(1e-11));
  // spot values from the closed forms
  CHECK(1.0 / m0 == doctest::Approx(0.5035588255089833).epsilon(1e-12));
  CHECK(1.0 / m1 == doctest::Approx(1.2046190577987037).epsilon(1e-12));
}

TEST_CASE("tilde kernel at the center of a product domain is 1/moment(e_i)") {
  const auto domain = w::ReinhardtDomain::polydisk({1.0, 1.0});
  const auto weight = w::RadialWeight::from_profiles(
      {w::polynomial_profile({0.0, 0.5, 0.2}), w::linear_profile(1.2)}, domain);
  const auto basis = bg::orthonormalize(bg::gram_matrix(domain, weight, 6));
  const std::vector<complexd> zero{complexd(0.0, 0.0), complexd(0.0, 0.0)};

  const std::vector<int> e1{1, 0}, e2{0, 1};
  const double m_e1 = quad::moment(domain, weight, e1);
  const double m_e2 = quad::moment(domain, weight, e2);
  CHECK(bg::tilde_kernel(basis, zero, pt({complexd(1, 0), complexd(0, 0)})) ==
        doctest::Approx(1.0 / m_e1).epsilon(1e-10));
  CHECK(bg::tilde_kernel(basis, zero, pt({complexd(0, 0), complexd(1, 0)})) ==
        doctest::Approx(1.0 / m_e2).epsilon(1e-10));
  // mixed direction: |v1|^2/m_e1 + |v2|^2/m_e2 after normalization
  const double mixed =
      bg::tilde_kernel(basis, zero, pt({complexd(3, 0), complexd(0, 4)}));
  CHECK(mixed ==
        doctest::Approx((9.0 / m_e1 + 16.0 / m_e2) / 25.0).epsilon(1e-10));
}

TEST_CASE("kernel truncations are non-decreasing in the degree") {
  const auto disk = w::ReinhardtDomain::unit_disk();
  const auto weight = w::RadialWeight::gaussian(1, 2.0);
  const std::vector<complexd> z{complexd(0.55, 0.3)};
  double prev = 0.0;
  for (int degree : {2, 4, 8, 16, 32}) {
    const auto basis = bg::orthonormalize(bg::gram_matrix(disk, weight, degree));
    const double k = bg::kernel_diag(basis, z);
    CHECK(k >= prev - 1e-12 * std::fabs(k));
    prev = k;
  }

  w::PlanarWeight planar;
  planar.u = [](complexd zz) { return std::norm(zz) + 0.4 * zz.real(); };
  planar.radius = 1.0;
  prev = 0.0;
  for (int degree : {2, 4, 8, 16}) {
    const auto basis = bg::orthonormalize(bg::gram_matrix_planar(planar, degree));
    const double k = bg::kernel_diag(basis, z);
    CHECK(k >= prev - 1e-12 * std::fabs(k));
    prev = k;
  }
}

TEST_CASE("kernel is monotone under domain inclusion at matched degree") {
  const auto small = w::ReinhardtDomain::polydisk({1.0});
  const auto large = w::ReinhardtDomain::polydisk({2.0});
  const auto weight = w::RadialWeight::gaussian(1, 0.7);
  const std::vector<complexd> z{complexd(0.4, 0.25)};
  for (int degree : {4, 8, 16, 32}) {
    const auto ks = bg::kernel_diag(
        bg::orthonormalize(bg::gram_matrix(small, weight, degree)), z);
    const auto kl = bg::kernel_diag(
        bg::orthonormalize(bg::gram_matrix(large, weight, degree)), z);
    CHECK(kl <= ks * (1.0 + 1e-12));
  }
}

TEST_CASE("planar path agrees with the diagonal path on a radial weight") {
  const double a = 0.8;
  w::PlanarWeight planar;
  planar.u = [a](complexd z) { return a * std::norm(z); };
  planar.radius = 1.0;
  const auto dense_basis = bg::orthonormalize(bg::gram_matrix_planar(planar, 24));
  const auto diag_basis = bg::orthonormalize(bg::gram_matrix(
      w::ReinhardtDomain::unit_disk(), w::RadialWeight::gaussian(1, a), 24));

  const std::vector<complexd> z{complexd(0.3, 0.2)};
  const std::vector<complexd> v{complexd(0.6, -0.8)};
  CHECK(bg::kernel_diag(dense_basis, z) ==
        doctest::Approx(bg::kernel_diag(diag_basis, z)).epsilon(1e-10));
  CHECK(bg::tilde_kernel(dense_basis, z, v) ==
        doctest::Approx(bg::tilde_kernel(diag_basis, z, v)).epsilon(1e-9));
  CHECK(bg::bergman_metric(dense_basis, z, v) ==
        doctest::Approx(bg::bergman_metric(diag_basis, z, v)).epsilon(1e-9));
  for (int m = 0; m <= 6; ++m)
    CHECK(bg::taylor_kernel_at_zero(dense_basis, m) ==
          doctest::Approx(bg::taylor_kernel_at_zero(diag_basis, m))
              .epsilon(1e-9));
}

TEST_CASE("metric from the kernel ratio matches finite differences of log K") {
  Rng rng(77);
  const auto disk = w::ReinhardtDomain::unit_disk();
  const auto weight = w::RadialWeight::from_profiles(
      {w::polynomial_profile({0.0, 1.0, 0.3})}, disk);
  const auto basis = bg::orthonormalize(bg::gram_matrix(disk, weight, 48));
  for (int trial = 0; trial < 25; ++trial) {
    const double r = 0.7 * std::sqrt(rng.uniform());
    const double th = rng.uniform(0.0, 2.0 * kPi);
    const std::vector<complexd> z{std::polar(r, th)};
    const std::vector<complexd> v{std::polar(1.0, rng.uniform(0.0, 2.0 * kPi))};
    const double ratio = bg::bergman_metric(basis, z, v);
    const double fd = bg::bergman_metric_fd(basis, z, v);
    CHECK(std::fabs(ratio - fd) < 1e-3 * std::fabs(ratio));
  }

  // dense path too
  w::PlanarWeight planar;
  planar.u = [](complexd zz) { return std::norm(zz) + 0.5 * zz.real(); };
  planar.radius = 1.0;
  const auto dense = bg::orthonormalize(bg::gram_matrix_planar(planar, 20));
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<complexd> z{std::polar(0.6 * std::sqrt(rng.uniform()),
                                             rng.uniform(0.0, 2.0 * kPi))};
    const std::vector<complexd> v{std::polar(1.0, rng.uniform(0.0, 2.0 * kPi))};
    const double ratio = bg::bergman_metric(dense, z, v);
    const double fd = bg::bergman_metric_fd(dense, z, v);
    CHECK(std::fabs(ratio - fd) < 1e-3 * std::fabs(ratio));
  }
}

TEST_CASE("Taylor coefficient functionals on the unweighted disk") {
  const auto disk = w::ReinhardtDomain::unit_disk();
  const auto basis =
      bg::orthonormalize(bg::gram_matrix(disk, w::RadialWeight::zero(1), 12));
  for (int m = 0; m <= 12; ++m)
    CHECK(bg::taylor_kernel_at_zero(basis, m) ==
          doctest::Approx((m + 1) / kPi).epsilon(1e-12));
}

TEST_CASE("adaptive truncation converges and reports its degree") {
  const auto disk = w::ReinhardtDomain::unit_disk();
  const auto value =
      bg::kernel_at(disk, w::RadialWeight::zero(1), pt({complexd(0.5, 0.0)}),
                    pt({complexd(1.0, 0.0)}));
  CHECK(value.kernel ==
        doctest::Approx(1.0 / (kPi * 0.75 * 0.75)).epsilon(1e-8));
  CHECK(value.metric == doctest::Approx(2.0 / (0.75 * 0.75)).epsilon(1e-6));
  CHECK(value.degree >= 16);
  CHECK(value.tilde == doctest::Approx(value.metric * value.kernel));

  // a point close to the boundary cannot stabilize with a tiny degree cap
  bg::TruncationOptions tight;
  tight.max_degree = 16;
  CHECK_THROWS_AS(bg::kernel_at(disk, w::RadialWeight::zero(1),
                                pt({complexd(0.9, 0.0)}), {}, tight),
                  NonConvergent);
  CHECK_THROWS_AS(bg::kernel_at(disk, w::RadialWeight::zero(1),
                                pt({complexd(1.0, 0.0)}), {}),
                  PreconditionViolation);
}

TEST_CASE("ill-conditioned dense factorizations are reported or retired") {
  w::PlanarWeight tiny;
  tiny.u = [](complexd) { return 0.0; };
  tiny.radius = 0.1;  // moments r^{2j} collapse fast: huge condition numbers
  CHECK_THROWS_AS(bg::orthonormalize(bg::gram_matrix_planar(tiny, 16)),
                  IllConditioned);

  // the adaptive loop keeps the last degree that factored cleanly
  bg::TruncationOptions opts;
  opts.start_degree = 4;
  const auto value = bg::kernel_at(tiny, complexd(0.05, 0.0), complexd(0, 0), opts);
  CHECK(value.degree == 4);
  const double exact = 0.01 / (kPi * std::pow(0.01 - 0.0025, 2.0));
  CHECK(value.kernel == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("Demailly approximations of a Gaussian weight converge uniformly") {
  const auto disk = w::ReinhardtDomain::unit_disk();
  const double a = 1.0;
  const auto weight = w::RadialWeight::gaussian(1, a);

  // center value has a closed form
  for (int k : {2, 8, 32}) {
    const double got =
        bg::demailly_approx(disk, weight, k, pt({complexd(0.0, 0.0)}));
    const double exact =
        std::log(k * a / (kPi * (1.0 - std::exp(-k * a)))) / k;
    CHECK(got == doctest::Approx(exact).epsilon(1e-10));
  }

  // sup over a grid of |u_k - u| decays like log k / k. The grid must reach
  // near the boundary: that is where the approximation is worst, and the
  // constant fitted at k = 8 has to be dominated by it (a center-only grid
  // has errors (log k + log(a/pi))/k whose negative offset defeats the fit).
  std::vector<std::vector<complexd>> grid;
  for (double r : {0.0, 0.15, 0.3, 0.45, 0.6, 0.75, 0.85, 0.9, 0.95})
    grid.push_back(pt({std::polar(r, 0.37)}));
  double prev_sup = 1e300;
  double c_fit = 0.0;
  for (int k : {8, 16, 32}) {
    double sup = 0.0;
    for (const auto& z : grid) {
      const double uk = bg::demailly_approx(disk, weight, k, z);
      const double u = a * std::norm(z[0]);
      sup = std::max(sup, std::fabs(uk - u));
    }
    if (k == 8) c_fit = sup * 8.0 / std::log(8.0);
    CHECK(sup <= prev_sup * (1.0 + 1e-12));
    CHECK(sup <= c_fit * std::log(double(k)) / k * (1.0 + 1e-9));
    prev_sup = sup;
  }

  // monotone in the domain: a larger polydisk gives a smaller approximation
  const auto bigger = w::ReinhardtDomain::polydisk({2.0});
  const std::vector<complexd> z{complexd(0.35, 0.1)};
  for (int k : {4, 16}) {
    const auto scaled = weight.scaled(k);
    const auto on_small =
        bg::orthonormalize(bg::gram_matrix(disk, scaled, 32));
    const auto on_large =
        bg::orthonormalize(bg::gram_matrix(bigger, scaled, 32));
    CHECK(bg::log_kernel_diag(on_large, z) <=
          bg::log_kernel_diag(on_small, z) + 1e-12);
  }
}
