#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "berglab/errors.hpp"
#include "berglab/report.hpp"
#include "berglab/rng.hpp"
#include "berglab/toric.hpp"
#include "berglab/weights.hpp"

using namespace berglab;
namespace w = berglab::weights;
using toric::BergmanDensity;
using toric::SpectrumOptions;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950;
constexpr double kTwoPi = 2.0 * kPi;

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// log of 2π · j! (k-j)! / (k+1)!  — the monomial norms of the round metric
double round_log_norm(int k, int j) {
  return std::log(kTwoPi) + std::lgamma(j + 1.0) + std::lgamma(k - j + 1.0) -
         std::lgamma(k + 2.0);
}

// a crossing pair: relative potential of phi decreases strictly from 0 to -s,
// psi sits at the constant -s/2, so {psi <= phi} is a single left half-line
w::ToricPotential crossing_phi() { return w::ToricPotential::test_potential(0.5, 1.0); }
w::ToricPotential crossing_psi() { return w::ToricPotential::constant_shift(-0.25); }

// seeded full-mass potential built from a three-part sigmoid slope mixture
w::ToricPotential random_mixture(Rng& rng) {
  std::vector<double> weight(3), scale(3), center(3);
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    weight[i] = 0.2 + rng.uniform();
    total += weight[i];
    scale[i] = 0.3 + 0.7 * rng.uniform();
    center[i] = rng.uniform(-3.0, 3.0);
  }
  for (double& x : weight) x /= total;
  return w::ToricPotential::sigmoid_mixture(weight, scale, center);
}

}  // namespace

TEST_CASE("round-metric monomial norms match the Beta closed form") {
  for (int k : {1, 5, 20}) {
    const auto spec = toric::hilbert_norms(w::ToricPotential::fubini_study(), k);
    REQUIRE(spec.size() == k + 1);
    CHECK(spec.window > 20.0);  // the log-measure tail forces a wide window
    for (int j = 0; j <= k; ++j) {
      CHECK(std::abs(spec.log_norms[j] - round_log_norm(k, j)) < 1e-11);
    }
  }
  // k = 1, j = 0: 2π · 0! 1! / 2! = π
  const auto spec = toric::hilbert_norms(w::ToricPotential::fubini_study(), 1);
  CHECK(std::exp(spec.log_norms[0]) == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("high level k=500 stays accurate through the window growth") {
  const auto spec = toric::hilbert_norms(w::ToricPotential::fubini_study(), 500);
  CHECK(spec.window > 60.0);
  for (int j : {0, 1, 137, 250, 499, 500}) {
    CHECK(std::abs(spec.log_norms[j] - round_log_norm(500, j)) < 2e-11);
  }
}

TEST_CASE("window cap and level preconditions") {
  SpectrumOptions tight;
  tight.max_window = 25.0;
  CHECK_THROWS_AS(
      toric::hilbert_norms(w::ToricPotential::fubini_study(), 200, tight),
      NonConvergent);
  CHECK_THROWS_AS(toric::hilbert_norms(w::ToricPotential::fubini_study(), 0),
                  PreconditionViolation);
}

TEST_CASE("adding a constant to the potential shifts norms and nothing else") {
  const double c = 0.4;
  const int k = 7;
  const auto base = toric::bergman_density(w::ToricPotential::fubini_study(), k);
  const auto shifted =
      toric::bergman_density(w::ToricPotential::constant_shift(c), k);
  for (int j = 0; j <= k; ++j) {
    CHECK(std::abs(shifted.spectrum().log_norms[j] -
                   (base.spectrum().log_norms[j] - k * c)) < 1e-10);
  }
  for (double t : {-1.3, 0.0, 2.0}) {
    const auto p0 = base.at(t);
    const auto p1 = shifted.at(t);
    CHECK(p1.kernel == doctest::Approx(p0.kernel).epsilon(1e-11));
    CHECK(p1.m_density == doctest::Approx(p0.m_density).epsilon(1e-11));
    CHECK(std::abs((p1.potential - c) - p0.potential) < 1e-11);
    CHECK(p1.metric_ratio == doctest::Approx(p0.metric_ratio).epsilon(1e-10));
  }
}

TEST_CASE("round metric: constant kernel, binomial moments, unit metric ratio") {
  for (int k : {1, 5, 50}) {
    const auto den = toric::bergman_density(w::ToricPotential::fubini_study(), k);
    const double flat = (k + 1) / kTwoPi;
    for (double t : {-3.0, 0.0, 1.7}) {
      const auto p = den.at(t);
      CHECK(std::abs(p.kernel - flat) < 1e-9 * flat);
      CHECK(std::abs(p.m_density - (k + 1.0) / k) < 1e-9);
      CHECK(std::abs(p.metric_ratio - 1.0) < 1e-9);
      // p_t(j) is Binomial(k, σ(t)) for the round metric
      CHECK(p.mean_j == doctest::Approx(k * sigmoid(t)).epsilon(1e-10));
      CHECK(p.var_j ==
            doctest::Approx(k * sigmoid(t) * (1.0 - sigmoid(t))).epsilon(1e-9));
      CHECK(std::abs(den.psi(t) - (std::log(flat) / k + w::fs_potential(t))) <
            1e-10);
    }
  }
  const auto den5 = toric::bergman_density(w::ToricPotential::fubini_study(), 5);
  CHECK(den5.at(0.0).var_j == doctest::Approx(1.25).epsilon(1e-10));
}

TEST_CASE("total mass and metric-ratio mass identities") {
  Rng rng(4401);
  const std::vector<w::ToricPotential> family = {
      w::ToricPotential::fubini_study(),
      w::ToricPotential::test_potential(0.5, 1.0),
      w::ToricPotential::constant_shift(0.4), random_mixture(rng)};
  for (const auto& phi : family) {
    for (int k : {5, 50}) {
      const auto den = toric::bergman_density(phi, k);
      CHECK(std::abs(den.total_mass() - kTwoPi * (k + 1.0) / k) < 1e-8);
      CHECK(std::abs(den.metric_ratio_mass() - kTwoPi) < 1e-8);
    }
  }
}

TEST_CASE("quantized potential equals the supremum over unit sections") {
  const auto phi = w::ToricPotential::test_potential(0.5, 1.0);
  const int k = 12;
  const auto den = toric::bergman_density(phi, k);
  const auto& ln = den.spectrum().log_norms;
  std::vector<double> norms(ln.size());
  for (size_t j = 0; j < ln.size(); ++j) norms[j] = std::exp(ln[j]);

  Rng rng(909);
  for (double t : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
    const double target = den.at(t).potential;  // (1/k) log K, relative scale
    // the matched section c_j = e^{jt/2} / (norms_j √T) has unit norm and
    // attains the supremum
    double trace = 0.0;
    for (int j = 0; j <= k; ++j) trace += std::exp(j * t) / norms[j];
    std::vector<double> c(k + 1);
    for (int j = 0; j <= k; ++j) {
      c[j] = std::exp(0.5 * j * t) / (norms[j] * std::sqrt(trace));
    }
    double h_norm2 = 0.0, point_sum = 0.0;
    for (int j = 0; j <= k; ++j) {
      h_norm2 += c[j] * c[j] * norms[j];
      point_sum += c[j] * std::exp(0.5 * j * t);
    }
    CHECK(std::abs(h_norm2 - 1.0) < 1e-12);
    const double attained =
        (2.0 * std::log(point_sum)) / k - w::fs_potential(t);
    CHECK(std::abs(attained - target) < 1e-9);

    // no random unit section beats it
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::complex<double>> g(k + 1);
      double norm2 = 0.0;
      for (int j = 0; j <= k; ++j) {
        g[j] = {rng.normal(), rng.normal()};
        norm2 += std::norm(g[j]) * norms[j];
      }
      std::complex<double> value = 0.0;
      for (int j = 0; j <= k; ++j) value += g[j] * std::exp(0.5 * j * t);
      const double candidate =
          (std::log(std::norm(value)) - std::log(norm2)) / k -
          w::fs_potential(t);
      CHECK(candidate <= target + 1e-9);
    }
  }
}

TEST_CASE("metric ratio agrees with second differences of the log trace") {
  const auto phi = w::ToricPotential::test_potential(0.5, 1.0);
  const auto den = toric::bergman_density(phi, 25);
  const double h = 1e-3;
  for (double t : {-1.5, 0.0, 0.8}) {
    const auto second = [&](double step) {
      return (den.psi(t + step) - 2.0 * den.psi(t) + den.psi(t - step)) /
             (step * step);
    };
    // Richardson: (4 D(h) - D(2h)) / 3 removes the h² truncation term
    const double psi_dd = (4.0 * second(h) - second(2.0 * h)) / 3.0;
    const double fd_ratio = psi_dd / w::fs_curvature(t);
    CHECK(fd_ratio == doctest::Approx(den.at(t).metric_ratio).epsilon(1e-6));
  }
}

TEST_CASE("curvature bracket: round metric has unit ratios and constant 1/2") {
  const auto rep = toric::check_theorem_c11(w::ToricPotential::fubini_study(),
                                            {1.0, 1.0}, {25, 50});
  REQUIRE(rep.levels.size() == 2);
  for (const auto& lvl : rep.levels) {
    CHECK(std::abs(lvl.min_ratio - 1.0) < 1e-9);
    CHECK(std::abs(lvl.max_ratio - 1.0) < 1e-9);
    CHECK(std::abs(lvl.extracted_constant - 0.5) < 1e-8);
    // sup |P^k - 0| = log((k+1)/2π) / k for the round metric
    const double expected =
        std::abs(std::log((lvl.k + 1) / kTwoPi)) / lvl.k;
    CHECK(lvl.sup_potential_error == doctest::Approx(expected).epsilon(1e-8));
  }
  CHECK(std::abs(rep.stability_ratio - 1.0) < 1e-8);
  CHECK(report::all_pass(rep.reports));
}

TEST_CASE("curvature bracket: blended potential passes with stable constant") {
  const auto phi = w::ToricPotential::test_potential(0.5, 1.0);
  const auto bounds = w::test_potential_bounds(0.5, 1.0);
  const auto rep = toric::check_theorem_c11(phi, bounds, {25, 50});
  CHECK(rep.constant > 0.0);
  CHECK(rep.stability_ratio >= 1.0);
  CHECK(rep.stability_ratio <= 2.0);
  CHECK(rep.levels[1].sup_potential_error <= rep.levels[0].sup_potential_error);
  CHECK(report::all_pass(rep.reports));
}

TEST_CASE("curvature bracket preconditions") {
  CHECK_THROWS_AS(toric::check_theorem_c11(w::ToricPotential::fubini_study(),
                                           {1.2, 1.0}, {10}),
                  PreconditionViolation);
  // declared floor above the true curvature ratio must be rejected
  CHECK_THROWS_AS(toric::check_theorem_c11(
                      w::ToricPotential::test_potential(0.5, 1.0), {1.0, 2.0},
                      {10}),
                  PreconditionViolation);
}

TEST_CASE("nonnegative interval detection") {
  const auto parabola = [](double t) { return 0.25 - t * t; };
  auto iv = toric::nonnegative_intervals(parabola, -1.0, 1.0, 401);
  REQUIRE(iv.size() == 1);
  CHECK(std::abs(iv[0].first + 0.5) < 1e-9);
  CHECK(std::abs(iv[0].second - 0.5) < 1e-9);

  CHECK(toric::nonnegative_intervals([](double) { return -1.0; }, 0.0, 1.0, 51)
            .empty());

  iv = toric::nonnegative_intervals([](double) { return 1.0; }, 0.0, 1.0, 51);
  REQUIRE(iv.size() == 1);
  CHECK(iv[0].first == 0.0);
  CHECK(iv[0].second == 1.0);

  iv = toric::nonnegative_intervals([](double t) { return t; }, -1.0, 1.0, 101);
  REQUIRE(iv.size() == 1);
  CHECK(std::abs(iv[0].first) < 1e-9);
  CHECK(iv[0].second == 1.0);

  // two humps
  iv = toric::nonnegative_intervals(
      [](double t) { return std::sin(t); }, 0.1, 4.0 * kPi - 0.1, 2001);
  REQUIRE(iv.size() == 2);
  CHECK(std::abs(iv[0].second - kPi) < 1e-9);
  CHECK(std::abs(iv[1].first - kTwoPi) < 1e-9);
}

TEST_CASE("equilibrium mass comparison: identical and shifted potentials") {
  const int k = 20;
  const auto phi = w::ToricPotential::fubini_study();
  const auto same = toric::berndtsson_check(phi, phi, k);
  REQUIRE(same.region.size() == 1);
  CHECK(std::abs(same.lhs - same.rhs) < 1e-9);
  CHECK(std::abs(same.lhs - kTwoPi * (k + 1.0) / k) < 1e-7);
  CHECK(same.report.pass);

  // a constant shift keeps the equilibrium measure, so masses stay equal
  const auto shifted =
      toric::berndtsson_check(phi, w::ToricPotential::constant_shift(-0.3), k);
  REQUIRE(shifted.region.size() == 1);
  CHECK(std::abs(shifted.lhs - shifted.rhs) < 1e-8);
  CHECK(shifted.report.pass);
}

TEST_CASE("equilibrium mass comparison: crossing pair is strict") {
  const int k = 30;
  const auto res = toric::berndtsson_check(crossing_phi(), crossing_psi(), k);
  REQUIRE(res.region.size() == 1);
  // {psi <= phi} is a left half-line; the crossing solves
  // φ_FS(t) - φ_FS(t-1) = 1/2, i.e. t = 1/2 by the symmetry
  // φ_FS(t) - φ_FS(-t) = t
  CHECK(std::abs(res.region[0].second - 0.5) < 1e-9);
  CHECK(res.lhs > 0.1);
  CHECK(res.rhs > res.lhs);  // strictly monotone here
  CHECK(res.report.pass);

  // empty region: phi strictly below psi everywhere
  const auto empty = toric::berndtsson_check(
      crossing_phi(), w::ToricPotential::fubini_study(), k);
  CHECK(empty.region.empty());
  CHECK(empty.lhs == 0.0);
  CHECK(empty.rhs == 0.0);
  CHECK(empty.report.pass);
}

TEST_CASE("equilibrium mass comparison: seeded potential pairs") {
  Rng rng(20260815);
  for (int pair = 0; pair < 4; ++pair) {
    const auto phi = random_mixture(rng);
    const auto psi = random_mixture(rng);
    const auto res = toric::berndtsson_check(phi, psi, 40);
    CHECK(res.report.pass);
    CHECK(res.lhs >= 0.0);
    CHECK(res.rhs <= kTwoPi * 41.0 / 40.0 + 1e-6);
  }
}

TEST_CASE("level mismatch is rejected") {
  const auto phi = w::ToricPotential::fubini_study();
  const auto d5 = toric::bergman_density(phi, 5);
  const auto d6 = toric::bergman_density(phi, 6);
  CHECK_THROWS_AS(toric::berndtsson_check(d5, d6), LevelMismatch);
}

TEST_CASE("pointwise density comparison on the upper region") {
  // psi >= phi everywhere: max(phi, psi) = psi, so the ratio is exactly 1
  const auto flat = toric::berndtsson_pointwise_check(
      crossing_phi(), w::ToricPotential::fubini_study(), 20);
  CHECK(flat.computed == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(flat.pass);

  // genuine crossing: the max potential has a slope kink at the crossing
  const auto crossed =
      toric::berndtsson_pointwise_check(crossing_phi(), crossing_psi(), 30);
  CHECK(crossed.pass);
  CHECK(crossed.computed > 0.5);
  CHECK(crossed.computed <= 1.0 + 1e-9);
}

TEST_CASE("level doubling: round metric closed form and defect decay") {
  const auto base = toric::doubling_check(w::ToricPotential::fubini_study(), 10);
  // 2 · (21/20) / (11/10) = 21/11 uniformly in t
  CHECK(base.min_ratio == doctest::Approx(21.0 / 11.0).epsilon(1e-9));
  CHECK(base.epsilon == doctest::Approx(-10.0 / 11.0).epsilon(1e-9));
  CHECK(base.report.pass);
  // general closed form for the round metric: ε_k = -k/(k+1)
  CHECK(toric::doubling_check(w::ToricPotential::fubini_study(), 20).epsilon ==
        doctest::Approx(-20.0 / 21.0).epsilon(1e-9));

  // the deviation from the asymptotic ratio shrinks with the level (the sign
  // of the approach depends on the potential, so the defect is compared in
  // magnitude)
  const auto phi = w::ToricPotential::test_potential(0.5, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int k : {10, 20, 40}) {
    const auto res = toric::doubling_check(phi, k);
    CHECK(res.report.pass);
    CHECK(std::fabs(res.epsilon) <= prev + 1e-9);
    prev = std::fabs(res.epsilon);
  }
}

TEST_CASE("quantum density floor") {
  const auto round = toric::lower_bound_check(
      w::ToricPotential::fubini_study(), 1.0, 20);
  CHECK(round.min_ratio == doctest::Approx(21.0 / 20.0).epsilon(1e-9));
  CHECK(round.epsilon == doctest::Approx(-0.05).epsilon(1e-7));
  CHECK(round.report.pass);

  const auto phi = w::ToricPotential::test_potential(0.5, 1.0);
  const double floor = w::test_potential_bounds(0.5, 1.0).a;
  const auto res = toric::lower_bound_check(phi, floor * 0.99, 40);
  CHECK(res.report.pass);
  CHECK(res.min_ratio > 0.0);

  // defect magnitude shrinks with the level
  const auto e25 = toric::lower_bound_check(phi, 0.5, 25);
  const auto e100 = toric::lower_bound_check(phi, 0.5, 100);
  CHECK(std::fabs(e100.epsilon) < std::fabs(e25.epsilon));

  CHECK_THROWS_AS(toric::lower_bound_check(phi, 1.2, 10), PreconditionViolation);
}

TEST_CASE("sublevel tail mass") {
  const auto round = w::ToricPotential::fubini_study();
  const auto den = toric::bergman_density(round, 20);
  CHECK(toric::tail_mass(den, -1.0) == 0.0);
  CHECK(std::abs(toric::tail_mass(den, 1.0) - kTwoPi * 21.0 / 20.0) < 1e-7);

  const auto phi = w::ToricPotential::test_potential(0.5, 1.0);
  const auto dphi = toric::bergman_density(phi, 30);
  const double total = dphi.total_mass();
  const double partial = toric::tail_mass(dphi, -0.25);
  CHECK(partial > 0.0);
  CHECK(partial < total);
  CHECK(toric::tail_mass(dphi, -0.4) <= toric::tail_mass(dphi, -0.1));
  CHECK(std::abs(toric::tail_mass(dphi, 0.1) - total) < 1e-8);
}

TEST_CASE("equilibrium measure of a potential") {
  const auto round = toric::ma_measure(w::ToricPotential::fubini_study());
  for (double t : {-2.0, 0.0, 1.3}) {
    CHECK(round.cdf(t) == doctest::Approx(kTwoPi * sigmoid(t)).epsilon(1e-12));
    CHECK(round.density(t) ==
          doctest::Approx(kTwoPi * w::fs_curvature(t)).epsilon(1e-12));
  }
  CHECK(round.cdf(-40.0) < 1e-10);
  CHECK(std::abs(round.cdf(40.0) - kTwoPi) < 1e-10);

  const auto phi = w::ToricPotential::test_potential(0.5, 1.0);
  const auto mu = toric::ma_measure(phi);
  for (double t : {-1.0, 0.5}) {
    const double expected =
        kTwoPi * (0.5 * w::fs_curvature(t) + 0.5 * w::fs_curvature(t - 1.0));
    CHECK(mu.density(t) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(!mu.name.empty());
}
