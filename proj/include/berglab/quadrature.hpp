#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace berglab::weights {
struct ReinhardtDomain;
struct RadialWeight;
}  // namespace berglab::weights

namespace berglab::quadrature {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A 1-D integral specification. Endpoints may be +/-infinity; semi-infinite
// pieces are folded onto (0,1) through rho = s/(1-s). Breakpoints mark
// interior points (kinks, sharp peaks) where the integrand deserves an
// initial subdivision.
struct Integrand1D {
  std::function<double(double)> f;
  double lower = 0.0;
  double upper = 1.0;
  std::vector<double> breakpoints{};
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct Options {
  // accepted when error_estimate <= max(tol*|value|, tol)
  double tol = 1e-10;
  std::size_t max_evaluations = 8'000'000;
};

// Deterministic adaptive Gauss-Kronrod (7-15). Throws NonConvergent when the
// evaluation budget runs out before the tolerance target is met.
QuadratureResult integrate(const Integrand1D& q, const Options& opts = {});
QuadratureResult integrate(const std::function<double(double)>& f, double lower,
                           double upper, double tol = 1e-10);

// log( integral_0^{s_max} s^power * exp(-g(s)) ds ), evaluated with the
// integrand normalized at its peak so huge scale factors never leave log
// space. power >= 0; g arbitrary continuous.
double log_power_integral(const std::function<double(double)>& g, double s_max,
                          double power, double tol = 1e-10);

// Fixed composite 15-point Gauss-Kronrod rule: `panels` equal subintervals of
// [a, b], 15 nodes each, returned as (node, weight) pairs in ascending node
// order. For building tensor-product rules where every integrand shares the
// same nodes.
std::vector<std::pair<double, double>> gk15_panel_rule(double a, double b,
                                                       int panels);

// Monomial moments int_Omega |z^alpha|^2 e^{-u} dlambda for product-radial
// weights. Polydisks factor into per-coordinate radial integrals; balls
// require a globally radial weight (all profiles linear with equal slope).
double log_moment(const weights::ReinhardtDomain& domain,
                  const weights::RadialWeight& weight, std::span<const int> alpha,
                  double tol = 1e-10);
double moment(const weights::ReinhardtDomain& domain,
              const weights::RadialWeight& weight, std::span<const int> alpha,
              double tol = 1e-10);

}  // namespace berglab::quadrature
