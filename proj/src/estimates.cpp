#include "berglab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "berglab/errors.hpp"
#include "berglab/quadrature.hpp"
#include "berglab/rng.hpp"

namespace berglab::estimates {

namespace quad = berglab::quadrature;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool cond, const char* msg) {
  if (!cond) throw PreconditionViolation(msg);
}

double factorial(int m) { return std::tgamma(static_cast<double>(m) + 1.0); }

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Incomplete gamma and the sharp extension constant

double lower_incomplete_gamma(int s, double x) {
  require(s >= 1, "lower_incomplete_gamma: s must be a positive integer");
  require(x >= 0.0, "lower_incomplete_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < static_cast<double>(s) + 1.0) {
    // γ(s,x) = x^s e^{−x} Σ_{k≥0} x^k / (s(s+1)...(s+k)); all terms positive,
    // ratio x/(s+k) < 1 in this branch so the tail is geometric.
    double term = 1.0 / static_cast<double>(s);
    double sum = term;
    for (int k = 1; k < 10000; ++k) {
      term *= x / static_cast<double>(s + k);
      sum += term;
      if (term < sum * 1e-18) break;
    }
    return std::pow(x, s) * std::exp(-x) * sum;
  }
  // γ(s,x) = Γ(s)(1 − e^{−x} Σ_{i<s} x^i/i!); the subtracted tail is < 1/2
  // when x ≥ s + 1, so no cancellation.
  double tail = 0.0;
  double term = 1.0;  // x^i / i! at i = 0
  for (int i = 0; i < s; ++i) {
    tail += term;
    term *= x / static_cast<double>(i + 1);
  }
  return factorial(s - 1) * (1.0 - std::exp(-x) * tail);
}

double ot_constant(double a, int m) {
  require(a >= 0.0, "ot_constant: a must be >= 0");
  require(m >= 0, "ot_constant: m must be >= 0");
  if (a == 0.0) return kPi / static_cast<double>(m + 1);
  return kPi * lower_incomplete_gamma(m + 1, a) / std::pow(a, m + 1);
}

report::BoundReport ot_tightness(double a, int m) {
  const auto domain = weights::ReinhardtDomain::unit_disk();
  const auto weight = weights::RadialWeight::gaussian(1, a);
  const int degree = std::max(m, 2);
  const auto basis =
      bergman::orthonormalize(bergman::gram_matrix(domain, weight, degree));
  const double value = bergman::taylor_kernel_at_zero(basis, m);
  const double product = value * ot_constant(a, m);
  std::ostringstream note;
  note << "derivative order m=" << m << ", a=" << format_double(a)
       << ", product=" << report::format_g17(product);
  return report::BoundReport::upper("ot_tightness(a=" + format_double(a) +
                                        ",m=" + std::to_string(m) + ")",
                                    std::abs(product - 1.0), 1e-8, note.str());
}

// ---------------------------------------------------------------------------
// Polydisk lower bounds

PolydiskLowerBounds polydisk_lower_bounds(int n, double a, double u0) {
  require(n >= 1, "polydisk_lower_bounds: n must be >= 1");
  require(a > 0.0, "polydisk_lower_bounds: a must be > 0");
  const double denom = std::pow(kPi * (1.0 - std::exp(-a)), n);
  PolydiskLowerBounds b;
  b.kernel = std::pow(a, n) * std::exp(u0) / denom;
  b.tilde = std::pow(a, n + 1) * std::exp(u0) / denom;
  return b;
}

PolydiskLowerBounds polydisk_lower_bounds_weak(int n, double a, double u0) {
  require(n >= 1, "polydisk_lower_bounds_weak: n must be >= 1");
  require(a >= 0.0, "polydisk_lower_bounds_weak: a must be >= 0");
  const double denom = std::pow(kPi, n);
  PolydiskLowerBounds b;
  b.kernel = std::pow(a, n) * std::exp(u0) / denom;
  b.tilde = std::pow(a, n + 1) * std::exp(u0) / denom;
  return b;
}

// ---------------------------------------------------------------------------
// Mean-value upper bounds

double sphere_surface(int n, double rho) {
  require(n >= 1, "sphere_surface: n must be >= 1");
  require(rho >= 0.0, "sphere_surface: rho must be >= 0");
  return 2.0 * std::pow(kPi, n) * std::pow(rho, 2 * n - 1) / factorial(n - 1);
}

namespace {

// Mean over the sphere of radius rho (centered at the origin) of a sum of
// per-coordinate radial profiles.  On the unit sphere of ℂⁿ each |v_i|² has
// the Beta(1, n−1) marginal with density (n−1)(1−b)^{n−2} on [0, 1].
double centered_radial_sphere_mean(const weights::RadialWeight& w, double rho,
                                   double tol) {
  const int n = w.dimension();
  const double r2 = rho * rho;
  if (n == 1) return w.profiles[0].g(r2);
  double mean = 0.0;
  for (const auto& profile : w.profiles) {
    quad::Integrand1D marginal;
    marginal.f = [&profile, r2, n](double b) {
      return profile.g(r2 * b) * static_cast<double>(n - 1) *
             std::pow(1.0 - b, n - 2);
    };
    marginal.lower = 0.0;
    marginal.upper = 1.0;
    quad::Options opts;
    opts.tol = tol;
    mean += quad::integrate(marginal, opts).value;
  }
  return mean;
}

double circle_mean(const std::function<double(complexd)>& u, complexd z,
                   double rho, int points) {
  double sum = 0.0;
  for (int j = 0; j < points; ++j) {
    const double theta = 2.0 * kPi * static_cast<double>(j) / points;
    sum += u(z + rho * complexd{std::cos(theta), std::sin(theta)});
  }
  return sum / points;
}

double jensen_bound(int n, double r, double tol,
                    const std::function<double(double)>& sphere_mean) {
  quad::Integrand1D integrand;
  integrand.f = [n, &sphere_mean](double rho) {
    return sphere_surface(n, rho) * std::exp(-sphere_mean(rho));
  };
  integrand.lower = 0.0;
  integrand.upper = r;
  quad::Options opts;
  opts.tol = tol;
  const double mass = quad::integrate(integrand, opts).value;
  require(mass > 0.0, "bb_upper_bound: mean-value integral vanished");
  return 1.0 / mass;
}

}  // namespace

double bb_upper_bound(const weights::RadialWeight& weight, double r,
                      std::span<const complexd> z, double tol,
                      int circle_points) {
  require(r > 0.0, "bb_upper_bound: r must be > 0");
  const int n = weight.dimension();
  bool centered = true;
  for (const auto& zi : z) centered = centered && zi == complexd{0.0, 0.0};
  if (centered) {
    return jensen_bound(n, r, tol, [&](double rho) {
      return centered_radial_sphere_mean(weight, rho, tol);
    });
  }
  require(n == 1,
          "bb_upper_bound: off-center sphere means are only available in one "
          "variable");
  require(static_cast<int>(z.size()) == 1, "bb_upper_bound: point dimension");
  const complexd z0 = z[0];
  const std::function<double(complexd)> u =
      [g = weight.profiles[0].g](complexd w) { return g(std::norm(w)); };
  return jensen_bound(1, r, tol, [&](double rho) {
    return circle_mean(u, z0, rho, circle_points);
  });
}

double bb_upper_bound(const weights::PlanarWeight& weight, double r, complexd z,
                      double tol, int circle_points) {
  require(r > 0.0, "bb_upper_bound: r must be > 0");
  require(std::abs(z) + r <= weight.radius + 1e-12,
          "bb_upper_bound: the ball must sit inside the weight's disk");
  return jensen_bound(1, r, tol, [&](double rho) {
    return circle_mean(weight.u, z, rho, circle_points);
  });
}

double bb_upper_bound_laplacian(double u_at_z, double laplacian_sup, int n,
                                double r) {
  require(n >= 1, "bb_upper_bound_laplacian: n must be >= 1");
  require(r > 0.0, "bb_upper_bound_laplacian: r must be > 0");
  const double A = std::max(laplacian_sup, 0.0) / (4.0 * n);
  const double x = A * r * r;
  if (x < 1e-12) {
    // A → 0 limit: the unweighted volume bound e^{u} n!/(πⁿ r^{2n}).
    return std::exp(u_at_z) * factorial(n) /
           (std::pow(kPi, n) * std::pow(r, 2 * n));
  }
  // n ω_{2n} = πⁿ/(n−1)!
  const double n_omega = std::pow(kPi, n) / factorial(n - 1);
  return std::exp(u_at_z) * std::pow(A, n) /
         (n_omega * lower_incomplete_gamma(n, x));
}

// ---------------------------------------------------------------------------
// Sphere-mean lemma

double harmonic_number(int m) {
  require(m >= 0, "harmonic_number: m must be >= 0");
  double h = 0.0;
  for (int i = 1; i <= m; ++i) h += 1.0 / i;
  return h;
}

double sphere_log_constant(int n) {
  require(n >= 1, "sphere_log_constant: n must be >= 1");
  return std::exp(-harmonic_number(n - 1));
}

namespace {

// Uniform point on the unit sphere of ℂⁿ via 2n normalized Gaussians.
std::vector<complexd> sphere_point(int n, Rng& rng) {
  std::vector<complexd> v(n);
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    v[i] = complexd{rng.normal(), rng.normal()};
    norm2 += std::norm(v[i]);
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& vi : v) vi *= scale;
  return v;
}

struct RunningMean {
  double sum = 0.0;
  double sum_sq = 0.0;
  long count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  MonteCarloMean finish() const {
    MonteCarloMean out;
    out.samples = count;
    out.mean = sum / count;
    const double var =
        std::max(0.0, (sum_sq - count * out.mean * out.mean) / (count - 1));
    out.std_error = std::sqrt(var / count);
    return out;
  }
};

}  // namespace

MonteCarloMean sphere_log_mean_mc(int n, long samples, std::uint64_t seed) {
  require(n >= 1, "sphere_log_mean_mc: n must be >= 1");
  require(samples >= 2, "sphere_log_mean_mc: need at least 2 samples");
  Rng rng(seed);
  RunningMean acc;
  for (long s = 0; s < samples; ++s) {
    const auto v = sphere_point(n, rng);
    acc.add(std::log(std::norm(v[0])));
  }
  return acc.finish();
}

complexd Polynomial::eval(std::span<const complexd> z) const {
  require(static_cast<int>(z.size()) == n, "Polynomial::eval: dimension");
  complexd total{0.0, 0.0};
  for (const auto& term : terms) {
    require(static_cast<int>(term.alpha.size()) == n,
            "Polynomial: term exponent dimension");
    complexd monomial{1.0, 0.0};
    for (int i = 0; i < n; ++i)
      for (int p = 0; p < term.alpha[i]; ++p) monomial *= z[i];
    total += term.coeff * monomial;
  }
  return total;
}

std::vector<complexd> Polynomial::gradient_at_zero() const {
  std::vector<complexd> grad(n, complexd{0.0, 0.0});
  for (const auto& term : terms) {
    require(static_cast<int>(term.alpha.size()) == n,
            "Polynomial: term exponent dimension");
    int total_degree = 0, last_var = -1;
    for (int i = 0; i < n; ++i) {
      total_degree += term.alpha[i];
      if (term.alpha[i] > 0) last_var = i;
    }
    if (total_degree == 1) grad[last_var] += term.coeff;
  }
  return grad;
}

report::BoundReport check_lemma_sphere_mean(const Polynomial& f, double rho,
                                            long samples, std::uint64_t seed) {
  require(rho > 0.0, "check_lemma_sphere_mean: rho must be > 0");
  require(samples >= 2, "check_lemma_sphere_mean: need at least 2 samples");
  const std::vector<complexd> origin(f.n, complexd{0.0, 0.0});
  require(f.eval(origin) == complexd{0.0, 0.0},
          "check_lemma_sphere_mean: f(0) must vanish");
  const auto grad = f.gradient_at_zero();
  double grad_norm2 = 0.0;
  for (const auto& g : grad) grad_norm2 += std::norm(g);
  if (grad_norm2 == 0.0)
    throw DegenerateGradient(
        "check_lemma_sphere_mean: the gradient of f at 0 vanishes");

  Rng rng(seed);
  RunningMean acc;
  std::vector<complexd> w(f.n);
  for (long s = 0; s < samples; ++s) {
    double value = 0.0;
    for (int attempt = 0; attempt < 64 && value <= 0.0; ++attempt) {
      const auto v = sphere_point(f.n, rng);
      for (int i = 0; i < f.n; ++i) w[i] = rho * v[i];
      value = std::norm(f.eval(w));
    }
    require(value > 0.0, "check_lemma_sphere_mean: f vanished on 64 draws");
    acc.add(std::log(value));
  }
  const auto mc = acc.finish();
  const double lhs = mc.mean - 2.0 * std::log(rho);
  const double rhs = std::log(sphere_log_constant(f.n) * grad_norm2);
  std::ostringstream note;
  note << "Monte Carlo N=" << samples
       << ", std error=" << format_double(mc.std_error)
       << "; bound relaxed by 3 std errors + 1e-12 from "
       << report::format_g17(rhs);
  // The 1e-12 floor covers rounding noise in the sample mean when the
  // integrand is (numerically) constant and the standard error collapses.
  return report::BoundReport::lower("sphere_mean_lemma", lhs,
                                    rhs - 3.0 * mc.std_error - 1e-12,
                                    note.str());
}

// ---------------------------------------------------------------------------
// Two-sided kernel/metric bounds

namespace {

MtCase make_mt_case(std::string name, int n, const bergman::KernelValue& kv,
                    double u0, double a, double lap_sup, double v_norm2) {
  require(v_norm2 > 0.0, "check_theorem_mt: direction must be nonzero");
  MtCase c;
  c.name = std::move(name);
  c.dimension = n;
  c.kernel = kv.kernel;
  c.tilde = kv.tilde;
  c.metric = kv.metric;
  c.weight_at_z = u0;
  c.hessian_lower = a;
  c.m_factor = std::max(1.0, lap_sup);
  c.direction_norm2 = v_norm2;
  const double eu = std::exp(u0);
  const double mn = std::pow(c.m_factor, n);
  const double mn1 = std::pow(c.m_factor, n + 1);
  c.minimal_constant[0] = c.kernel / (eu * mn);
  c.minimal_constant[1] = c.tilde / (eu * mn1 * v_norm2);
  if (a > 0.0) {
    const double an = std::pow(a, n);
    const double an1 = std::pow(a, n + 1);
    c.minimal_constant[2] = eu * an / c.kernel;
    c.minimal_constant[3] = eu * an1 * v_norm2 / c.tilde;
    c.minimal_constant[4] = c.metric * an / (mn1 * v_norm2);
    c.minimal_constant[5] = an1 * v_norm2 / (c.metric * mn);
  } else {
    for (int q = 2; q < 6; ++q) c.minimal_constant[q] = kNaN;
  }
  return c;
}

MtFamilyResult assemble_family(std::vector<MtCase> cases) {
  MtFamilyResult out;
  out.cases = std::move(cases);
  std::array<double, 6> best{};
  for (int q = 0; q < 6; ++q) {
    out.worst_constant[q] = kNaN;
    best[q] = kNaN;
    out.stability_ratio[q] = kNaN;
    for (const auto& c : out.cases) {
      const double v = c.minimal_constant[q];
      if (std::isnan(v)) continue;
      if (std::isnan(out.worst_constant[q]) || v > out.worst_constant[q])
        out.worst_constant[q] = v;
      if (std::isnan(best[q]) || v < best[q]) best[q] = v;
    }
    if (!std::isnan(out.worst_constant[q]))
      out.stability_ratio[q] = out.worst_constant[q] / best[q];
  }

  for (const auto& c : out.cases) {
    const double eu = std::exp(c.weight_at_z);
    const double mn = std::pow(c.m_factor, c.dimension);
    const double mn1 = std::pow(c.m_factor, c.dimension + 1);
    const double w2 = c.direction_norm2;
    const auto name = [&](int q) {
      return std::string(kMtBoundNames[q]) + ":" + c.name;
    };
    const double cu0 = out.worst_constant[0];
    out.reports.push_back(report::BoundReport::upper(
        name(0), c.kernel, cu0 * eu * mn, "C=" + report::format_g17(cu0)));
    const double cu1 = out.worst_constant[1];
    out.reports.push_back(report::BoundReport::upper(
        name(1), c.tilde, cu1 * eu * mn1 * w2, "C=" + report::format_g17(cu1)));
    if (c.hessian_lower > 0.0) {
      const double an = std::pow(c.hessian_lower, c.dimension);
      const double an1 = std::pow(c.hessian_lower, c.dimension + 1);
      const double cl2 = out.worst_constant[2];
      out.reports.push_back(report::BoundReport::lower(
          name(2), c.kernel, eu * an / cl2, "C=" + report::format_g17(cl2)));
      const double cl3 = out.worst_constant[3];
      out.reports.push_back(report::BoundReport::lower(
          name(3), c.tilde, eu * an1 * w2 / cl3,
          "C=" + report::format_g17(cl3)));
      const double cu4 = out.worst_constant[4];
      out.reports.push_back(report::BoundReport::upper(
          name(4), c.metric, cu4 * mn1 * w2 / an,
          "C=" + report::format_g17(cu4)));
      const double cl5 = out.worst_constant[5];
      out.reports.push_back(report::BoundReport::lower(
          name(5), c.metric, an1 * w2 / (cl5 * mn),
          "C=" + report::format_g17(cl5)));
    }
  }
  for (int q = 0; q < 6; ++q) {
    if (std::isnan(out.stability_ratio[q])) continue;
    out.reports.push_back(report::BoundReport::upper(
        std::string("constant_stability:") + kMtBoundNames[q],
        out.stability_ratio[q], 2.0,
        "max/min of the minimal constant over " +
            std::to_string(out.cases.size()) + " weights"));
  }
  return out;
}

double norm2_of(std::span<const complexd> v) {
  double s = 0.0;
  for (const auto& vi : v) s += std::norm(vi);
  return s;
}

}  // namespace

std::vector<weights::RadialWeight> default_mt_family(int n) {
  std::vector<weights::RadialWeight> family;
  for (double a : {1.0, 1.15, 1.3})
    family.push_back(weights::RadialWeight::gaussian(n, a));
  return family;
}

MtFamilyResult check_theorem_mt(const weights::ReinhardtDomain& domain,
                                std::span<const weights::RadialWeight> family,
                                std::span<const complexd> z,
                                std::span<const complexd> v,
                                const bergman::TruncationOptions& opts) {
  require(!family.empty(), "check_theorem_mt: empty weight family");
  require(!v.empty(), "check_theorem_mt: a direction is required");
  std::vector<MtCase> cases;
  for (const auto& w : family) {
    const auto kv = bergman::kernel_at(domain, w, z, v, opts);
    cases.push_back(make_mt_case(w.name, w.dimension(), kv, w.value(z),
                                 w.hessian_lower, w.laplacian_sup,
                                 norm2_of(v)));
  }
  return assemble_family(std::move(cases));
}

MtFamilyResult check_theorem_mt(std::span<const weights::PlanarWeight> family,
                                complexd z, complexd v,
                                const bergman::TruncationOptions& opts) {
  require(!family.empty(), "check_theorem_mt: empty weight family");
  require(v != complexd{0.0, 0.0}, "check_theorem_mt: a direction is required");
  std::vector<MtCase> cases;
  for (const auto& w : family) {
    const auto kv = bergman::kernel_at(w, z, v, opts);
    const double a = w.hessian_lower.value_or(0.0);
    const double lap =
        w.laplacian_sup ? *w.laplacian_sup : w.laplacian_sup_estimate();
    cases.push_back(
        make_mt_case(w.name, 1, kv, w.u(z), a, lap, std::norm(v)));
  }
  return assemble_family(std::move(cases));
}

MtFamilyResult check_theorem_mt(const weights::ReinhardtDomain& domain,
                                const weights::RadialWeight& weight,
                                std::span<const complexd> z,
                                std::span<const complexd> v,
                                const weights::CurvatureBounds& bounds,
                                const bergman::TruncationOptions& opts) {
  require(!v.empty(), "check_theorem_mt: a direction is required");
  const int n = weight.dimension();
  const auto kv = bergman::kernel_at(domain, weight, z, v, opts);
  std::vector<MtCase> cases;
  cases.push_back(make_mt_case(weight.name, n, kv, weight.value(z), bounds.a,
                               4.0 * n * bounds.A, norm2_of(v)));
  return assemble_family(std::move(cases));
}

}  // namespace berglab::estimates
