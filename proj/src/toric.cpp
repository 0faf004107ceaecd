#include "berglab/toric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "berglab/errors.hpp"
#include "berglab/quadrature.hpp"

namespace berglab::toric {

namespace quad = berglab::quadrature;
namespace w = berglab::weights;
using report::BoundReport;

namespace {

constexpr double kPi = std::numbers::pi_v<double>;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string level_tag(int k) { return "k=" + std::to_string(k); }

// Initial subdivision for integrals of Bergman-trace quantities.  The density
// concentrates where the slope of φ transitions from 0 to 1 (the support of
// its Monge–Ampère measure), which can be far narrower than the certified
// window: a panel that straddles such a spike can pass the error estimate
// while missing the mass entirely.  Slope quantiles bracket the transition
// region and a geometric ladder pads it outward.
std::vector<double> trace_breakpoints(const w::ToricPotential& phi,
                                      double window) {
  const auto slope_inverse = [&phi, window](double target) {
    double lo = -window, hi = window;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi)) break;
      (phi.slope(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  std::vector<double> bp;
  for (int i = 1; i <= 15; ++i) bp.push_back(slope_inverse(i / 16.0));
  const double q_lo = bp.front(), q_hi = bp.back();
  const double step0 = std::max(0.01, (q_hi - q_lo) / 16.0);
  for (double s = step0; q_hi + s < window; s *= 2.0) bp.push_back(q_hi + s);
  for (double s = step0; q_lo - s > -window; s *= 2.0) bp.push_back(q_lo - s);
  return bp;
}

// ∫ density dω_FS over [lo, hi], with ω_FS = 2π φ_FS''(t) dt on the t-line.
double fs_mass_integral(const BergmanDensity& den, double lo, double hi,
                        double tol) {
  if (hi <= lo) return 0.0;
  quad::Integrand1D g;
  g.f = [&den](double t) {
    return den.at(t).m_density * kTwoPi * w::fs_curvature(t);
  };
  g.lower = lo;
  g.upper = hi;
  for (double b : trace_breakpoints(den.potential(), den.spectrum().window))
    if (b > lo && b < hi) g.breakpoints.push_back(b);
  quad::Options o;
  o.tol = tol;
  return quad::integrate(g, o).value;
}

}  // namespace

QuantumSpectrum hilbert_norms(const w::ToricPotential& phi, int k,
                              const SpectrumOptions& opts) {
  require(k >= 1, "hilbert_norms: level k must be >= 1");
  require(opts.initial_window > 0.0 && opts.window_growth > 1.0 &&
              opts.tail_drop > 0.0,
          "hilbert_norms: invalid window options");

  // Each log-integrand L_j(t) = j t - k φ(t) + log φ_FS''(t) is concave
  // (k φ is convex and log φ_FS'' is concave), so a peak-to-endpoint drop of
  // tail_drop certifies the truncation error of the integral.
  const double target_step = 0.01;
  double window = opts.initial_window;
  std::vector<double> peak_log(static_cast<size_t>(k) + 1);
  std::vector<double> peak_t(static_cast<size_t>(k) + 1);

  for (;;) {
    const int half =
        std::max(1, static_cast<int>(std::ceil(window / target_step)));
    const int count = 2 * half + 1;
    const double step = window / half;
    std::vector<double> ts(count), base(count);
    for (int i = 0; i < count; ++i) {
      const double t = (i - half) * step;
      ts[i] = t;
      base[i] = -static_cast<double>(k) * phi.value(t) + w::log_fs_curvature(t);
    }
    bool accepted = true;
    for (int j = 0; j <= k; ++j) {
      double m = -kInf;
      int arg = 0;
      for (int i = 0; i < count; ++i) {
        const double value = j * ts[i] + base[i];
        if (value > m) {
          m = value;
          arg = i;
        }
      }
      peak_log[j] = m;
      peak_t[j] = ts[arg];
      const double at_lo = j * ts.front() + base.front();
      const double at_hi = j * ts.back() + base.back();
      if (!(at_lo <= m - opts.tail_drop && at_hi <= m - opts.tail_drop)) {
        accepted = false;
        break;
      }
    }
    if (accepted) break;
    window *= opts.window_growth;
    if (window > opts.max_window) {
      throw NonConvergent("hilbert_norms: norm integrands for '" + phi.name() +
                          "' at " + level_tag(k) +
                          " do not decay inside the window cap " +
                          report::format_g17(opts.max_window));
    }
  }

  QuantumSpectrum spec;
  spec.k = k;
  spec.window = window;
  spec.log_norms.resize(static_cast<size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) {
    const double m = peak_log[j];
    quad::Integrand1D g;
    g.f = [&phi, j, k, m](double t) {
      return std::exp(j * t - static_cast<double>(k) * phi.value(t) +
                      w::log_fs_curvature(t) - m);
    };
    g.lower = -window;
    g.upper = window;
    // Geometric ladder around the located peak: the integrand is concave in
    // log scale, and at large k its peak can be orders of magnitude narrower
    // than the window, so panels must shrink toward it geometrically or the
    // error estimator can accept a subdivision that straddles the peak.
    g.breakpoints = {peak_t[j]};
    for (double s = window * 0x1.0p-24; s < window; s *= 2.0) {
      if (peak_t[j] + s < window) g.breakpoints.push_back(peak_t[j] + s);
      if (peak_t[j] - s > -window) g.breakpoints.push_back(peak_t[j] - s);
    }
    quad::Options o;
    o.tol = opts.quad_tol;
    const double value = quad::integrate(g, o).value;
    spec.log_norms[j] = std::log(kTwoPi) + m + std::log(value);
  }
  return spec;
}

BergmanDensity::BergmanDensity(w::ToricPotential phi, QuantumSpectrum spectrum)
    : phi_(std::move(phi)), spectrum_(std::move(spectrum)) {
  require(spectrum_.k >= 1, "BergmanDensity: level k must be >= 1");
  require(spectrum_.size() == spectrum_.k + 1,
          "BergmanDensity: spectrum must hold k+1 norms");
}

double BergmanDensity::log_trace(double t, double* mean_out,
                                 double* var_out) const {
  const auto& ln = spectrum_.log_norms;
  const int n = static_cast<int>(ln.size());
  std::vector<double> term(n);
  double m = -kInf;
  for (int j = 0; j < n; ++j) {
    term[j] = j * t - ln[j];
    m = std::max(m, term[j]);
  }
  double s0 = 0.0, s1 = 0.0;
  for (int j = 0; j < n; ++j) {
    term[j] = std::exp(term[j] - m);
    s0 += term[j];
    s1 += j * term[j];
  }
  const double mean = s1 / s0;
  if (mean_out != nullptr) *mean_out = mean;
  if (var_out != nullptr) {
    double s2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double d = j - mean;
      s2 += d * d * term[j];
    }
    *var_out = s2 / s0;
  }
  return m + std::log(s0);
}

double BergmanDensity::psi(double t) const {
  return log_trace(t, nullptr, nullptr) / spectrum_.k;
}

BergmanPoint BergmanDensity::at(double t) const {
  const int k = spectrum_.k;
  BergmanPoint p;
  p.t = t;
  const double log_t = log_trace(t, &p.mean_j, &p.var_j);
  p.log_kernel = log_t - k * phi_.value(t);
  p.kernel = std::exp(p.log_kernel);
  p.potential = log_t / k - w::fs_potential(t);
  p.m_density = (kTwoPi / k) * p.kernel;
  p.metric_ratio = p.var_j / (k * w::fs_curvature(t));
  return p;
}

double BergmanDensity::total_mass(double tol) const {
  return fs_mass_integral(*this, -spectrum_.window, spectrum_.window, tol);
}

double BergmanDensity::metric_ratio_mass(double tol) const {
  quad::Integrand1D g;
  g.f = [this](double t) {
    double var = 0.0;
    log_trace(t, nullptr, &var);
    return (kTwoPi / spectrum_.k) * var;
  };
  g.lower = -spectrum_.window;
  g.upper = spectrum_.window;
  for (double b : trace_breakpoints(phi_, spectrum_.window))
    if (b > g.lower && b < g.upper) g.breakpoints.push_back(b);
  quad::Options o;
  o.tol = tol;
  return quad::integrate(g, o).value;
}

BergmanDensity bergman_density(const w::ToricPotential& phi, int k,
                               const SpectrumOptions& opts) {
  return BergmanDensity(phi, hilbert_norms(phi, k, opts));
}

measure::RadonMeasure1D ma_measure(const w::ToricPotential& phi) {
  measure::RadonMeasure1D mu;
  mu.cdf = [phi](double t) { return kTwoPi * phi.slope(t); };
  mu.density = [phi](double t) { return kTwoPi * phi.curvature(t); };
  mu.name = "ma(" + phi.name() + ")";
  return mu;
}

C11Report check_theorem_c11(const w::ToricPotential& phi,
                            const w::CurvatureBounds& bounds,
                            const std::vector<int>& k_list,
                            const w::GridSpec& grid,
                            const SpectrumOptions& opts) {
  require(!k_list.empty(), "check_theorem_c11: k_list must be non-empty");
  require(bounds.a > 0.0 && bounds.A >= bounds.a,
          "check_theorem_c11: need 0 < a <= A");
  w::verify_curvature_bounds(phi, bounds, grid);

  const double a = bounds.a;
  const double big_a = bounds.A;

  C11Report rep;
  rep.bounds = bounds;
  for (int k : k_list) {
    require(k >= 1, "check_theorem_c11: levels must be >= 1");
    const BergmanDensity den = bergman_density(phi, k, opts);
    C11Level lvl;
    lvl.k = k;
    lvl.min_ratio = kInf;
    lvl.max_ratio = -kInf;
    lvl.sup_potential_error = 0.0;
    for (int i = 0; i < grid.knots; ++i) {
      const double t = grid.knot(i);
      const BergmanPoint p = den.at(t);
      lvl.min_ratio = std::min(lvl.min_ratio, p.metric_ratio);
      lvl.max_ratio = std::max(lvl.max_ratio, p.metric_ratio);
      lvl.sup_potential_error = std::max(
          lvl.sup_potential_error, std::abs(p.potential - phi.relative(t)));
    }
    lvl.extracted_constant =
        std::max(a * a / ((1.0 + big_a) * lvl.min_ratio),
                 lvl.max_ratio * a / (1.0 + big_a * big_a));
    rep.levels.push_back(lvl);
  }

  double c_min = kInf, c_max = -kInf;
  for (const C11Level& lvl : rep.levels) {
    c_min = std::min(c_min, lvl.extracted_constant);
    c_max = std::max(c_max, lvl.extracted_constant);
  }
  rep.constant = c_max;
  rep.stability_ratio = c_max / c_min;

  const double c = rep.constant;
  for (const C11Level& lvl : rep.levels) {
    rep.reports.push_back(BoundReport::lower(
        "c11_ratio_lower:" + level_tag(lvl.k), lvl.min_ratio,
        a * a / (c * (1.0 + big_a)), "metric ratio vs bracket floor"));
    rep.reports.push_back(BoundReport::upper(
        "c11_ratio_upper:" + level_tag(lvl.k), lvl.max_ratio,
        c * (1.0 + big_a * big_a) / a, "metric ratio vs bracket ceiling"));
  }
  rep.reports.push_back(BoundReport::upper(
      "c11_constant_stability", rep.stability_ratio, 2.0,
      "max/min of per-level extracted constants"));
  for (size_t i = 1; i < rep.levels.size(); ++i) {
    rep.reports.push_back(BoundReport::upper(
        "c11_sup_error_decrease:" + level_tag(rep.levels[i].k),
        rep.levels[i].sup_potential_error,
        rep.levels[i - 1].sup_potential_error,
        "sup |quantized - relative potential| vs previous level"));
  }
  return rep;
}

std::vector<std::pair<double, double>> nonnegative_intervals(
    const std::function<double(double)>& f, double lo, double hi,
    int samples) {
  require(hi > lo, "nonnegative_intervals: empty domain");
  require(samples >= 2, "nonnegative_intervals: need at least two samples");

  std::vector<double> ts(samples), vs(samples);
  for (int i = 0; i < samples; ++i) {
    ts[i] = lo + (hi - lo) * i / (samples - 1);
    vs[i] = f(ts[i]);
  }
  // Bisection for the boundary between a strictly negative sample and a
  // non-negative one; the returned point errs on the inside (closed set).
  const auto refine = [&f](double t_out, double t_in) {
    for (int it = 0; it < 80 && std::abs(t_in - t_out) > 1e-11; ++it) {
      const double mid = 0.5 * (t_in + t_out);
      if (f(mid) >= 0.0) {
        t_in = mid;
      } else {
        t_out = mid;
      }
    }
    return t_in;
  };

  std::vector<std::pair<double, double>> out;
  int i = 0;
  while (i < samples) {
    if (!(vs[i] >= 0.0)) {
      ++i;
      continue;
    }
    const double start = (i == 0) ? lo : refine(ts[i - 1], ts[i]);
    int j = i;
    while (j + 1 < samples && vs[j + 1] >= 0.0) ++j;
    const double end = (j == samples - 1) ? hi : refine(ts[j + 1], ts[j]);
    out.emplace_back(start, end);
    i = j + 1;
  }
  return out;
}

BerndtssonResult berndtsson_check(const BergmanDensity& phi_density,
                                  const BergmanDensity& psi_density,
                                  int samples) {
  if (phi_density.level() != psi_density.level()) {
    throw LevelMismatch("berndtsson_check: densities built at " +
                        level_tag(phi_density.level()) + " and " +
                        level_tag(psi_density.level()));
  }
  const double window = std::max(phi_density.spectrum().window,
                                 psi_density.spectrum().window);
  const auto& phi = phi_density.potential();
  const auto& psi = psi_density.potential();
  const auto diff = [&phi, &psi](double t) {
    return phi.relative(t) - psi.relative(t);
  };

  BerndtssonResult res;
  res.k = phi_density.level();
  res.region = nonnegative_intervals(diff, -window, window, samples);
  for (const auto& [lo, hi] : res.region) {
    res.lhs += fs_mass_integral(phi_density, lo, hi, 1e-10);
    res.rhs += fs_mass_integral(psi_density, lo, hi, 1e-10);
  }
  res.report = BoundReport::upper(
      "berndtsson_mass:" + level_tag(res.k), res.lhs, res.rhs,
      "equilibrium mass on {psi <= phi}; intervals=" +
          std::to_string(res.region.size()));
  return res;
}

BerndtssonResult berndtsson_check(const w::ToricPotential& phi,
                                  const w::ToricPotential& psi, int k,
                                  const SpectrumOptions& opts, int samples) {
  return berndtsson_check(bergman_density(phi, k, opts),
                          bergman_density(psi, k, opts), samples);
}

BoundReport berndtsson_pointwise_check(const w::ToricPotential& phi,
                                       const w::ToricPotential& psi, int k,
                                       const w::GridSpec& grid,
                                       const SpectrumOptions& opts) {
  const BergmanDensity den_psi = bergman_density(psi, k, opts);
  const BergmanDensity den_max =
      bergman_density(w::ToricPotential::pointwise_max(phi, psi), k, opts);

  double worst = 0.0;
  int inside = 0;
  for (int i = 0; i < grid.knots; ++i) {
    const double t = grid.knot(i);
    if (psi.relative(t) >= phi.relative(t)) {
      ++inside;
      worst = std::max(worst,
                       den_psi.at(t).m_density / den_max.at(t).m_density);
    }
  }
  return BoundReport::upper(
      "berndtsson_pointwise:" + level_tag(k), worst, 1.0,
      "max density ratio vs max-potential density on {psi >= phi}; points=" +
          std::to_string(inside));
}

DoublingResult doubling_check(const w::ToricPotential& phi, int k,
                              const w::GridSpec& grid,
                              const SpectrumOptions& opts) {
  require(k >= 1, "doubling_check: level k must be >= 1");
  const BergmanDensity den_k = bergman_density(phi, k, opts);
  const BergmanDensity den_2k =
      bergman_density(phi.relative_scaled(0.5), 2 * k, opts);

  double min_ratio = kInf;
  for (int i = 0; i < grid.knots; ++i) {
    const double t = grid.knot(i);
    min_ratio = std::min(
        min_ratio, 2.0 * den_2k.at(t).m_density / den_k.at(t).m_density);
  }
  DoublingResult res;
  res.k = k;
  res.min_ratio = min_ratio;
  res.epsilon = 1.0 - min_ratio;
  res.report = BoundReport::lower(
      "doubling_min_ratio:" + level_tag(k), min_ratio, 0.0,
      "epsilon=" + report::format_g17(res.epsilon));
  return res;
}

LowerBoundResult lower_bound_check(const w::ToricPotential& phi, double a,
                                   int k, const w::GridSpec& grid,
                                   const SpectrumOptions& opts) {
  require(a > 0.0, "lower_bound_check: curvature floor a must be positive");
  require(k >= 1, "lower_bound_check: level k must be >= 1");
  const w::CurvatureBounds sampled = w::sampled_curvature_bounds(phi, grid);
  if (a > sampled.a + 1e-9) {
    throw PreconditionViolation(
        "lower_bound_check: declared floor a=" + report::format_g17(a) +
        " exceeds the sampled curvature floor " +
        report::format_g17(sampled.a));
  }

  const BergmanDensity den = bergman_density(phi, k, opts);
  double min_density = kInf;
  for (int i = 0; i < grid.knots; ++i) {
    min_density = std::min(min_density, den.at(grid.knot(i)).m_density);
  }
  LowerBoundResult res;
  res.k = k;
  res.a = a;
  res.min_ratio = min_density / a;
  res.epsilon = 1.0 - res.min_ratio;
  res.report = BoundReport::lower(
      "quantum_density_floor:" + level_tag(k), res.min_ratio, 0.0,
      "epsilon=" + report::format_g17(res.epsilon) +
          " a=" + report::format_g17(a));
  return res;
}

double tail_mass(const BergmanDensity& density, double c, int samples) {
  const double window = density.spectrum().window;
  const auto& phi = density.potential();
  const auto sublevel = [&phi, c](double t) { return c - phi.relative(t); };
  double mass = 0.0;
  for (const auto& [lo, hi] :
       nonnegative_intervals(sublevel, -window, window, samples)) {
    mass += fs_mass_integral(density, lo, hi, 1e-10);
  }
  return mass;
}

double tail_mass(const w::ToricPotential& phi, double c, int k,
                 const SpectrumOptions& opts, int samples) {
  return tail_mass(bergman_density(phi, k, opts), c, samples);
}

}  // namespace berglab::toric
