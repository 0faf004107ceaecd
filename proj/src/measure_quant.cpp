#include "berglab/measure_quant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <utility>

#include "berglab/errors.hpp"
#include "berglab/quadrature.hpp"

namespace berglab::measure {

namespace quad = berglab::quadrature;
namespace w = berglab::weights;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string short_number(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

RadonMeasure1D fs_measure() {
  RadonMeasure1D nu;
  nu.cdf = [](double t) { return kTwoPi * logistic(t); };
  nu.density = [](double t) { return kTwoPi * w::fs_curvature(t); };
  nu.name = "fs";
  return nu;
}

RadonMeasure1D translated_fs_measure(double c) {
  RadonMeasure1D nu;
  nu.cdf = [c](double t) { return kTwoPi * logistic(t - c); };
  nu.density = [c](double t) { return kTwoPi * w::fs_curvature(t - c); };
  nu.name = "fs_shift(" + short_number(c) + ")";
  return nu;
}

RadonMeasure1D holder_measure(double alpha, double delta) {
  require(alpha > 0.0 && alpha <= 1.0, "holder_measure: need 0 < alpha <= 1");
  require(delta > 0.0, "holder_measure: need delta > 0");
  constexpr double kPi = 0.5 * kTwoPi;
  RadonMeasure1D nu;
  nu.cdf = [alpha, delta](double t) {
    if (t <= -delta) return 0.0;
    if (t >= delta) return kTwoPi;
    const double r = std::pow(std::abs(t) / delta, alpha);
    return t < 0.0 ? kPi * (1.0 - r) : kPi * (1.0 + r);
  };
  nu.density = [alpha, delta](double t) {
    const double a = std::abs(t);
    if (a >= delta) return 0.0;
    return kPi * alpha / delta * std::pow(a / delta, alpha - 1.0);
  };
  nu.name = "holder(alpha=" + short_number(alpha) + ",delta=" + short_number(delta) + ")";
  return nu;
}

RadonMeasure1D sigmoid_mixture_measure(std::vector<double> mixture_weights,
                                       std::vector<double> scales,
                                       std::vector<double> centers) {
  require(!mixture_weights.empty() && mixture_weights.size() == scales.size() &&
              scales.size() == centers.size(),
          "sigmoid_mixture_measure: component lists must be non-empty and equal-sized");
  double total = 0.0;
  for (double x : mixture_weights) {
    require(x > 0.0, "sigmoid_mixture_measure: weights must be positive");
    total += x;
  }
  for (double s : scales) require(s > 0.0, "sigmoid_mixture_measure: scales must be positive");
  for (double& x : mixture_weights) x /= total;

  auto wp = std::make_shared<std::vector<double>>(std::move(mixture_weights));
  auto sp = std::make_shared<std::vector<double>>(std::move(scales));
  auto cp = std::make_shared<std::vector<double>>(std::move(centers));
  RadonMeasure1D nu;
  nu.cdf = [wp, sp, cp](double t) {
    double v = 0.0;
    for (std::size_t i = 0; i < wp->size(); ++i)
      v += (*wp)[i] * logistic((*sp)[i] * (t - (*cp)[i]));
    return kTwoPi * v;
  };
  nu.density = [wp, sp, cp](double t) {
    double v = 0.0;
    for (std::size_t i = 0; i < wp->size(); ++i)
      v += (*wp)[i] * (*sp)[i] * w::fs_curvature((*sp)[i] * (t - (*cp)[i]));
    return kTwoPi * v;
  };
  std::ostringstream os;
  os << "mixture(" << wp->size() << ")";
  nu.name = os.str();
  return nu;
}

RadonMeasure1D random_measure(Rng& rng) {
  const std::size_t n = 2 + rng.index(3);
  std::vector<double> mw(n), sc(n), ce(n);
  for (std::size_t i = 0; i < n; ++i) {
    mw[i] = rng.uniform(0.2, 1.0);
    sc[i] = rng.uniform(0.8, 3.0);
    ce[i] = rng.uniform(-3.0, 3.0);
  }
  RadonMeasure1D nu = sigmoid_mixture_measure(std::move(mw), std::move(sc), std::move(ce));
  nu.name = "seeded_" + nu.name;
  return nu;
}

RadonMeasure1D measure_from_rows(const std::vector<std::pair<double, double>>& rows,
                                 std::string name) {
  if (rows.size() < 2) throw ConfigInvalid("measure table needs at least two rows");
  auto ts = std::make_shared<std::vector<double>>();
  auto fs = std::make_shared<std::vector<double>>();
  ts->reserve(rows.size());
  fs->reserve(rows.size());
  for (const auto& [t, F] : rows) {
    if (!std::isfinite(t) || !std::isfinite(F))
      throw ConfigInvalid("measure table contains a non-finite entry");
    if (!ts->empty() && t <= ts->back())
      throw ConfigInvalid("measure table abscissae must be strictly increasing at t=" +
                          short_number(t));
    if (!fs->empty() && F < fs->back())
      throw ConfigInvalid("measure table CDF decreases at t=" + short_number(t));
    ts->push_back(t);
    fs->push_back(F);
  }
  RadonMeasure1D nu;
  nu.cdf = [ts, fs](double t) {
    if (t <= ts->front()) return fs->front();
    if (t >= ts->back()) return fs->back();
    const auto it = std::upper_bound(ts->begin(), ts->end(), t);
    const std::size_t i = static_cast<std::size_t>(it - ts->begin()) - 1;
    const double lam = (t - (*ts)[i]) / ((*ts)[i + 1] - (*ts)[i]);
    return (*fs)[i] + lam * ((*fs)[i + 1] - (*fs)[i]);
  };
  nu.density = [ts, fs](double t) {
    if (t <= ts->front() || t >= ts->back()) return 0.0;
    const auto it = std::upper_bound(ts->begin(), ts->end(), t);
    const std::size_t i = static_cast<std::size_t>(it - ts->begin()) - 1;
    return ((*fs)[i + 1] - (*fs)[i]) / ((*ts)[i + 1] - (*ts)[i]);
  };
  nu.name = std::move(name);
  return nu;
}

RadonMeasure1D measure_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open measure file: " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double t = 0.0, F = 0.0;
    if (!(ls >> t)) continue;  // blank or comment-only line
    std::string extra;
    if (!(ls >> F) || (ls >> extra))
      throw ConfigInvalid("measure file " + path + ": line " + std::to_string(line_no) +
                          " is not a (t, F) pair");
    rows.emplace_back(t, F);
  }
  return measure_from_rows(rows, path);
}

// ---------------------------------------------------------------------------
// Stieltjes integration
// ---------------------------------------------------------------------------

namespace {

// Monotone inverse of the CDF, resolved to machine precision; flat stretches
// of F carry no mass, so any point of the preimage works.
double cdf_inverse(const RadonMeasure1D& nu, double u) {
  double lo = -64.0, hi = 64.0;
  while (nu.cdf(lo) > u && lo > -1.0e9) lo *= 2.0;
  while (nu.cdf(hi) < u && hi < 1.0e9) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    (nu.cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Initial subdivision points for integrating against the quantized measures.
// For concentrated ν the density of M^k is a spike that a coarse first panel
// can straddle (the error estimator then accepts a badly undersampled panel).
// Interior mass quantiles of ν bracket wherever that mass lives, and a
// geometric ladder walking outward from the quantile hull keeps the panels
// adjacent to the support edge comparable to the quantile spacing — for a
// Hölder CDF the quantiles themselves cluster at the singularity and would
// otherwise leave the support edge at the border of a window-sized panel.
std::vector<double> pairing_breakpoints(const RadonMeasure1D& nu, int count,
                                        double window) {
  std::vector<double> qs;
  qs.reserve(static_cast<std::size_t>(count) + 40);
  for (int i = 1; i <= count; ++i)
    qs.push_back(cdf_inverse(nu, kTwoPi * i / (count + 1)));
  const double q_lo = qs.front(), q_hi = qs.back();
  const double step0 = std::max(0.01, (q_hi - q_lo) / 16.0);
  for (double s = step0; q_hi + s < window; s *= 2.0) qs.push_back(q_hi + s);
  for (double s = step0; q_lo - s > -window; s *= 2.0) qs.push_back(q_lo - s);
  return qs;
}

}  // namespace

double integrate(const RadonMeasure1D& nu, const std::function<double(double)>& f,
                 double tol) {
  require(static_cast<bool>(nu.cdf), "integrate: measure has no CDF");
  quad::Integrand1D q;
  q.f = [&](double u) { return f(cdf_inverse(nu, u)); };
  q.lower = 0.0;
  q.upper = kTwoPi;
  quad::Options opts;
  opts.tol = tol;
  return quad::integrate(q, opts).value;
}

// ---------------------------------------------------------------------------
// Calabi–Yau step
// ---------------------------------------------------------------------------

w::ToricPotential solve_calabi_yau(const RadonMeasure1D& nu, const SolveOptions& opts) {
  require(static_cast<bool>(nu.cdf), "solve_calabi_yau: measure has no CDF");
  const w::GridSpec& grid = opts.grid;
  require(grid.knots >= 2 && grid.t_max > grid.t_min,
          "solve_calabi_yau: invalid grid");

  const double far_lo = nu.cdf(-opts.far_t);
  const double far_hi = nu.cdf(opts.far_t);
  if (std::abs(far_hi - kTwoPi) > opts.mass_tol || std::abs(far_lo) > opts.mass_tol)
    throw MassMismatch("measure " + nu.name + " does not have total mass 2pi: F(-inf)=" +
                       short_number(far_lo) + ", F(+inf)=" + short_number(far_hi));

  const double end_lo = nu.cdf(grid.t_min);
  const double end_hi = nu.cdf(grid.t_max);
  if (std::abs(end_hi - kTwoPi) > opts.mass_tol || std::abs(end_lo) > opts.mass_tol)
    throw WindowTooSmall("measure " + nu.name + " has not reached its limits on [" +
                         short_number(grid.t_min) + ", " + short_number(grid.t_max) +
                         "]: F(t_min)=" + short_number(end_lo) +
                         ", 2pi - F(t_max)=" + short_number(kTwoPi - end_hi));

  const int n = grid.knots;
  const double h = grid.step();
  std::vector<double> cdf_values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    cdf_values[static_cast<std::size_t>(i)] = nu.cdf(grid.t_min + h * i);

  for (int i = 0; i + 1 < n; ++i) {
    if (cdf_values[i + 1] < cdf_values[i] - 1e-12 * kTwoPi)
      throw PreconditionViolation("solve_calabi_yau: CDF of " + nu.name +
                                  " decreases near t=" + short_number(grid.t_min + h * i));
  }

  // Atom probe: follow the steepest half of any heavy cell down to a width of
  // h·2^{-bisections}; a continuous CDF sheds most of the cell mass on the
  // way, a jump keeps it.
  for (int i = 0; i + 1 < n; ++i) {
    const double increment = cdf_values[i + 1] - cdf_values[i];
    if (increment < opts.atom_mass_floor) continue;
    double a = grid.t_min + h * i, b = a + h;
    double fa = cdf_values[i], fb = cdf_values[i + 1];
    for (int it = 0; it < opts.atom_bisections; ++it) {
      const double mid = 0.5 * (a + b);
      const double fm = nu.cdf(mid);
      if (fm - fa >= fb - fm) {
        b = mid;
        fb = fm;
      } else {
        a = mid;
        fa = fm;
      }
    }
    if (fb - fa > opts.atom_ratio * increment)
      throw AtomDetected("measure " + nu.name + " concentrates mass " +
                         short_number(fb - fa) + " in a window of width " +
                         short_number(b - a) + " near t=" + short_number(a));
  }

  std::vector<double> slopes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    slopes[static_cast<std::size_t>(i)] =
        std::clamp(cdf_values[static_cast<std::size_t>(i)] / kTwoPi, 0.0, 1.0);
  for (int i = 0; i + 1 < n; ++i)
    slopes[i + 1] = std::max(slopes[i + 1], slopes[i]);

  // Anchor first at zero, measure the mean of the relative potential against
  // the unit-mass measure φ_FS″ dt, then re-anchor so the mean vanishes.
  const w::ToricPotential raw = w::ToricPotential::from_spline_slopes(grid, slopes, 0.0);
  double mean = 0.0;
  for (const auto& [x, wt] : quad::gk15_panel_rule(grid.t_min, grid.t_max, n - 1))
    mean += wt * raw.relative(x) * w::fs_curvature(x);
  const auto tail = [&raw](double t) { return raw.relative(t) * w::fs_curvature(t); };
  mean += quad::integrate(tail, -quad::kInf, grid.t_min, 1e-13).value;
  mean += quad::integrate(tail, grid.t_max, quad::kInf, 1e-13).value;

  return w::ToricPotential::from_spline_slopes(grid, std::move(slopes), -mean);
}

toric::BergmanDensity quantize_measure(const RadonMeasure1D& nu, int k,
                                       const SolveOptions& solve_opts,
                                       const toric::SpectrumOptions& spectrum_opts) {
  return toric::bergman_density(solve_calabi_yau(nu, solve_opts), k, spectrum_opts);
}

// ---------------------------------------------------------------------------
// Weak convergence
// ---------------------------------------------------------------------------

std::vector<TestFunction> default_test_functions() {
  std::vector<TestFunction> fns;
  fns.push_back({[](double) { return 1.0; }, "1"});
  fns.push_back({[](double t) { return std::tanh(t); }, "tanh(t)"});
  fns.push_back({[](double t) { return std::tanh(t - 2.0); }, "tanh(t-2)"});
  fns.push_back({[](double t) { return 1.0 / (1.0 + t * t); }, "1/(1+t^2)"});
  fns.push_back({[](double t) { return logistic(3.0 * t); }, "sigmoid(3t)"});
  return fns;
}

WeakConvergenceResult weak_convergence_report(const RadonMeasure1D& nu,
                                              const std::vector<TestFunction>& test_functions,
                                              const std::vector<int>& k_list,
                                              const WeakConvergenceOptions& opts) {
  require(!test_functions.empty(), "weak_convergence_report: no test functions");
  require(k_list.size() >= 2, "weak_convergence_report: need at least two levels");
  for (std::size_t i = 0; i + 1 < k_list.size(); ++i)
    require(k_list[i] < k_list[i + 1],
            "weak_convergence_report: k_list must be strictly increasing");

  const w::ToricPotential phi = solve_calabi_yau(nu, opts.solve);

  WeakConvergenceResult out;
  out.k_list = k_list;
  out.rows.resize(test_functions.size());
  for (std::size_t j = 0; j < test_functions.size(); ++j) {
    out.rows[j].name = test_functions[j].name;
    out.rows[j].exact = integrate(nu, test_functions[j].f, opts.ground_truth_tol);
  }

  for (int k : k_list) {
    const toric::BergmanDensity den(phi, toric::hilbert_norms(phi, k, opts.spectrum));
    const double window = den.spectrum().window;
    const std::vector<double> marks = pairing_breakpoints(nu, 15, window);
    for (std::size_t j = 0; j < test_functions.size(); ++j) {
      quad::Integrand1D q;
      q.f = [&den, &test_functions, j](double t) {
        return test_functions[j].f(t) * den.at(t).m_density * kTwoPi * w::fs_curvature(t);
      };
      q.lower = -window;
      q.upper = window;
      q.breakpoints = {0.0};
      for (double b : marks)
        if (b > -window && b < window) q.breakpoints.push_back(b);
      quad::Options qo;
      qo.tol = opts.quad_tol;
      const double approx = quad::integrate(q, qo).value;
      out.rows[j].errors.push_back(std::abs(approx - out.rows[j].exact));
    }
  }

  for (const auto& row : out.rows) {
    const double last = row.errors.back();
    const double least = *std::min_element(row.errors.begin(), row.errors.end());
    const std::string note = "exact=" + report::format_g17(row.exact) +
                             ", k_last=" + std::to_string(k_list.back());
    out.reports.push_back(report::BoundReport::upper(
        "weak_min:f=" + row.name, last, std::max(least, opts.noise_floor), note));
    out.reports.push_back(
        report::BoundReport::upper("weak_threshold:f=" + row.name, last, opts.threshold, note));
  }
  return out;
}

}  // namespace berglab::measure
