#include "berglab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "berglab/errors.hpp"
#include "berglab/quadrature.hpp"

namespace berglab::energy {

namespace quad = berglab::quadrature;
namespace w = berglab::weights;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// reference 15-point rule on [0,1]; shifted onto spline cells
const std::vector<std::pair<double, double>>& unit_rule() {
  static const auto rule = quad::gk15_panel_rule(0.0, 1.0, 1);
  return rule;
}

double integrate_cell(const std::function<double(double)>& f, double a,
                      double h) {
  double acc = 0.0;
  for (const auto& [x, wgt] : unit_rule()) acc += wgt * f(a + x * h);
  return acc * h;
}

// ∫ f(t) φ_FS''(t) dt with the spline grid cells integrated by fixed panels
// (the integrand is smooth inside every cell) and the tails beyond the grid
// folded adaptively.
double pair_fs_over_spline(const w::SplineData& sd,
                           const std::function<double(double)>& f,
                           double tol) {
  double acc = 0.0;
  const int cells = sd.cells();
  for (int i = 0; i < cells; ++i) {
    const double a = sd.t0 + i * sd.h;
    acc += integrate_cell([&](double t) { return f(t) * w::fs_curvature(t); },
                          a, sd.h);
  }
  const double t_end = sd.t0 + cells * sd.h;
  auto tail = [&](double t) { return f(t) * w::fs_curvature(t); };
  acc += quad::integrate({tail, -quad::kInf, sd.t0, {}}, {tol}).value;
  acc += quad::integrate({tail, t_end, quad::kInf, {}}, {tol}).value;
  return acc;
}

// ∫ f dφ' for a spline potential: cell curvature is constant on each cell and
// the slope jumps at knots contribute atoms f(t_i)·Δd_i.
double pair_ma_over_spline(const w::SplineData& sd,
                           const std::function<double(double)>& f) {
  double acc = 0.0;
  const int cells = sd.cells();
  for (int i = 0; i < cells; ++i) {
    const double a = sd.t0 + i * sd.h;
    const double curv = 2.0 *
                        (sd.values[i + 1] - sd.values[i] - sd.slopes[i] * sd.h) /
                        (sd.h * sd.h);
    if (curv != 0.0) acc += curv * integrate_cell(f, a, sd.h);
    // atom at the right knot: the next right-slope minus this cell's end
    // slope (the last knot jumps onto the linear extension slope)
    const double end_slope =
        2.0 * (sd.values[i + 1] - sd.values[i]) / sd.h - sd.slopes[i];
    const double jump = sd.slopes[i + 1] - end_slope;
    if (jump != 0.0) acc += jump * f(a + sd.h);
  }
  return acc;
}

double richardson(double d_coarse, double d_fine, double h_coarse,
                  double h_fine) {
  const double w_c = h_coarse * h_coarse;
  const double w_f = h_fine * h_fine;
  return (w_c * d_fine - w_f * d_coarse) / (w_c - w_f);
}

}  // namespace

double integrate_against_fs(const std::function<double(double)>& f,
                            double tol) {
  auto g = [&](double t) { return f(t) * w::fs_curvature(t); };
  return kTwoPi *
         quad::integrate({g, -quad::kInf, quad::kInf, {-8.0, 0.0, 8.0}}, {tol})
             .value;
}

double integrate_against_ma(const w::ToricPotential& phi,
                            const std::function<double(double)>& f,
                            double tol) {
  if (const w::SplineData* sd = phi.spline())
    return kTwoPi * pair_ma_over_spline(*sd, f);
  auto g = [&](double t) { return f(t) * phi.curvature(t); };
  return kTwoPi *
         quad::integrate({g, -quad::kInf, quad::kInf, {-8.0, 0.0, 8.0}}, {tol})
             .value;
}

EnergyValue ma_energy(const w::ToricPotential& phi, double tol) {
  auto rel = [&phi](double t) { return phi.relative(t); };
  EnergyValue e;
  if (const w::SplineData* sd = phi.spline())
    e.part_reference = 0.5 * kTwoPi * pair_fs_over_spline(*sd, rel, tol);
  else
    e.part_reference = 0.5 * integrate_against_fs(rel, tol);
  e.part_monge_ampere = 0.5 * integrate_against_ma(phi, rel, tol);
  e.value = e.part_reference + e.part_monge_ampere;
  return e;
}

double quantum_energy(const toric::QuantumSpectrum& spectrum,
                      const toric::QuantumSpectrum& reference) {
  if (spectrum.k != reference.k)
    throw LevelMismatch("quantum_energy: spectra at levels " +
                        std::to_string(spectrum.k) + " and " +
                        std::to_string(reference.k));
  require(spectrum.log_norms.size() == reference.log_norms.size(),
          "quantum_energy: spectra sized differently");
  double acc = 0.0;
  for (std::size_t j = 0; j < spectrum.log_norms.size(); ++j)
    acc += spectrum.log_norms[j] - reference.log_norms[j];
  const double k = spectrum.k;
  return -kTwoPi / (k * k) * acc;
}

w::ToricPotential envelope(const std::function<double(double)>& chi,
                           const w::GridSpec& grid) {
  const int n = grid.knots;
  require(n >= 3, "envelope: grid needs at least 3 knots");
  std::vector<double> t(n), g(n);
  for (int i = 0; i < n; ++i) {
    t[i] = grid.knot(i);
    g[i] = w::fs_potential(t[i]) + chi(t[i]);
    require(std::isfinite(g[i]), "envelope: obstacle not finite on the grid");
  }

  // lower convex hull of the knot data (monotone chain; pops collinear)
  std::vector<int> hull;
  hull.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const int a = hull[hull.size() - 2];
      const int b = hull.back();
      const double lhs = (g[b] - g[a]) * (t[i] - t[b]);
      const double rhs = (g[i] - g[b]) * (t[b] - t[a]);
      if (rhs <= lhs)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }

  // Candidate support lines with slopes in [0,1]: the flat line at min g, the
  // hull edges whose slopes already lie in (0,1), and the slope-1 line at
  // min(g - t). Every one minorizes the data; their pointwise max is the
  // slope-constrained convex minorant.
  struct Line {
    double slope, icept;
    double at(double x) const { return slope * x + icept; }
  };
  std::vector<Line> lines;
  double m0 = g[0], m1 = g[0] - t[0];
  for (int i = 1; i < n; ++i) {
    m0 = std::min(m0, g[i]);
    m1 = std::min(m1, g[i] - t[i]);
  }
  lines.push_back({0.0, m0});
  for (std::size_t q = 0; q + 1 < hull.size(); ++q) {
    const int a = hull[q], b = hull[q + 1];
    const double s = (g[b] - g[a]) / (t[b] - t[a]);
    if (s > 0.0 && s < 1.0) lines.push_back({s, g[a] - s * t[a]});
  }
  lines.push_back({1.0, m1});

  // upper envelope of the lines (slopes strictly increasing): drop lines that
  // never dominate
  std::vector<Line> active;
  for (const Line& ln : lines) {
    while (!active.empty() && active.back().slope == ln.slope) {
      if (active.back().icept >= ln.icept) break;
      active.pop_back();
    }
    if (!active.empty() && active.back().slope == ln.slope &&
        active.back().icept >= ln.icept)
      continue;
    while (active.size() >= 2) {
      const Line& a = active[active.size() - 2];
      const Line& b = active.back();
      // b is redundant when the a-ln crossing sits left of the a-b crossing
      if ((a.icept - ln.icept) * (b.slope - a.slope) <=
          (a.icept - b.icept) * (ln.slope - a.slope))
        active.pop_back();
      else
        break;
    }
    active.push_back(ln);
  }

  std::vector<double> vals(n), slopes(n);
  std::size_t j = 0;
  for (int i = 0; i < n; ++i) {
    while (j + 1 < active.size() &&
           active[j + 1].at(t[i]) >= active[j].at(t[i]))
      ++j;
    vals[i] = active[j].at(t[i]);
    slopes[i] = active[j].slope;  // right-derivative (ties advanced)
  }
  // spline representation: affine cells through the exact knot values; the
  // final knot keeps the active support slope so the linear extension beyond
  // the grid follows the envelope
  const double h = grid.step();
  double last_secant = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    last_secant = (vals[i + 1] - vals[i]) / h;
    slopes[i] = std::clamp(last_secant, 0.0, 1.0);
  }
  slopes[n - 1] = std::clamp(std::max(slopes[n - 1], last_secant), 0.0, 1.0);
  return w::ToricPotential::from_spline_values_slopes(grid, std::move(vals),
                                                      std::move(slopes));
}

SmoothFunction constant_function(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; },
          [](double) { return 0.0; }, "const" + std::to_string(c)};
}

SmoothFunction zero_function() { return constant_function(0.0); }

w::ToricPotential perturbed(const w::ToricPotential& phi,
                            const SmoothFunction& f, double s) {
  require(static_cast<bool>(f.value) && static_cast<bool>(f.derivative) &&
              static_cast<bool>(f.second),
          "perturbed: direction needs value, derivative and second");
  w::ToricPotential base = phi;
  auto fv = f.value;
  auto fd = f.derivative;
  auto fs = f.second;
  return w::ToricPotential::closed_form(
      phi.name() + "+" + std::to_string(s) + "*" + f.name,
      [base, fv, s](double t) { return base.value(t) + s * fv(t); },
      [base, fd, s](double t) { return base.slope(t) + s * fd(t); },
      [base, fs, s](double t) { return base.curvature(t) + s * fs(t); });
}

namespace {

// I_k(H^k_{φ+sf}) against the fixed level-k reference spectrum
double quantum_energy_at(const w::ToricPotential& phi, const SmoothFunction& f,
                         double s, int k, const toric::QuantumSpectrum& ref,
                         const toric::SpectrumOptions& sopts) {
  const auto spec = toric::hilbert_norms(perturbed(phi, f, s), k, sopts);
  return quantum_energy(spec, ref);
}

double classical_energy_at(const w::ToricPotential& phi,
                           const SmoothFunction& f, double s,
                           const EnergyCheckOptions& opts) {
  auto chi = [&](double t) { return phi.relative(t) + s * f.value(t); };
  return ma_energy(envelope(chi, opts.grid), opts.quad_tol).value;
}

}  // namespace

DerivativeIdentityResult derivative_identity_check(
    const w::ToricPotential& phi, const SmoothFunction& f, int k,
    const EnergyCheckOptions& opts) {
  require(k >= 1, "derivative_identity_check: level must be >= 1");
  DerivativeIdentityResult out;
  out.k = k;

  const auto ref = toric::hilbert_norms(w::ToricPotential::fubini_study(), k,
                                        opts.spectrum);
  auto fq = [&](double s) {
    return quantum_energy_at(phi, f, s, k, ref, opts.spectrum);
  };
  const double h1 = opts.step_coarse, h2 = opts.step_fine;
  const double dq1 = (fq(h1) - fq(-h1)) / (2.0 * h1);
  const double dq2 = (fq(h2) - fq(-h2)) / (2.0 * h2);
  out.quantum_derivative = richardson(dq1, dq2, h1, h2);

  const toric::BergmanDensity den(phi, toric::hilbert_norms(phi, k, opts.spectrum));
  const double window = den.spectrum().window;
  auto pairing = [&](double t) {
    return f.value(t) * den.at(t).m_density * kTwoPi * w::fs_curvature(t);
  };
  out.quantum_pairing =
      quad::integrate({pairing, -window, window, {0.0}}, {opts.quad_tol}).value;

  auto fc = [&](double s) { return classical_energy_at(phi, f, s, opts); };
  const double dc1 = (fc(h1) - fc(-h1)) / (2.0 * h1);
  const double dc2 = (fc(h2) - fc(-h2)) / (2.0 * h2);
  out.classical_derivative = richardson(dc1, dc2, h1, h2);
  out.classical_pairing = integrate_against_ma(phi, f.value, opts.quad_tol);

  const double tol = opts.derivative_rel_tol;
  out.reports.push_back(report::BoundReport::upper(
      "energy_deriv_quantum:k=" + std::to_string(k),
      std::fabs(out.quantum_derivative - out.quantum_pairing),
      tol * std::max(1.0, std::fabs(out.quantum_pairing)),
      "fd versus bergman pairing, f=" + f.name));
  out.reports.push_back(report::BoundReport::upper(
      "energy_deriv_classical:k=" + std::to_string(k),
      std::fabs(out.classical_derivative - out.classical_pairing),
      tol * std::max(1.0, std::fabs(out.classical_pairing)),
      "fd of envelope energy versus monge-ampere pairing, f=" + f.name));
  return out;
}

PerturbedConvergenceResult perturbed_convergence_check(
    const w::ToricPotential& phi, const SmoothFunction& f,
    const std::vector<int>& k_list, const EnergyCheckOptions& opts) {
  require(k_list.size() >= 3,
          "perturbed_convergence_check: need at least three levels");
  for (std::size_t i = 0; i + 1 < k_list.size(); ++i)
    require(k_list[i] < k_list[i + 1],
            "perturbed_convergence_check: levels must increase");

  PerturbedConvergenceResult out;
  auto chi = [&](double t) { return phi.relative(t) + f.value(t); };
  const w::ToricPotential env = envelope(chi, opts.grid);
  out.limit = ma_energy(env, opts.quad_tol).value;
  for (int i = 0; i < opts.grid.knots; ++i) {
    const double t = opts.grid.knot(i);
    out.envelope_gap = std::max(out.envelope_gap, chi(t) - env.relative(t));
  }

  const w::ToricPotential pert = perturbed(phi, f, 1.0);
  for (int k : k_list) {
    const auto ref = toric::hilbert_norms(w::ToricPotential::fubini_study(), k,
                                          opts.spectrum);
    const auto spec = toric::hilbert_norms(pert, k, opts.spectrum);
    const double ik = quantum_energy(spec, ref);
    out.rows.push_back({k, ik, std::fabs(ik - out.limit)});
  }
  const std::size_t n = out.rows.size();
  for (std::size_t i = n - 2; i < n; ++i)
    out.reports.push_back(report::BoundReport::upper(
        "energy_convergence:k=" + std::to_string(out.rows[i].k),
        out.rows[i].error, out.rows[i - 1].error,
        "previous level k=" + std::to_string(out.rows[i - 1].k) +
            ", limit=" + report::format_g17(out.limit)));
  return out;
}

ConcavityResult concavity_check(const w::ToricPotential& phi,
                                const SmoothFunction& f, int k,
                                const std::vector<double>& samples,
                                double step, const EnergyCheckOptions& opts) {
  require(k >= 1 && step > 0.0, "concavity_check: bad level or step");
  ConcavityResult out;
  out.k = k;
  out.samples = samples;
  const auto ref = toric::hilbert_norms(w::ToricPotential::fubini_study(), k,
                                        opts.spectrum);
  for (double s : samples) {
    const double lo = quantum_energy_at(phi, f, s - step, k, ref, opts.spectrum);
    const double mid = quantum_energy_at(phi, f, s, k, ref, opts.spectrum);
    const double hi = quantum_energy_at(phi, f, s + step, k, ref, opts.spectrum);
    const double d2 = hi - 2.0 * mid + lo;
    out.second_differences.push_back(d2);
    out.reports.push_back(report::BoundReport::upper(
        "energy_concavity:k=" + std::to_string(k) + ":s=" +
            report::format_g17(s),
        d2, 1e-9, "centered second difference, step=" + report::format_g17(step)));
  }
  return out;
}

SandwichResult sandwich_check(const w::ToricPotential& phi,
                              const SmoothFunction& f, int k,
                              const EnergyCheckOptions& opts) {
  require(k >= 1, "sandwich_check: level must be >= 1");
  SandwichResult out;
  out.k = k;
  auto chi = [&](double t) { return phi.relative(t) + f.value(t); };
  const w::ToricPotential env = envelope(chi, opts.grid);
  const w::ToricPotential pert = perturbed(phi, f, 1.0);

  const auto ref = toric::hilbert_norms(w::ToricPotential::fubini_study(), k,
                                        opts.spectrum);
  out.energy_envelope = quantum_energy(toric::hilbert_norms(env, k, opts.spectrum), ref);
  out.energy_perturbed =
      quantum_energy(toric::hilbert_norms(pert, k, opts.spectrum), ref);

  // the affine-cell spline can sit above the true minorant between knots;
  // measure the worst excess over cell midpoints and knots
  for (int i = 0; i < opts.grid.knots; ++i) {
    const double t = opts.grid.knot(i);
    out.overshoot = std::max(out.overshoot, env.value(t) - pert.value(t));
    if (i + 1 < opts.grid.knots) {
      const double m = t + 0.5 * opts.grid.step();
      out.overshoot = std::max(out.overshoot, env.value(m) - pert.value(m));
    }
  }
  out.overshoot = std::max(out.overshoot, 0.0);

  const double kk = k;
  out.certified = report::BoundReport::upper(
      "energy_sandwich_certified:k=" + std::to_string(k), out.energy_envelope,
      out.energy_perturbed + kTwoPi * out.overshoot * (kk + 1.0) / kk,
      "envelope overshoot=" + report::format_g17(out.overshoot));
  out.clean = report::BoundReport::upper(
      "energy_sandwich:k=" + std::to_string(k), out.energy_envelope,
      out.energy_perturbed, "no representation correction");
  return out;
}

}  // namespace berglab::energy
