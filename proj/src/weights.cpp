#include "berglab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "berglab/errors.hpp"

namespace berglab::weights {

// ---------------------------------------------------------------------------
// Domains

ReinhardtDomain ReinhardtDomain::polydisk(std::vector<double> radii) {
  require(!radii.empty(), "polydisk: need at least one radius");
  for (double r : radii) require(r > 0.0, "polydisk: radii must be positive");
  ReinhardtDomain d;
  d.kind = DomainKind::polydisk;
  d.dimension = static_cast<int>(radii.size());
  d.radii = std::move(radii);
  return d;
}

ReinhardtDomain ReinhardtDomain::unit_polydisk(int n) {
  require(n >= 1, "unit_polydisk: dimension must be >= 1");
  return polydisk(std::vector<double>(n, 1.0));
}

ReinhardtDomain ReinhardtDomain::ball(int n, double radius) {
  require(n >= 1 && radius > 0.0, "ball: need n >= 1 and radius > 0");
  ReinhardtDomain d;
  d.kind = DomainKind::ball;
  d.dimension = n;
  d.radii = {radius};
  return d;
}

double ReinhardtDomain::radius(int i) const {
  if (kind == DomainKind::ball) return radii[0];
  return radii.at(i);
}

bool ReinhardtDomain::contains(std::span<const complexd> z) const {
  if (static_cast<int>(z.size()) != dimension) return false;
  if (kind == DomainKind::polydisk) {
    for (int i = 0; i < dimension; ++i)
      if (std::abs(z[i]) >= radii[i]) return false;
    return true;
  }
  double s = 0.0;
  for (const auto& zi : z) s += std::norm(zi);
  return s < radii[0] * radii[0];
}

// ---------------------------------------------------------------------------
// Radial profiles and weights

RadialProfile linear_profile(double a, double c) {
  RadialProfile p;
  p.g = [a, c](double s) { return a * s + c; };
  p.dg = [a](double) { return a; };
  p.d2g = [](double) { return 0.0; };
  p.linear_coefficient = a;
  p.constant = c;
  return p;
}

RadialProfile polynomial_profile(std::vector<double> coeffs) {
  require(!coeffs.empty(), "polynomial_profile: empty coefficient list");
  auto c = std::make_shared<std::vector<double>>(std::move(coeffs));
  RadialProfile p;
  p.g = [c](double s) {
    double v = 0.0;
    for (std::size_t j = c->size(); j-- > 0;) v = v * s + (*c)[j];
    return v;
  };
  p.dg = [c](double s) {
    double v = 0.0;
    for (std::size_t j = c->size(); j-- > 1;) v = v * s + j * (*c)[j];
    return v;
  };
  p.d2g = [c](double s) {
    double v = 0.0;
    for (std::size_t j = c->size(); j-- > 2;) v = v * s + j * (j - 1.0) * (*c)[j];
    return v;
  };
  if (c->size() <= 2) {
    p.linear_coefficient = c->size() == 2 ? (*c)[1] : 0.0;
    p.constant = (*c)[0];
  }
  return p;
}

RadialProfile zero_profile() { return linear_profile(0.0, 0.0); }

double RadialWeight::value(std::span<const complexd> z) const {
  require(z.size() == profiles.size(), "RadialWeight::value: dimension mismatch");
  double u = 0.0;
  for (std::size_t i = 0; i < profiles.size(); ++i) u += profiles[i].g(std::norm(z[i]));
  return u;
}

double RadialWeight::value_origin() const {
  double u = 0.0;
  for (const auto& p : profiles) u += p.g(0.0);
  return u;
}

RadialWeight RadialWeight::scaled(double k) const {
  require(k > 0.0, "RadialWeight::scaled: factor must be positive");
  RadialWeight w;
  w.profiles.reserve(profiles.size());
  for (const auto& p : profiles) {
    RadialProfile q;
    auto g = p.g, dg = p.dg, d2g = p.d2g;
    q.g = [g, k](double s) { return k * g(s); };
    q.dg = [dg, k](double s) { return k * dg(s); };
    q.d2g = [d2g, k](double s) { return k * d2g(s); };
    if (p.linear_coefficient) q.linear_coefficient = k * (*p.linear_coefficient);
    q.constant = k * p.constant;
    w.profiles.push_back(std::move(q));
  }
  w.hessian_lower = k * hessian_lower;
  w.laplacian_sup = k * laplacian_sup;
  w.name = name + "_x" + std::to_string(k);
  return w;
}

RadialWeight RadialWeight::zero(int n) {
  RadialWeight w;
  w.profiles.assign(n, zero_profile());
  w.hessian_lower = 0.0;
  w.laplacian_sup = 0.0;
  w.name = "zero";
  return w;
}

RadialWeight RadialWeight::gaussian(int n, double a) {
  require(a >= 0.0, "gaussian: a must be >= 0");
  RadialWeight w;
  w.profiles.assign(n, linear_profile(a));
  w.hessian_lower = a;
  w.laplacian_sup = 4.0 * n * a;  // Δ|z|² = 4n
  w.name = "gaussian_a" + std::to_string(a);
  return w;
}

namespace {
// per-coordinate complex Hessian of sum g_i(|z_i|^2) is diagonal with entries
// m_i(s) = g_i'(s) + s g_i''(s), s = |z_i|^2
double hessian_entry(const RadialProfile& p, double s) {
  return p.dg(s) + s * p.d2g(s);
}
}  // namespace

RadialWeight RadialWeight::from_profiles(std::vector<RadialProfile> profiles,
                                         const ReinhardtDomain& domain,
                                         std::string name, int samples) {
  require(static_cast<int>(profiles.size()) == domain.dimension,
          "from_profiles: profile count != dimension");
  RadialWeight w;
  w.profiles = std::move(profiles);
  w.name = std::move(name);
  double lower = std::numeric_limits<double>::infinity();
  double lap = 0.0;
  for (int i = 0; i < domain.dimension; ++i) {
    const double s_max = domain.radius(i) * domain.radius(i);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j < samples; ++j) {
      const double s = s_max * static_cast<double>(j) / (samples - 1);
      const double m = hessian_entry(w.profiles[i], s);
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    lower = std::min(lower, lo);
    lap += hi;
  }
  require(lower >= 0.0, "from_profiles: weight is not plurisubharmonic");
  w.hessian_lower = lower;
  w.laplacian_sup = 4.0 * lap;
  return w;
}

void verify_radial_declarations(const RadialWeight& w, const ReinhardtDomain& domain,
                                int samples, double slack) {
  double lower = std::numeric_limits<double>::infinity();
  double lap = 0.0;
  for (int i = 0; i < w.dimension(); ++i) {
    const double s_max = domain.radius(i) * domain.radius(i);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int j = 0; j < samples; ++j) {
      const double s = s_max * static_cast<double>(j) / (samples - 1);
      const double m = hessian_entry(w.profiles[i], s);
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    lower = std::min(lower, lo);
    lap += hi;
  }
  require(w.hessian_lower <= lower + slack,
          "declared hessian_lower exceeds the sampled bound");
  require(w.laplacian_sup >= 4.0 * lap - slack,
          "declared laplacian_sup is below the sampled bound");
}

// ---------------------------------------------------------------------------
// Planar weights

PlanarWeight PlanarWeight::scaled(double k) const {
  require(k > 0.0, "PlanarWeight::scaled: factor must be positive");
  PlanarWeight w = *this;
  auto f = u;
  w.u = [f, k](complexd z) { return k * f(z); };
  if (hessian_lower) w.hessian_lower = k * (*hessian_lower);
  if (laplacian_sup) w.laplacian_sup = k * (*laplacian_sup);
  w.name = name + "_x" + std::to_string(k);
  return w;
}

double PlanarWeight::laplacian_fd(complexd z, double h) const {
  const complexd dx(h, 0.0), dy(0.0, h);
  return (u(z + dx) + u(z - dx) + u(z + dy) + u(z - dy) - 4.0 * u(z)) / (h * h);
}

double PlanarWeight::laplacian_sup_estimate(int grid, double h) const {
  double sup = -std::numeric_limits<double>::infinity();
  const double rmax = radius - 2.0 * h;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double x = -rmax + 2.0 * rmax * i / (grid - 1);
      const double y = -rmax + 2.0 * rmax * j / (grid - 1);
      if (x * x + y * y >= rmax * rmax) continue;
      sup = std::max(sup, laplacian_fd({x, y}, h));
    }
  return sup;
}

void check_subharmonic(const PlanarWeight& w, int grid, double h, double tol) {
  const double rmax = w.radius - 2.0 * h;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double x = -rmax + 2.0 * rmax * i / (grid - 1);
      const double y = -rmax + 2.0 * rmax * j / (grid - 1);
      if (x * x + y * y >= rmax * rmax) continue;
      if (w.laplacian_fd({x, y}, h) < -tol)
        throw PreconditionViolation("planar weight is not subharmonic at (" +
                                    std::to_string(x) + "," + std::to_string(y) + ")");
    }
}

// ---------------------------------------------------------------------------
// Fubini-Study helpers

double fs_potential(double t) {
  // log(1 + e^t) without overflow
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double fs_slope(double t) {
  return t > 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

double fs_curvature(double t) {
  // sigma(t) * sigma(-t), each factor on its own stable branch -- the naive
  // s*(1-s) cancels to zero past |t| ~ 37 and loses eps*e^|t| before that
  return fs_slope(t) * fs_slope(-t);
}

double log_fs_curvature(double t) { return t - 2.0 * fs_potential(t); }

// ---------------------------------------------------------------------------
// Toric potentials

namespace {

void validate_slopes(const std::vector<double>& slopes) {
  constexpr double eps = 1e-9;
  double prev = -std::numeric_limits<double>::infinity();
  for (double d : slopes) {
    if (d < -eps || d > 1.0 + eps)
      throw SlopeViolation("spline slope " + std::to_string(d) + " outside [0,1]");
    if (d < prev - eps)
      throw SlopeViolation("spline slopes must be non-decreasing");
    prev = std::max(prev, d);
  }
}

struct SplineEval {
  SplineData data;

  int locate(double t) const {
    const int c = data.cells();
    int i = static_cast<int>(std::floor((t - data.t0) / data.h));
    return std::clamp(i, 0, c - 1);
  }
  // quadratic on cell i matching v_i, v_{i+1} and right slope d_i
  double value(double t) const {
    const int N = data.cells();
    const double t_end = data.t0 + N * data.h;
    if (t <= data.t0) return data.values.front() + data.slopes.front() * (t - data.t0);
    if (t >= t_end) return data.values.back() + data.slopes.back() * (t - t_end);
    const int i = locate(t);
    const double dt = t - (data.t0 + i * data.h);
    const double coef =
        (data.values[i + 1] - data.values[i] - data.slopes[i] * data.h) /
        (data.h * data.h);
    return data.values[i] + data.slopes[i] * dt + coef * dt * dt;
  }
  double slope(double t) const {
    const int N = data.cells();
    const double t_end = data.t0 + N * data.h;
    if (t < data.t0) return data.slopes.front();
    if (t >= t_end) return data.slopes.back();
    const int i = locate(t);
    const double dt = t - (data.t0 + i * data.h);
    if (dt == 0.0) return data.slopes[i];  // right derivative at knots
    const double coef =
        (data.values[i + 1] - data.values[i] - data.slopes[i] * data.h) /
        (data.h * data.h);
    return data.slopes[i] + 2.0 * coef * dt;
  }
  double curvature(double t) const {
    const int N = data.cells();
    const double t_end = data.t0 + N * data.h;
    if (t < data.t0 || t >= t_end) return 0.0;
    const int i = locate(t);
    const double coef =
        (data.values[i + 1] - data.values[i] - data.slopes[i] * data.h) /
        (data.h * data.h);
    return 2.0 * coef;
  }
};

}  // namespace

ToricPotential ToricPotential::fubini_study() {
  return closed_form("fubini_study", fs_potential, fs_slope, fs_curvature);
}

ToricPotential ToricPotential::constant_shift(double c) {
  return closed_form("fs_plus_" + std::to_string(c),
                     [c](double t) { return fs_potential(t) + c; }, fs_slope,
                     fs_curvature);
}

ToricPotential ToricPotential::closed_form(std::string name,
                                           std::function<double(double)> value,
                                           std::function<double(double)> slope,
                                           std::function<double(double)> curvature) {
  ToricPotential p;
  p.name_ = std::move(name);
  p.value_ = std::move(value);
  p.slope_ = std::move(slope);
  p.curvature_ = std::move(curvature);
  return p;
}

ToricPotential ToricPotential::test_potential(double s, double c) {
  if (s < 0.0 || s > 1.0)
    throw SlopeViolation("test_potential: blend s must be in [0,1]");
  return closed_form(
      "test_s" + std::to_string(s) + "_c" + std::to_string(c),
      [s, c](double t) { return (1.0 - s) * fs_potential(t) + s * fs_potential(t - c); },
      [s, c](double t) { return (1.0 - s) * fs_slope(t) + s * fs_slope(t - c); },
      [s, c](double t) {
        return (1.0 - s) * fs_curvature(t) + s * fs_curvature(t - c);
      });
}

ToricPotential ToricPotential::sigmoid_mixture(std::vector<double> w,
                                               std::vector<double> scale,
                                               std::vector<double> center) {
  require(w.size() == scale.size() && w.size() == center.size() && !w.empty(),
          "sigmoid_mixture: component lists must match");
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0) throw SlopeViolation("sigmoid_mixture: negative weight");
    if (scale[i] <= 0.0 || scale[i] > 1.0)
      throw SlopeViolation("sigmoid_mixture: scales must lie in (0,1]");
    total += w[i];
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw SlopeViolation("sigmoid_mixture: weights must sum to 1");
  auto wp = std::make_shared<std::vector<double>>(std::move(w));
  auto sp = std::make_shared<std::vector<double>>(std::move(scale));
  auto cp = std::make_shared<std::vector<double>>(std::move(center));
  return closed_form(
      "sigmoid_mixture",
      [wp, sp, cp](double t) {
        double v = 0.0;
        for (std::size_t i = 0; i < wp->size(); ++i)
          v += (*wp)[i] / (*sp)[i] * fs_potential((*sp)[i] * (t - (*cp)[i]));
        return v;
      },
      [wp, sp, cp](double t) {
        double v = 0.0;
        for (std::size_t i = 0; i < wp->size(); ++i)
          v += (*wp)[i] * fs_slope((*sp)[i] * (t - (*cp)[i]));
        return v;
      },
      [wp, sp, cp](double t) {
        double v = 0.0;
        for (std::size_t i = 0; i < wp->size(); ++i)
          v += (*wp)[i] * (*sp)[i] * fs_curvature((*sp)[i] * (t - (*cp)[i]));
        return v;
      });
}

ToricPotential ToricPotential::from_spline_slopes(const GridSpec& grid,
                                                  std::vector<double> slopes,
                                                  double anchor_value) {
  require(static_cast<int>(slopes.size()) == grid.knots,
          "from_spline_slopes: slope count != knot count");
  validate_slopes(slopes);
  SplineData d;
  d.t0 = grid.t_min;
  d.h = grid.step();
  d.slopes = std::move(slopes);
  d.values.resize(d.slopes.size());
  d.values[0] = anchor_value;
  for (std::size_t i = 0; i + 1 < d.values.size(); ++i)
    d.values[i + 1] = d.values[i] + 0.5 * d.h * (d.slopes[i] + d.slopes[i + 1]);
  return from_spline_values_slopes(grid, std::move(d.values), std::move(d.slopes));
}

ToricPotential ToricPotential::from_spline_values_slopes(const GridSpec& grid,
                                                         std::vector<double> values,
                                                         std::vector<double> slopes) {
  require(static_cast<int>(values.size()) == grid.knots &&
              values.size() == slopes.size(),
          "from_spline_values_slopes: size mismatch");
  validate_slopes(slopes);
  SplineData d;
  d.t0 = grid.t_min;
  d.h = grid.step();
  d.values = std::move(values);
  d.slopes = std::move(slopes);
  // convexity within cells and upward slope jumps at knots
  constexpr double eps = 1e-9;
  for (int i = 0; i + 1 < grid.knots; ++i) {
    const double secant = (d.values[i + 1] - d.values[i]) / d.h;
    if (secant < d.slopes[i] - eps)
      throw SlopeViolation("spline cell " + std::to_string(i) +
                           " breaks convexity (secant below left slope)");
    const double end_slope = 2.0 * secant - d.slopes[i];
    if (d.slopes[i + 1] < end_slope - eps)
      throw SlopeViolation("spline knot " + std::to_string(i + 1) +
                           " breaks convexity (slope drops)");
  }
  auto ev = std::make_shared<SplineEval>(SplineEval{d});
  ToricPotential p;
  p.name_ = "spline";
  p.spline_ = std::move(d);
  p.value_ = [ev](double t) { return ev->value(t); };
  p.slope_ = [ev](double t) { return ev->slope(t); };
  p.curvature_ = [ev](double t) { return ev->curvature(t); };
  return p;
}

ToricPotential ToricPotential::from_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open potential file " + path);
  std::vector<double> ts, vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double t, v;
    if (!(row >> t >> v))
      throw ConfigInvalid("potential file " + path + ": bad row '" + line + "'");
    ts.push_back(t);
    vs.push_back(v);
  }
  if (ts.size() < 3) throw ConfigInvalid("potential file " + path + ": too few rows");
  const double h = ts[1] - ts[0];
  for (std::size_t i = 0; i + 1 < ts.size(); ++i)
    if (std::fabs(ts[i + 1] - ts[i] - h) > 1e-9 * std::max(1.0, std::fabs(h)))
      throw ConfigInvalid("potential file " + path + ": grid must be uniform");
  GridSpec grid{ts.front(), ts.back(), static_cast<int>(ts.size())};
  // secant slopes (right derivatives); piecewise-linear interpolation
  std::vector<double> slopes(ts.size());
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) slopes[i] = (vs[i + 1] - vs[i]) / h;
  slopes.back() = slopes[slopes.size() - 2];
  for (double& d : slopes) d = std::clamp(d, 0.0, 1.0);
  return from_spline_values_slopes(grid, std::move(vs), std::move(slopes));
}

ToricPotential ToricPotential::shifted(double c) const {
  auto v = value_, s = slope_, k = curvature_;
  ToricPotential p;
  p.name_ = name_ + "_shift";
  p.value_ = [v, c](double t) { return v(t) + c; };
  p.slope_ = s;
  p.curvature_ = k;
  if (spline_) {
    SplineData d = *spline_;
    for (double& x : d.values) x += c;
    p.spline_ = std::move(d);
  }
  return p;
}

ToricPotential ToricPotential::blended(const ToricPotential& other, double w) const {
  require(w >= 0.0 && w <= 1.0, "blended: weight must be in [0,1]");
  auto va = value_, sa = slope_, ka = curvature_;
  auto vb = other.value_, sb = other.slope_, kb = other.curvature_;
  return closed_form(
      name_ + "_blend_" + other.name_,
      [va, vb, w](double t) { return (1.0 - w) * va(t) + w * vb(t); },
      [sa, sb, w](double t) { return (1.0 - w) * sa(t) + w * sb(t); },
      [ka, kb, w](double t) { return (1.0 - w) * ka(t) + w * kb(t); });
}

ToricPotential ToricPotential::relative_scaled(double s) const {
  require(s >= 0.0 && s <= 1.0, "relative_scaled: factor must be in [0,1]");
  return fubini_study().blended(*this, s);
}

ToricPotential ToricPotential::pointwise_max(const ToricPotential& a,
                                             const ToricPotential& b) {
  auto va = a.value_, sa = a.slope_, ka = a.curvature_;
  auto vb = b.value_, sb = b.slope_, kb = b.curvature_;
  return closed_form(
      "max(" + a.name_ + "," + b.name_ + ")",
      [va, vb](double t) { return std::max(va(t), vb(t)); },
      [va, vb, sa, sb](double t) {
        const double x = va(t), y = vb(t);
        if (x > y) return sa(t);
        if (y > x) return sb(t);
        return std::max(sa(t), sb(t));  // right derivative at a crossing
      },
      [va, vb, ka, kb](double t) {
        // defined off the crossing set
        return va(t) >= vb(t) ? ka(t) : kb(t);
      });
}

// ---------------------------------------------------------------------------
// Curvature bounds

CurvatureBounds test_potential_bounds(double s, double c) {
  const double e = std::exp(std::fabs(c));
  return {(1.0 - s) + s / e, (1.0 - s) + s * e};
}

CurvatureBounds sampled_curvature_bounds(const ToricPotential& phi,
                                         const GridSpec& grid) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < grid.knots; ++i) {
    const double t = grid.knot(i) + 0.5 * grid.step();  // stay off spline knots
    if (t >= grid.t_max) break;
    const double r = phi.curvature(t) / fs_curvature(t);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, hi};
}

void verify_curvature_bounds(const ToricPotential& phi, const CurvatureBounds& b,
                             const GridSpec& grid, double slack) {
  const CurvatureBounds s = sampled_curvature_bounds(phi, grid);
  require(s.a >= b.a - slack, "curvature ratio drops below the declared a");
  require(s.A <= b.A + slack, "curvature ratio exceeds the declared A");
}

void verify_full_mass(const ToricPotential& phi, const GridSpec& grid, double tol) {
  double prev = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.knots; ++i) {
    const double d = phi.slope(grid.knot(i));
    if (d < prev - 1e-9) throw SlopeViolation("potential slope decreases");
    prev = std::max(prev, d);
  }
  if (std::fabs(phi.slope(grid.t_min)) > tol)
    throw SlopeViolation("slope at the left grid end is not 0");
  if (std::fabs(phi.slope(grid.t_max) - 1.0) > tol)
    throw SlopeViolation("slope at the right grid end is not 1");
}

}  // namespace berglab::weights
