#include "berglab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "berglab/errors.hpp"
#include "berglab/weights.hpp"

namespace berglab::quadrature {
namespace {

// Gauss-Kronrod 7-15 nodes and weights (QUADPACK dqk15), positive half.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class MapKind { identity, right_infinite, left_infinite };

// finite parameter interval [u0, u1] mapped onto part of the original axis
struct Segment {
  double u0, u1;
  MapKind map;
  double anchor;  // finite endpoint for the infinite maps
  double value = 0.0;
  double error = 0.0;
  std::uint64_t id = 0;
};

struct SegmentOrder {
  bool operator()(const Segment& a, const Segment& b) const {
    if (a.error != b.error) return a.error < b.error;
    return a.id > b.id;  // deterministic tie-break: older segment first
  }
};

double map_eval(const std::function<double(double)>& f, MapKind map,
                double anchor, double u) {
  switch (map) {
    case MapKind::identity:
      return f(u);
    case MapKind::right_infinite: {  // x = anchor + u/(1-u), u in [0,1)
      const double om = 1.0 - u;
      const double x = anchor + u / om;
      return f(x) / (om * om);
    }
    case MapKind::left_infinite: {  // x = anchor - u/(1-u)
      const double om = 1.0 - u;
      const double x = anchor - u / om;
      return f(x) / (om * om);
    }
  }
  return 0.0;
}

// QUADPACK-style 15-point Kronrod rule with error estimate
void qk15(const std::function<double(double)>& f, MapKind map, double anchor,
          Segment& seg, std::size_t& evaluations) {
  const double center = 0.5 * (seg.u0 + seg.u1);
  const double half = 0.5 * (seg.u1 - seg.u0);

  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = map_eval(f, map, anchor, center - half * kXgk[i]);
    fv[14 - i] = map_eval(f, map, anchor, center + half * kXgk[i]);
  }
  fv[7] = map_eval(f, map, anchor, center);
  evaluations += 15;

  double resk = 0.0, resg = 0.0, resabs = 0.0;
  for (int i = 0; i < 7; ++i) {
    resk += kWgk[i] * (fv[i] + fv[14 - i]);
    resabs += kWgk[i] * (std::fabs(fv[i]) + std::fabs(fv[14 - i]));
  }
  resk += kWgk[7] * fv[7];
  resabs += kWgk[7] * std::fabs(fv[7]);
  // Gauss nodes are the odd Kronrod nodes
  resg = kWg[3] * fv[7];
  resg += kWg[0] * (fv[1] + fv[13]);
  resg += kWg[1] * (fv[3] + fv[11]);
  resg += kWg[2] * (fv[5] + fv[9]);

  const double mean = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fv[7] - mean);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::fabs(fv[i] - mean) + std::fabs(fv[14 - i] - mean));

  seg.value = resk * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);
  double err = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50)
    err = std::max(err, eps50 * resabs);
  seg.error = err;
  if (!std::isfinite(seg.value))
    throw NonConvergent("integrand produced a non-finite value");
}

}  // namespace

std::vector<std::pair<double, double>> gk15_panel_rule(double a, double b,
                                                       int panels) {
  if (!(a < b) || panels < 1)
    throw PreconditionViolation("gk15_panel_rule: need a < b and panels >= 1");
  std::vector<std::pair<double, double>> rule;
  rule.reserve(static_cast<std::size_t>(panels) * 15);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double center = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (int i = 0; i < 7; ++i)
      rule.emplace_back(center - half * kXgk[i], half * kWgk[i]);
    rule.emplace_back(center, half * kWgk[7]);
    for (int i = 6; i >= 0; --i)
      rule.emplace_back(center + half * kXgk[i], half * kWgk[i]);
  }
  return rule;
}

QuadratureResult integrate(const Integrand1D& q, const Options& opts) {
  if (!(q.lower < q.upper))
    throw PreconditionViolation("integrate: lower must be < upper");

  std::vector<double> cuts(q.breakpoints);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto inside = [&](double x) { return x > q.lower && x < q.upper; };

  // Initial segments: finite core split at breakpoints, infinite tails folded
  // onto [0,1) with rho = s/(1-s).
  std::vector<Segment> initial;
  const bool left_inf = std::isinf(q.lower);
  const bool right_inf = std::isinf(q.upper);
  double core_lo = q.lower, core_hi = q.upper;
  if (left_inf) {
    core_lo = 0.0;
    for (double c : cuts)
      if (std::isfinite(c)) core_lo = std::min(core_lo, c);
    if (std::isfinite(q.upper)) core_lo = std::min(core_lo, q.upper - 1.0);
  }
  if (right_inf) {
    core_hi = 0.0;
    for (double c : cuts)
      if (std::isfinite(c)) core_hi = std::max(core_hi, c);
    if (std::isfinite(q.lower)) core_hi = std::max(core_hi, q.lower + 1.0);
  }
  if (left_inf)
    initial.push_back({0.0, 1.0, MapKind::left_infinite, core_lo});
  if (right_inf)
    initial.push_back({0.0, 1.0, MapKind::right_infinite, core_hi});

  std::vector<double> knots;
  knots.push_back(core_lo);
  for (double c : cuts)
    if (inside(c) && c > core_lo && c < core_hi) knots.push_back(c);
  knots.push_back(core_hi);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    if (knots[i] < knots[i + 1])
      initial.push_back({knots[i], knots[i + 1], MapKind::identity, 0.0});

  std::priority_queue<Segment, std::vector<Segment>, SegmentOrder> heap;
  std::size_t evaluations = 0;
  std::uint64_t next_id = 0;
  double total_value = 0.0, total_error = 0.0;

  auto push = [&](Segment seg) {
    seg.id = next_id++;
    qk15(q.f, seg.map, seg.anchor, seg, evaluations);
    total_value += seg.value;
    total_error += seg.error;
    heap.push(seg);
  };
  for (auto& seg : initial) push(seg);

  auto target = [&] { return std::max(opts.tol * std::fabs(total_value), opts.tol); };

  while (total_error > target()) {
    if (evaluations >= opts.max_evaluations)
      throw NonConvergent("integrate: evaluation budget exhausted (error " +
                          std::to_string(total_error) + ")");
    if (heap.empty())
      throw NonConvergent("integrate: tolerance unreachable at rounding resolution");
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.u0 + worst.u1);
    if (!(mid > worst.u0 && mid < worst.u1)) continue;  // retire: cannot split further
    total_value -= worst.value;
    total_error -= worst.error;
    push({worst.u0, mid, worst.map, worst.anchor});
    push({mid, worst.u1, worst.map, worst.anchor});
  }

  return {total_value, total_error, evaluations};
}

QuadratureResult integrate(const std::function<double(double)>& f, double lower,
                           double upper, double tol) {
  Integrand1D q;
  q.f = f;
  q.lower = lower;
  q.upper = upper;
  Options opts;
  opts.tol = tol;
  return integrate(q, opts);
}

double log_power_integral(const std::function<double(double)>& g, double s_max,
                          double power, double tol) {
  require(s_max > 0.0, "log_power_integral: s_max must be positive");
  require(power >= 0.0, "log_power_integral: power must be >= 0");

  auto exponent = [&](double s) {
    if (s <= 0.0) return power == 0.0 ? -g(0.0) : -kInf;
    return power * std::log(s) - g(s);
  };

  // peak scan for the normalizing shift
  const int scan = 1025;
  double peak = -kInf, s_peak = s_max;
  for (int i = 0; i <= scan; ++i) {
    const double s = s_max * static_cast<double>(i) / scan;
    const double h = exponent(s);
    if (h > peak) {
      peak = h;
      s_peak = s;
    }
  }
  if (!std::isfinite(peak))
    throw NonConvergent("log_power_integral: profile has no finite peak");

  Integrand1D q;
  q.f = [&, peak](double s) { return std::exp(exponent(s) - peak); };
  q.lower = 0.0;
  q.upper = s_max;
  if (s_peak > 0.0 && s_peak < s_max) q.breakpoints.push_back(s_peak);
  Options opts;
  opts.tol = tol;
  const auto res = integrate(q, opts);
  if (!(res.value > 0.0))
    throw NonConvergent("log_power_integral: non-positive normalized integral");
  return peak + std::log(res.value);
}

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;
}

double log_moment(const weights::ReinhardtDomain& domain,
                  const weights::RadialWeight& weight, std::span<const int> alpha,
                  double tol) {
  const int n = domain.dimension;
  require(static_cast<int>(alpha.size()) == n, "log_moment: index size != dimension");
  require(weight.dimension() == n, "log_moment: weight dimension != domain dimension");
  for (int a : alpha) require(a >= 0, "log_moment: negative index entry");

  if (domain.kind == weights::DomainKind::polydisk) {
    // |z^alpha|^2 e^{-sum g_i} factors; per coordinate (s = r^2)
    //   2π ∫_0^{R} r^{2a+1} e^{-g(r²)} dr = π ∫_0^{R²} s^a e^{-g(s)} ds
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s_max = domain.radius(i) * domain.radius(i);
      total += std::log(kPi) +
               log_power_integral(weight.profiles[i].g, s_max, alpha[i], tol);
    }
    return total;
  }

  // Ball: need u = g(|z|^2) globally radial, which for product-radial weights
  // means every profile is the same linear map a*s + c_i.
  double a_coeff = 0.0, c_total = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& p = weight.profiles[i];
    require(p.linear_coefficient.has_value(),
            "log_moment: ball moments need linear radial profiles");
    if (i == 0)
      a_coeff = *p.linear_coefficient;
    else
      require(*p.linear_coefficient == a_coeff,
              "log_moment: ball moments need equal linear coefficients");
    c_total += p.constant;
  }
  int total_degree = 0;
  double log_pref = n * std::log(kPi);
  for (int i = 0; i < n; ++i) {
    total_degree += alpha[i];
    log_pref += std::lgamma(alpha[i] + 1.0);
  }
  log_pref -= std::lgamma(n + total_degree);  // (n-1+|alpha|)!
  const double R2 = domain.radius(0) * domain.radius(0);
  auto g = [a_coeff, c_total](double s) { return a_coeff * s + c_total; };
  return log_pref +
         log_power_integral(g, R2, static_cast<double>(total_degree + n - 1), tol);
}

double moment(const weights::ReinhardtDomain& domain,
              const weights::RadialWeight& weight, std::span<const int> alpha,
              double tol) {
  return std::exp(log_moment(domain, weight, alpha, tol));
}

}  // namespace berglab::quadrature
