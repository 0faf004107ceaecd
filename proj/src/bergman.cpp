#include "berglab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "berglab/errors.hpp"
#include "berglab/quadrature.hpp"

namespace berglab::bergman {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

using cld = std::complex<long double>;

int total_degree(const std::vector<int>& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

}  // namespace

std::vector<std::vector<int>> graded_indices(int n, int degree) {
  require(n >= 1 && degree >= 0, "graded_indices: need n >= 1, degree >= 0");
  std::vector<std::vector<int>> out;
  std::vector<int> alpha(n, 0);
  std::function<void(int, int)> fill = [&](int pos, int left) {
    if (pos == n - 1) {
      alpha[pos] = left;
      out.push_back(alpha);
      return;
    }
    for (int a = 0; a <= left; ++a) {
      alpha[pos] = a;
      fill(pos + 1, left - a);
    }
  };
  for (int q = 0; q <= degree; ++q) fill(0, q);
  return out;
}

complexd GramMatrix::entry(int a, int b) const {
  const int n = size();
  require(a >= 0 && a < n && b >= 0 && b < n, "GramMatrix::entry out of range");
  if (diagonal) return a == b ? complexd(std::exp(log_diag[a]), 0.0) : complexd(0.0, 0.0);
  return dense[static_cast<std::size_t>(a) * n + b];
}

GramMatrix gram_matrix(const weights::ReinhardtDomain& domain,
                       const weights::RadialWeight& weight, int degree,
                       double quad_tol) {
  const int n = domain.dimension;
  require(n == weight.dimension(), "gram_matrix: weight/domain dimension mismatch");
  require(degree >= 0, "gram_matrix: degree must be >= 0");

  GramMatrix g;
  g.dimension = n;
  g.degree = degree;
  g.indices = graded_indices(n, degree);
  g.diagonal = true;
  g.log_diag.resize(g.indices.size());

  if (domain.kind == weights::DomainKind::polydisk) {
    // per-coordinate tables log( pi * int_0^{R_i^2} s^p e^{-g_i(s)} ds )
    std::vector<std::vector<double>> table(n);
    for (int i = 0; i < n; ++i) {
      const double s_max = domain.radius(i) * domain.radius(i);
      table[i].resize(degree + 1);
      for (int p = 0; p <= degree; ++p)
        table[i][p] = std::log(kPi) + quadrature::log_power_integral(
                                          weight.profiles[i].g, s_max, p, quad_tol);
    }
    for (std::size_t j = 0; j < g.indices.size(); ++j) {
      double lm = 0.0;
      for (int i = 0; i < n; ++i) lm += table[i][g.indices[j][i]];
      g.log_diag[j] = lm;
    }
  } else {
    // ball: needs a globally radial weight, i.e. all profiles linear with one
    // common slope, so that u depends on |z|^2 alone
    double a = 0.0, c = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto& p = weight.profiles[i];
      if (!p.linear_coefficient)
        throw PreconditionViolation(
            "gram_matrix: ball moments need linear radial profiles");
      if (i == 0)
        a = *p.linear_coefficient;
      else if (*p.linear_coefficient != a)
        throw PreconditionViolation(
            "gram_matrix: ball moments need one common linear coefficient");
      c += p.constant;
    }
    const double s_max = domain.radius(0) * domain.radius(0);
    std::vector<double> total(degree + 1);
    for (int q = 0; q <= degree; ++q)
      total[q] = quadrature::log_power_integral(
          [a, c](double s) { return a * s + c; }, s_max, q + n - 1, quad_tol);
    for (std::size_t j = 0; j < g.indices.size(); ++j) {
      const auto& alpha = g.indices[j];
      const int q = total_degree(alpha);
      double lm = n * std::log(kPi) - std::lgamma(static_cast<double>(n + q));
      for (int i = 0; i < n; ++i) lm += std::lgamma(alpha[i] + 1.0);
      g.log_diag[j] = lm + total[q];
    }
  }
  return g;
}

GramMatrix gram_matrix_planar(const weights::PlanarWeight& weight, int degree,
                              int radial_panels, int angular_points) {
  require(degree >= 0, "gram_matrix_planar: degree must be >= 0");
  require(radial_panels >= 1 && angular_points >= 8,
          "gram_matrix_planar: rule too small");
  require(weight.radius > 0.0, "gram_matrix_planar: radius must be positive");

  GramMatrix g;
  g.dimension = 1;
  g.degree = degree;
  g.indices = graded_indices(1, degree);
  g.diagonal = false;
  const int N = degree + 1;
  g.dense.assign(static_cast<std::size_t>(N) * N, complexd(0.0, 0.0));

  const auto rule = quadrature::gk15_panel_rule(0.0, weight.radius, radial_panels);
  const double dtheta = 2.0 * kPi / angular_points;

  // per radial node: angular Fourier data c(d) = dtheta * sum_m e^{-u} e^{i d theta_m}
  // (d >= 0 suffices, c(-d) = conj(c(d)) since the weight is real) and powers r^q
  const std::size_t P = rule.size();
  std::vector<std::vector<complexd>> fourier(P);
  std::vector<std::vector<double>> rpow(P);
  for (std::size_t p = 0; p < P; ++p) {
    const double r = rule[p].first;
    std::vector<complexd> c(degree + 1, complexd(0.0, 0.0));
    for (int m = 0; m < angular_points; ++m) {
      const double theta = m * dtheta;
      const complexd dir = std::polar(1.0, theta);
      complexd cur(std::exp(-weight.u(r * dir)) * dtheta, 0.0);
      for (int d = 0; d <= degree; ++d) {
        c[d] += cur;
        cur *= dir;
      }
    }
    fourier[p] = std::move(c);
    rpow[p].resize(2 * degree + 2);
    rpow[p][0] = 1.0;
    for (int q = 1; q <= 2 * degree + 1; ++q) rpow[p][q] = rpow[p][q - 1] * r;
  }

  for (int a = 0; a < N; ++a) {
    for (int b = 0; b <= a; ++b) {
      long double re = 0.0L, im = 0.0L;
      for (std::size_t p = 0; p < P; ++p) {
        const long double w = rule[p].second * rpow[p][a + b + 1];
        const complexd& c = fourier[p][a - b];
        re += w * c.real();
        im += w * c.imag();
      }
      g.dense[static_cast<std::size_t>(a) * N + b] =
          complexd(static_cast<double>(re), static_cast<double>(im));
      g.dense[static_cast<std::size_t>(b) * N + a] =
          complexd(static_cast<double>(re), -static_cast<double>(im));
    }
  }
  return g;
}

OrthonormalBasis orthonormalize(const GramMatrix& gram) {
  OrthonormalBasis basis;
  basis.dimension = gram.dimension;
  basis.degree = gram.degree;
  basis.indices = gram.indices;
  basis.diagonal = gram.diagonal;

  if (gram.diagonal) {
    basis.log_diag = gram.log_diag;
    const auto [mn, mx] =
        std::minmax_element(gram.log_diag.begin(), gram.log_diag.end());
    basis.condition = std::exp(*mx - *mn);  // diagnostic; log path stays exact
    return basis;
  }

  const int N = gram.size();
  std::vector<cld> L(static_cast<std::size_t>(N) * N, cld(0.0L, 0.0L));
  for (int j = 0; j < N; ++j) {
    for (int i = j; i < N; ++i) {
      cld acc = gram.dense[static_cast<std::size_t>(i) * N + j];
      for (int k = 0; k < j; ++k)
        acc -= L[static_cast<std::size_t>(i) * N + k] *
               std::conj(L[static_cast<std::size_t>(j) * N + k]);
      if (i == j) {
        if (!(acc.real() > 0.0L))
          throw IllConditioned("Gram factorization lost positivity at pivot " +
                               std::to_string(j));
        L[static_cast<std::size_t>(j) * N + j] = std::sqrt(acc.real());
      } else {
        L[static_cast<std::size_t>(i) * N + j] =
            acc / L[static_cast<std::size_t>(j) * N + j].real();
      }
    }
  }

  long double dmin = std::numeric_limits<long double>::infinity(), dmax = 0.0L;
  for (int j = 0; j < N; ++j) {
    const long double d = L[static_cast<std::size_t>(j) * N + j].real();
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  basis.condition = static_cast<double>((dmax / dmin) * (dmax / dmin));
  if (basis.condition > 1e14)
    throw IllConditioned("Gram condition estimate " +
                         std::to_string(basis.condition) +
                         " exceeds 1e14; lower the degree");

  // C = L^{-1}, column by column via forward substitution
  basis.coeff.assign(static_cast<std::size_t>(N) * N, complexd(0.0, 0.0));
  std::vector<cld> x(N);
  for (int j = 0; j < N; ++j) {
    std::fill(x.begin(), x.end(), cld(0.0L, 0.0L));
    x[j] = 1.0L / L[static_cast<std::size_t>(j) * N + j].real();
    for (int i = j + 1; i < N; ++i) {
      cld s(0.0L, 0.0L);
      for (int k = j; k < i; ++k)
        s += L[static_cast<std::size_t>(i) * N + k] * x[k];
      x[i] = -s / L[static_cast<std::size_t>(i) * N + i].real();
    }
    for (int i = j; i < N; ++i)
      basis.coeff[static_cast<std::size_t>(i) * N + j] =
          complexd(static_cast<double>(x[i].real()),
                   static_cast<double>(x[i].imag()));
  }
  basis.chol = std::move(L);
  return basis;
}

// ---------------------------------------------------------------------------
// Evaluation. The diagonal path works on (log magnitude, phase) pairs so z^a
// for huge a and tiny Gram entries never leave log scale.

namespace {

struct LogComplex {
  double lm = kNegInf;  // log magnitude, -inf encodes zero
  double ph = 0.0;
};

struct PointLog {
  std::vector<double> lr;  // log|z_i|
  std::vector<double> th;  // arg z_i
};

PointLog point_log(std::span<const complexd> z) {
  PointLog p;
  p.lr.reserve(z.size());
  p.th.reserve(z.size());
  for (const complexd& zi : z) {
    const double a = std::abs(zi);
    p.lr.push_back(a > 0.0 ? std::log(a) : kNegInf);
    p.th.push_back(a > 0.0 ? std::arg(zi) : 0.0);
  }
  return p;
}

LogComplex monomial_log(const PointLog& p, const std::vector<int>& alpha) {
  LogComplex m{0.0, 0.0};
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] == 0) continue;
    if (p.lr[i] == kNegInf) return LogComplex{};
    m.lm += alpha[i] * p.lr[i];
    m.ph += alpha[i] * p.th[i];
  }
  return m;
}

// directional derivative of z^alpha along v as a LogComplex
LogComplex monomial_derivative_log(const PointLog& p,
                                   const std::vector<int>& alpha,
                                   std::span<const complexd> v) {
  const std::size_t n = alpha.size();
  std::vector<LogComplex> terms;
  terms.reserve(n);
  std::vector<int> shifted;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0) continue;
    const double av = std::abs(v[i]);
    if (av == 0.0) continue;
    shifted = alpha;
    --shifted[i];
    const LogComplex base = monomial_log(p, shifted);
    if (base.lm == kNegInf) continue;
    terms.push_back(LogComplex{std::log(av) + std::log(double(alpha[i])) + base.lm,
                               std::arg(v[i]) + base.ph});
  }
  if (terms.empty()) return LogComplex{};
  double peak = kNegInf;
  for (const LogComplex& t : terms) peak = std::max(peak, t.lm);
  complexd acc(0.0, 0.0);
  for (const LogComplex& t : terms)
    acc += std::polar(std::exp(t.lm - peak), t.ph);
  const double a = std::abs(acc);
  if (a == 0.0) return LogComplex{};
  return LogComplex{peak + std::log(a), std::arg(acc)};
}

double log_sum_exp(const std::vector<double>& xs) {
  double peak = kNegInf;
  for (double x : xs) peak = std::max(peak, x);
  if (peak == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs)
    if (x != kNegInf) s += std::exp(x - peak);
  return peak + std::log(s);
}

// log of |e_j(z)| and arg e_j(z) for every basis element (diagonal path)
std::vector<LogComplex> diagonal_values(const OrthonormalBasis& b,
                                        const PointLog& p) {
  std::vector<LogComplex> out(b.indices.size());
  for (std::size_t j = 0; j < b.indices.size(); ++j) {
    const LogComplex m = monomial_log(p, b.indices[j]);
    if (m.lm == kNegInf) continue;
    out[j] = LogComplex{m.lm - 0.5 * b.log_diag[j], m.ph};
  }
  return out;
}

std::vector<LogComplex> diagonal_derivatives(const OrthonormalBasis& b,
                                             const PointLog& p,
                                             std::span<const complexd> v) {
  std::vector<LogComplex> out(b.indices.size());
  for (std::size_t j = 0; j < b.indices.size(); ++j) {
    const LogComplex m = monomial_derivative_log(p, b.indices[j], v);
    if (m.lm == kNegInf) continue;
    out[j] = LogComplex{m.lm - 0.5 * b.log_diag[j], m.ph};
  }
  return out;
}

// rank-one corrected sup from basis values u_j and derivative values w_j,
// scale-shifted so nothing overflows: returns K~ = W - |P|^2 / U where
// W = sum |w|^2, U = sum |u|^2, P = sum w conj(u).
template <typename Real>
double rank_one_extremal(const std::vector<LogComplex>& us,
                         const std::vector<LogComplex>& ws) {
  double su = kNegInf, sw = kNegInf;
  for (const LogComplex& u : us) su = std::max(su, u.lm);
  for (const LogComplex& w : ws) sw = std::max(sw, w.lm);
  if (sw == kNegInf) return 0.0;
  require(su != kNegInf, "rank_one_extremal: empty evaluation vector");
  Real U = 0, W = 0;
  std::complex<Real> Pc(0, 0);
  for (std::size_t j = 0; j < us.size(); ++j) {
    const double lu = us[j].lm, lw = ws[j].lm;
    if (lu != kNegInf) {
      const Real a = static_cast<Real>(std::exp(lu - su));
      U += a * a;
    }
    if (lw != kNegInf) {
      const Real a = static_cast<Real>(std::exp(lw - sw));
      W += a * a;
    }
    if (lu != kNegInf && lw != kNegInf) {
      const Real a = static_cast<Real>(std::exp((lw - sw) + (lu - su)));
      const double dphi = ws[j].ph - us[j].ph;
      Pc += std::complex<Real>(a * static_cast<Real>(std::cos(dphi)),
                               a * static_cast<Real>(std::sin(dphi)));
    }
  }
  const Real corrected = W - std::norm(Pc) / U;
  return std::exp(2.0 * sw) * std::max<double>(0.0, static_cast<double>(corrected));
}

// dense path (n = 1): monomial vector and its directional derivative
void dense_monomials(complexd z, complexd v, int degree,
                     std::vector<complexd>& m, std::vector<complexd>& d) {
  m.assign(degree + 1, complexd(0.0, 0.0));
  d.assign(degree + 1, complexd(0.0, 0.0));
  m[0] = complexd(1.0, 0.0);
  for (int b = 1; b <= degree; ++b) m[b] = m[b - 1] * z;
  for (int b = 1; b <= degree; ++b) d[b] = double(b) * m[b - 1] * v;
}

// route (a): explicit C * vec products in double
void dense_basis_values(const OrthonormalBasis& b,
                        const std::vector<complexd>& rhs,
                        std::vector<complexd>& out) {
  const int N = b.size();
  out.assign(N, complexd(0.0, 0.0));
  for (int j = 0; j < N; ++j) {
    complexd s(0.0, 0.0);
    for (int k = 0; k <= j; ++k)
      s += b.coeff[static_cast<std::size_t>(j) * N + k] * rhs[k];
    out[j] = s;
  }
}

// route (b): forward substitution against the long double Cholesky factor
std::vector<cld> dense_solve(const OrthonormalBasis& b,
                             const std::vector<complexd>& rhs) {
  const int N = b.size();
  std::vector<cld> y(N);
  for (int i = 0; i < N; ++i) {
    cld s(rhs[i].real(), rhs[i].imag());
    for (int k = 0; k < i; ++k)
      s -= b.chol[static_cast<std::size_t>(i) * N + k] * y[k];
    y[i] = s / b.chol[static_cast<std::size_t>(i) * N + i].real();
  }
  return y;
}

std::vector<complexd> normalized_direction(std::span<const complexd> v) {
  double norm2 = 0.0;
  for (const complexd& vi : v) norm2 += std::norm(vi);
  require(norm2 > 0.0, "tilde_kernel: direction must be nonzero");
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<complexd> out(v.begin(), v.end());
  for (complexd& vi : out) vi *= inv;
  return out;
}

}  // namespace

double log_kernel_diag(const OrthonormalBasis& basis,
                       std::span<const complexd> z) {
  require(static_cast<int>(z.size()) == basis.dimension,
          "log_kernel_diag: point dimension mismatch");
  if (basis.diagonal) {
    const PointLog p = point_log(z);
    std::vector<double> exps;
    exps.reserve(basis.indices.size());
    for (std::size_t j = 0; j < basis.indices.size(); ++j) {
      const LogComplex m = monomial_log(p, basis.indices[j]);
      if (m.lm == kNegInf) continue;
      exps.push_back(2.0 * m.lm - basis.log_diag[j]);
    }
    return log_sum_exp(exps);
  }
  std::vector<complexd> m, d, u;
  dense_monomials(z[0], complexd(0.0, 0.0), basis.degree, m, d);
  dense_basis_values(basis, m, u);
  long double k = 0.0L;
  for (const complexd& uj : u) k += static_cast<long double>(std::norm(uj));
  return std::log(static_cast<double>(k));
}

double kernel_diag(const OrthonormalBasis& basis, std::span<const complexd> z) {
  return std::exp(log_kernel_diag(basis, z));
}

double tilde_kernel(const OrthonormalBasis& basis, std::span<const complexd> z,
                    std::span<const complexd> v) {
  require(static_cast<int>(z.size()) == basis.dimension &&
              static_cast<int>(v.size()) == basis.dimension,
          "tilde_kernel: dimension mismatch");
  const std::vector<complexd> vn = normalized_direction(v);
  if (basis.size() <= 1) return 0.0;  // only constants: the constrained space is {0}

  double route_a = 0.0, route_b = 0.0, scale = 0.0;
  if (basis.diagonal) {
    const PointLog p = point_log(z);
    const std::vector<LogComplex> us = diagonal_values(basis, p);
    const std::vector<LogComplex> ws = diagonal_derivatives(basis, p, vn);
    route_a = rank_one_extremal<double>(us, ws);
    route_b = rank_one_extremal<long double>(us, ws);
    double sw = kNegInf;
    for (const LogComplex& w : ws) sw = std::max(sw, w.lm);
    scale = sw == kNegInf ? 0.0 : std::exp(2.0 * sw);
  } else {
    std::vector<complexd> m, d;
    dense_monomials(z[0], vn[0], basis.degree, m, d);
    std::vector<complexd> u, w;
    dense_basis_values(basis, m, u);
    dense_basis_values(basis, d, w);
    long double U = 0.0L, W = 0.0L;
    cld P(0.0L, 0.0L);
    for (int j = 0; j < basis.size(); ++j) {
      U += static_cast<long double>(std::norm(u[j]));
      W += static_cast<long double>(std::norm(w[j]));
      P += cld(w[j].real(), w[j].imag()) * cld(u[j].real(), -u[j].imag());
    }
    route_a = std::max(0.0, static_cast<double>(W - std::norm(P) / U));
    const std::vector<cld> y = dense_solve(basis, m);
    const std::vector<cld> x = dense_solve(basis, d);
    long double U2 = 0.0L, W2 = 0.0L;
    cld P2(0.0L, 0.0L);
    for (int j = 0; j < basis.size(); ++j) {
      U2 += std::norm(y[j]);
      W2 += std::norm(x[j]);
      P2 += x[j] * std::conj(y[j]);
    }
    route_b = std::max(0.0, static_cast<double>(W2 - std::norm(P2) / U2));
    scale = static_cast<double>(W2);
  }

  const double diff = std::fabs(route_a - route_b);
  const double denom = std::max(std::fabs(route_a), std::fabs(route_b));
  if (diff > 1e-7 * std::max(denom, 1e-6 * scale))
    throw CrossCheckMismatch(
        "tilde_kernel routes disagree: " + std::to_string(route_a) + " vs " +
        std::to_string(route_b));
  return route_b;
}

double bergman_metric(const OrthonormalBasis& basis,
                      std::span<const complexd> z,
                      std::span<const complexd> v) {
  return tilde_kernel(basis, z, v) / kernel_diag(basis, z);
}

double bergman_metric_fd(const OrthonormalBasis& basis,
                         std::span<const complexd> z,
                         std::span<const complexd> v, double h) {
  require(h > 0.0, "bergman_metric_fd: step must be positive");
  const std::vector<complexd> vn = normalized_direction(v);
  std::vector<complexd> p(z.begin(), z.end());
  const auto log_k_at = [&](complexd zeta) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + zeta * vn[i];
    return log_kernel_diag(basis, p);
  };
  const double center = log_kernel_diag(basis, z);
  const double sum = log_k_at({h, 0.0}) + log_k_at({-h, 0.0}) +
                     log_k_at({0.0, h}) + log_k_at({0.0, -h});
  return (sum - 4.0 * center) / (4.0 * h * h);
}

double taylor_kernel_at_zero(const OrthonormalBasis& basis, int m) {
  require(basis.dimension == 1, "taylor_kernel_at_zero: n = 1 only");
  require(m >= 0 && m <= basis.degree, "taylor_kernel_at_zero: order out of range");
  if (basis.diagonal) return std::exp(-basis.log_diag[m]);
  const int N = basis.size();
  long double s = 0.0L;
  for (int j = m; j < N; ++j)
    s += static_cast<long double>(
        std::norm(basis.coeff[static_cast<std::size_t>(j) * N + m]));
  return static_cast<double>(s);
}

// ---------------------------------------------------------------------------
// Adaptive truncation

namespace {

template <typename BuildBasis>
KernelValue adaptive_kernel(const BuildBasis& build, std::span<const complexd> z,
                            std::span<const complexd> v,
                            const TruncationOptions& opts, bool dense_path) {
  require(opts.start_degree >= 1 && opts.max_degree >= opts.start_degree,
          "kernel_at: bad truncation options");
  KernelValue prev;
  bool have_prev = false;
  for (int degree = opts.start_degree; degree <= opts.max_degree; degree *= 2) {
    OrthonormalBasis basis;
    try {
      basis = build(degree);
    } catch (const IllConditioned&) {
      // truncations are certified lower approximations: keep the last degree
      // that factored cleanly
      if (dense_path && have_prev) return prev;
      throw;
    }
    KernelValue cur;
    cur.degree = degree;
    cur.log_kernel = log_kernel_diag(basis, z);
    cur.kernel = std::exp(cur.log_kernel);
    if (!v.empty()) {
      cur.tilde = tilde_kernel(basis, z, v);
      cur.metric = cur.tilde / cur.kernel;
    }
    if (have_prev && std::fabs(cur.log_kernel - prev.log_kernel) <= opts.rel_tol)
      return cur;
    prev = cur;
    have_prev = true;
  }
  throw NonConvergent("kernel truncation not stable by degree " +
                      std::to_string(opts.max_degree));
}

}  // namespace

KernelValue kernel_at(const weights::ReinhardtDomain& domain,
                      const weights::RadialWeight& weight,
                      std::span<const complexd> z, std::span<const complexd> v,
                      const TruncationOptions& opts) {
  require(domain.contains(z), "kernel_at: point outside the domain");
  return adaptive_kernel(
      [&](int degree) {
        return orthonormalize(gram_matrix(domain, weight, degree, opts.quad_tol));
      },
      z, v, opts, /*dense_path=*/false);
}

KernelValue kernel_at(const weights::PlanarWeight& weight, complexd z,
                      complexd v, const TruncationOptions& opts) {
  require(std::abs(z) < weight.radius, "kernel_at: point outside the disk");
  const std::vector<complexd> zs{z};
  const std::vector<complexd> vs = (v == complexd(0.0, 0.0))
                                       ? std::vector<complexd>{}
                                       : std::vector<complexd>{v};
  return adaptive_kernel(
      [&](int degree) {
        return orthonormalize(gram_matrix_planar(weight, degree,
                                                 opts.radial_panels,
                                                 opts.angular_points));
      },
      zs, vs, opts, /*dense_path=*/true);
}

double demailly_approx(const weights::ReinhardtDomain& domain,
                       const weights::RadialWeight& weight, int k,
                       std::span<const complexd> z,
                       const TruncationOptions& opts) {
  require(k >= 1, "demailly_approx: level must be >= 1");
  return kernel_at(domain, weight.scaled(k), z, {}, opts).log_kernel / k;
}

double demailly_approx(const weights::PlanarWeight& weight, int k, complexd z,
                       const TruncationOptions& opts) {
  require(k >= 1, "demailly_approx: level must be >= 1");
  return kernel_at(weight.scaled(k), z, complexd(0.0, 0.0), opts).log_kernel / k;
}

}  // namespace berglab::bergman
