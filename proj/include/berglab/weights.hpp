#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace berglab::weights {

using complexd = std::complex<double>;

// ---------------------------------------------------------------------------
// Domains

enum class DomainKind { polydisk, ball };

// Bounded complete Reinhardt domain containing the origin: a polydisk with
// per-coordinate radii, or a Euclidean ball.
struct ReinhardtDomain {
  DomainKind kind = DomainKind::polydisk;
  int dimension = 1;
  std::vector<double> radii;  // size n for polydisks, size 1 for balls

  static ReinhardtDomain polydisk(std::vector<double> radii);
  static ReinhardtDomain unit_polydisk(int n);
  static ReinhardtDomain ball(int n, double radius);
  static ReinhardtDomain unit_disk() { return unit_polydisk(1); }

  double radius(int i) const;  // polydisk coordinate radius / ball radius
  bool contains(std::span<const complexd> z) const;
};

// ---------------------------------------------------------------------------
// Product-radial weights u(z) = sum_i g_i(|z_i|^2)

struct RadialProfile {
  std::function<double(double)> g;    // profile on [0, R_i^2]
  std::function<double(double)> dg;   // g'
  std::function<double(double)> d2g;  // g''
  // set when g(s) = a*s + c; balls in n >= 2 need this (global radiality)
  std::optional<double> linear_coefficient{};
  double constant = 0.0;
};

RadialProfile linear_profile(double a, double c = 0.0);
// g(s) = sum_j coeffs[j] s^j
RadialProfile polynomial_profile(std::vector<double> coeffs);
RadialProfile zero_profile();

struct RadialWeight {
  std::vector<RadialProfile> profiles;  // one per coordinate
  // declared plurisubharmonicity data: i∂∂̄u >= hessian_lower * Id, and
  // sup Δu <= laplacian_sup with the normalization Δ|z|^2 = 4n.
  double hessian_lower = 0.0;
  double laplacian_sup = 0.0;
  std::string name = "radial";

  int dimension() const { return static_cast<int>(profiles.size()); }
  double value(std::span<const complexd> z) const;
  double value_origin() const;
  RadialWeight scaled(double k) const;  // k*u, declared bounds scale with k

  static RadialWeight zero(int n);
  static RadialWeight gaussian(int n, double a);  // u = a|z|^2, exact bounds
  // declares bounds by dense sampling of g' + s g'' on each coordinate range
  static RadialWeight from_profiles(std::vector<RadialProfile> profiles,
                                    const ReinhardtDomain& domain,
                                    std::string name = "radial",
                                    int samples = 4001);
};

// Re-derives the declared curvature data by sampling and throws
// PreconditionViolation if the declaration is wrong by more than slack.
void verify_radial_declarations(const RadialWeight& w, const ReinhardtDomain& domain,
                                int samples = 4001, double slack = 1e-7);

// ---------------------------------------------------------------------------
// General planar weights on a disk (n = 1, possibly non-radial)

struct PlanarWeight {
  std::function<double(complexd)> u;
  double radius = 1.0;  // weight lives on the disk of this radius
  bool smooth = true;
  std::optional<double> hessian_lower{};  // inf ∂∂̄u when known
  std::optional<double> laplacian_sup{};  // sup Δu when known
  std::string name = "planar";

  PlanarWeight scaled(double k) const;
  double laplacian_fd(complexd z, double h = 1e-4) const;
  // max of the discrete Laplacian over an interior grid (fallback when no
  // declared bound is available)
  double laplacian_sup_estimate(int grid = 41, double h = 1e-4) const;
};

// Spot-check of subharmonicity: discrete Laplacian >= -tol on an interior grid.
void check_subharmonic(const PlanarWeight& w, int grid = 41, double h = 1e-4,
                       double tol = 1e-6);

// ---------------------------------------------------------------------------
// Fubini-Study model on the t-line, t = log|z|^2

double fs_potential(double t);      // log(1 + e^t)
double fs_slope(double t);          // sigmoid
double fs_curvature(double t);      // e^t / (1+e^t)^2
double log_fs_curvature(double t);  // t - 2 log(1+e^t)

struct GridSpec {
  double t_min = -40.0;
  double t_max = 40.0;
  int knots = 4001;

  double step() const { return (t_max - t_min) / (knots - 1); }
  double knot(int i) const { return t_min + i * step(); }
};

// Uniform-grid convex spline: knot values v_i plus right slopes d_i. On a
// cell the potential is the quadratic matching v_i, v_{i+1}, d_i; slopes may
// jump upward at knots (envelope outputs are piecewise affine). The
// slope-only constructor places values by trapezoid accumulation, which makes
// the spline C^1.
struct SplineData {
  double t0 = 0.0;
  double h = 1.0;
  std::vector<double> values;
  std::vector<double> slopes;

  int cells() const { return static_cast<int>(values.size()) - 1; }
};

// S^1-invariant Kähler potential on CP^1 reduced to the t-line: a convex
// function with slopes in [0,1] (full mass 2π) such that φ(t) - max(0,t) is
// bounded. value() is the total potential; relative() subtracts φ_FS.
class ToricPotential {
 public:
  double value(double t) const { return value_(t); }
  double slope(double t) const { return slope_(t); }          // right derivative
  double curvature(double t) const { return curvature_(t); }  // where defined
  double relative(double t) const { return value_(t) - fs_potential(t); }
  const SplineData* spline() const { return spline_ ? &*spline_ : nullptr; }
  const std::string& name() const { return name_; }

  static ToricPotential fubini_study();
  static ToricPotential constant_shift(double c);  // relative potential ≡ c
  static ToricPotential closed_form(std::string name,
                                    std::function<double(double)> value,
                                    std::function<double(double)> slope,
                                    std::function<double(double)> curvature);
  // (1-s)·φ_FS(t) + s·φ_FS(t-c)
  static ToricPotential test_potential(double s, double c);
  // φ'(t) = Σ w_i σ(scale_i (t - center_i)), Σ w_i = 1, scale_i in (0,1]
  static ToricPotential sigmoid_mixture(std::vector<double> w,
                                        std::vector<double> scale,
                                        std::vector<double> center);
  static ToricPotential from_spline_slopes(const GridSpec& grid,
                                           std::vector<double> slopes,
                                           double anchor_value);
  static ToricPotential from_spline_values_slopes(const GridSpec& grid,
                                                  std::vector<double> values,
                                                  std::vector<double> slopes);
  // two whitespace-separated columns: t, φ(t) on a uniform ascending grid
  static ToricPotential from_values_file(const std::string& path);

  ToricPotential shifted(double c) const;  // relative potential + c
  // (1-w)·this + w·other
  ToricPotential blended(const ToricPotential& other, double w) const;
  // φ_FS + s·(φ - φ_FS)
  ToricPotential relative_scaled(double s) const;
  static ToricPotential pointwise_max(const ToricPotential& a,
                                      const ToricPotential& b);

 private:
  ToricPotential() = default;
  std::function<double(double)> value_, slope_, curvature_;
  std::optional<SplineData> spline_{};
  std::string name_;
};

// curvature bracket relative to the Fubini-Study form:
// a * ω_FS <= ω_φ <= A * ω_FS, i.e. a <= φ''/φ_FS'' <= A.
struct CurvatureBounds {
  double a = 0.0;
  double A = 0.0;
};

// exact bracket for test_potential(s, c)
CurvatureBounds test_potential_bounds(double s, double c);
// min/max of φ''/φ_FS'' by dense sampling over the grid
CurvatureBounds sampled_curvature_bounds(const ToricPotential& phi,
                                         const GridSpec& grid = {});
void verify_curvature_bounds(const ToricPotential& phi, const CurvatureBounds& b,
                             const GridSpec& grid = {}, double slack = 1e-9);
// slopes must be non-decreasing with limits 0 and 1 at the grid ends
void verify_full_mass(const ToricPotential& phi, const GridSpec& grid = {},
                      double tol = 1e-6);

}  // namespace berglab::weights
