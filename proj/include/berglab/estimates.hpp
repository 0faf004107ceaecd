#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "berglab/bergman.hpp"
#include "berglab/report.hpp"
#include "berglab/weights.hpp"

namespace berglab::estimates {

using weights::complexd;

// ---------------------------------------------------------------------------
// Closed-form constants

// Lower incomplete gamma γ(s, x) = ∫₀ˣ t^{s−1}e^{−t}dt for integer s ≥ 1.
// Series expansion for x < s + 1; complement of the finite Poisson tail,
// Γ(s)(1 − e^{−x}Σ_{i<s}xⁱ/i!), otherwise — each branch is used only where
// it is cancellation-free.
double lower_incomplete_gamma(int s, double x);

// Sharp extension constant for the weight a|ζ|² on the unit disk and the
// m-th derivative functional: C = (π/a^{m+1}) γ(m+1, a); the a → 0 limit is
// the unweighted disk moment π/(m+1).
double ot_constant(double a, int m);

// Computes the m-th derivative extremal value at the origin through the
// orthonormal-basis pipeline and reports |value · C − 1| against 1e−8.
report::BoundReport ot_tightness(double a, int m);

// ---------------------------------------------------------------------------
// Polydisk lower bounds

struct PolydiskLowerBounds {
  double kernel = 0.0;  // lower bound for K at the center
  double tilde = 0.0;   // lower bound for K̃ at the center, |v| = 1
};

// Strong form: K ≥ aⁿ e^{u0} / (πⁿ(1−e^{−a})ⁿ) and the same with one extra
// power of a for K̃.  Requires a > 0.
PolydiskLowerBounds polydisk_lower_bounds(int n, double a, double u0 = 0.0);
// Weakened form with plain πⁿ in the denominator (valid for all a ≥ 0).
PolydiskLowerBounds polydisk_lower_bounds_weak(int n, double a, double u0 = 0.0);

// ---------------------------------------------------------------------------
// Mean-value (Jensen) upper bounds

// Surface measure of the sphere of radius ρ in ℂⁿ: 2πⁿρ^{2n−1}/Γ(n).
double sphere_surface(int n, double rho);

// K(z) ≤ (∫₀ʳ |∂B_ρ| exp(−mean_{∂B(z,ρ)} u) dρ)^{−1}, valid whenever the
// closed ball B(z, r) sits inside the domain of the weight.  Sphere means are
// exact for centered radial weights (Beta(1, n−1) marginal of |v₁|² on the
// unit sphere); off-center means use a trapezoid rule on the circle and are
// only available in one variable.
double bb_upper_bound(const weights::RadialWeight& weight, double r,
                      std::span<const complexd> z = {}, double tol = 1e-11,
                      int circle_points = 512);
double bb_upper_bound(const weights::PlanarWeight& weight, double r, complexd z,
                      double tol = 1e-11, int circle_points = 512);

// Relaxed form using only sup Δu ≤ 4nA:
//   K(z) ≤ e^{u(z)} Aⁿ (n ω_{2n} ∫₀^{Ar²} s^{n−1}e^{−s} ds)^{−1},
// ω_{2n} = πⁿ/n!.  The A → 0 limit is the unweighted volume bound
// e^{u(z)} n!/(πⁿ r^{2n}).
double bb_upper_bound_laplacian(double u_at_z, double laplacian_sup, int n,
                                double r);

// ---------------------------------------------------------------------------
// Sphere-mean lemma

double harmonic_number(int m);  // H_m = Σ_{i=1..m} 1/i, H_0 = 0

// C_n = exp(mean over the unit sphere of log|v₁|²) = exp(−H_{n−1}).
double sphere_log_constant(int n);

struct MonteCarloMean {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

// Monte Carlo oracle for the sphere average of log|v₁|² in ℂⁿ (seeded,
// platform-independent stream).
MonteCarloMean sphere_log_mean_mc(int n, long samples, std::uint64_t seed);

// Polynomial in n complex variables as a sparse list of monomial terms.
struct Polynomial {
  struct Term {
    std::vector<int> alpha;  // exponent of each variable, size n
    complexd coeff;
  };
  int n = 1;
  std::vector<Term> terms;

  complexd eval(std::span<const complexd> z) const;
  std::vector<complexd> gradient_at_zero() const;
};

// mean_{∂B_ρ} log|f|² − log ρ² ≥ log(C_n ‖∂f(0)‖²) for holomorphic f with
// f(0) = 0.  The left side is sampled by Monte Carlo; the report's bound is
// the right side relaxed by three standard errors so that pass/fail is a
// statistically honest statement.
report::BoundReport check_lemma_sphere_mean(const Polynomial& f, double rho,
                                            long samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Two-sided kernel/metric bounds with empirical constant extraction

// The six inequalities tied together by one constant C:
//   K ≤ C e^{u(z)} Mⁿ                    (kernel_upper)
//   K̃ ≤ C e^{u(z)} M^{n+1}|v|²           (tilde_upper)
//   K ≥ (1/C) e^{u(z)} aⁿ                (kernel_lower, needs a > 0)
//   K̃ ≥ (1/C) e^{u(z)} a^{n+1}|v|²       (tilde_lower, needs a > 0)
//   B² ≤ C M^{n+1}/aⁿ |v|²               (metric_upper, needs a > 0)
//   B² ≥ (1/C) a^{n+1}/Mⁿ |v|²           (metric_lower, needs a > 0)
// with M = max(1, sup Δu) and a the declared complex-Hessian floor.
enum class MtBound {
  kernel_upper = 0,
  tilde_upper,
  kernel_lower,
  tilde_lower,
  metric_upper,
  metric_lower,
};
inline constexpr std::array<const char*, 6> kMtBoundNames = {
    "kernel_upper", "tilde_upper",  "kernel_lower",
    "tilde_lower",  "metric_upper", "metric_lower"};

struct MtCase {
  std::string name;
  int dimension = 1;
  double kernel = 0.0;
  double tilde = 0.0;
  double metric = 0.0;
  double weight_at_z = 0.0;
  double hessian_lower = 0.0;   // a
  double m_factor = 1.0;        // max(1, sup Δu)
  double direction_norm2 = 1.0; // |v|²
  // Smallest C making each inequality hold for this case; NaN where the
  // inequality is gated off (a ≤ 0 disables the last four).
  std::array<double, 6> minimal_constant{};
};

struct MtFamilyResult {
  std::vector<MtCase> cases;
  // Worst (largest) minimal constant over the family, per inequality; this is
  // the single C the reports are evaluated at.  NaN if no case defines it.
  std::array<double, 6> worst_constant{};
  // max/min of the minimal constants over the family (1 for singletons).
  std::array<double, 6> stability_ratio{};
  // Six rows per case (four skipped when the case has a ≤ 0) followed by one
  // stability row per inequality asserting max/min ≤ 2.
  std::vector<report::BoundReport> reports;
};

// Configured default family for constant extraction: Gaussians a|z|² with
// a ∈ {1, 1.15, 1.3}.  The spread is deliberately moderate: the minimal
// constants scale like powers of a through M = 4na, so a wide family (e.g.
// a ∈ {1/2, 1, 2}) would push the per-inequality ratio past 2 even though
// each constant is perfectly finite; this window keeps every ratio below 2
// for n ≤ 3 while still spanning distinct curvature scales.
std::vector<weights::RadialWeight> default_mt_family(int n);

MtFamilyResult check_theorem_mt(const weights::ReinhardtDomain& domain,
                                std::span<const weights::RadialWeight> family,
                                std::span<const complexd> z,
                                std::span<const complexd> v,
                                const bergman::TruncationOptions& opts = {});

MtFamilyResult check_theorem_mt(std::span<const weights::PlanarWeight> family,
                                complexd z, complexd v,
                                const bergman::TruncationOptions& opts = {});

// Single-weight form with explicitly supplied curvature data (bounds.a is the
// Hessian floor, bounds.A the sup of Δu/(4n)); the family machinery is reused
// with a one-element family.
MtFamilyResult check_theorem_mt(const weights::ReinhardtDomain& domain,
                                const weights::RadialWeight& weight,
                                std::span<const complexd> z,
                                std::span<const complexd> v,
                                const weights::CurvatureBounds& bounds,
                                const bergman::TruncationOptions& opts = {});

}  // namespace berglab::estimates
