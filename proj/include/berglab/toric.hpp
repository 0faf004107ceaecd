#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "berglab/radon_measure.hpp"
#include "berglab/report.hpp"
#include "berglab/weights.hpp"

namespace berglab::toric {

// Rotation-invariant quantization on the projective line in log coordinates
// t = log|z|².  A level-k Hilbert space is spanned by the monomials z^j,
// j = 0..k, with squared norms
//
//   norms[j] = 2π ∫ exp(j t - k φ(t)) φ_FS''(t) dt,
//
// where φ is a full potential (φ_FS plus a bounded, slope-preserving
// perturbation).  Everything downstream — kernel, Bergman density, metric
// ratio — is a smooth functional of these norms.

struct SpectrumOptions {
  double initial_window = 20.0;   // first symmetric window half-width
  double window_growth = 1.25;    // multiplicative growth per rejection
  double max_window = 400.0;      // hard cap before giving up
  double tail_drop = std::log(1e30);  // required peak-to-endpoint drop, in log scale
  double quad_tol = 1e-12;        // per-norm adaptive quadrature tolerance
};

struct QuantumSpectrum {
  int k = 0;
  std::vector<double> log_norms;  // log of the squared monomial norms, size k+1
  double window = 0.0;            // accepted half-width: integrands certified on [-window, window]

  int size() const { return static_cast<int>(log_norms.size()); }
};

// Computes the monomial norms for the given potential and level.  The window
// starts at opts.initial_window and is grown geometrically until every
// log-integrand at both endpoints sits at least opts.tail_drop below its
// peak; each log-integrand is concave in t, so this certifies the truncation
// error.  Throws NonConvergent if the cap is reached (slowly decaying
// perturbations), PreconditionViolation for k < 1.
QuantumSpectrum hilbert_norms(const weights::ToricPotential& phi, int k,
                              const SpectrumOptions& opts = {});

// Pointwise state of the level-k Bergman package at a fixed t.
struct BergmanPoint {
  double t = 0.0;
  double log_kernel = 0.0;   // log K^k_φ(t)
  double kernel = 0.0;       // K^k_φ(t) = e^{-kφ(t)} Σ_j e^{jt} / norms[j]
  double potential = 0.0;    // P^k(t) = (1/k) log Σ_j e^{jt}/norms[j] - φ_FS(t)  (relative)
  double m_density = 0.0;    // density of M^k_φ against ω_FS: (2π/k) e^{-kφ(t)} Σ_j e^{jt}/norms[j]
  double metric_ratio = 0.0; // ω_{P^k} / ω_FS = Var_{p_t}(j) / (k φ_FS''(t))
  double mean_j = 0.0;       // E_{p_t}(j), p_t(j) ∝ e^{jt}/norms[j]
  double var_j = 0.0;        // Var_{p_t}(j)
};

// Evaluates kernel/density/metric quantities for one (potential, spectrum)
// pair.  All evaluations shift by the running max of j t - log norms[j]
// before exponentiating, so they are stable for any k and |t| ≤ window.
class BergmanDensity {
 public:
  BergmanDensity(weights::ToricPotential phi, QuantumSpectrum spectrum);

  const weights::ToricPotential& potential() const { return phi_; }
  const QuantumSpectrum& spectrum() const { return spectrum_; }
  int level() const { return spectrum_.k; }

  BergmanPoint at(double t) const;
  double psi(double t) const;  // Ψ(t) = (1/k) log Σ_j e^{jt}/norms[j]  (full scale)

  // ∫ m_density dω_FS over [-window, window]; equals 2π(k+1)/k whenever the
  // window is accepted, because term-by-term the integrals reproduce the
  // norms themselves.
  double total_mass(double tol = 1e-10) const;

  // ∫ metric_ratio ω_FS = 2π/k ∫ Var_{p_t}(j) φ_FS''... collapses to 2π by
  // telescoping the slope of Ψ from 0 to 1 (cohomology of the curvature form).
  double metric_ratio_mass(double tol = 1e-10) const;

 private:
  // log Σ_j exp(j t - log_norms[j]) with optional first/second moments of the
  // induced distribution p_t(j); single stabilized pass.
  double log_trace(double t, double* mean_out, double* var_out) const;

  weights::ToricPotential phi_;
  QuantumSpectrum spectrum_;
};

// Convenience: norms + density in one call.
BergmanDensity bergman_density(const weights::ToricPotential& phi, int k,
                               const SpectrumOptions& opts = {});

// Monge–Ampère measure of a full potential as a measure on the t-line:
// dμ = 2π φ''(t) dt, with CDF 2π φ'(t).
measure::RadonMeasure1D ma_measure(const weights::ToricPotential& phi);

// --- Curvature bracket for the quantized potentials -------------------------

struct C11Level {
  int k = 0;
  double min_ratio = 0.0;          // min over the grid of ω_{P^k}/ω_FS
  double max_ratio = 0.0;          // max over the grid
  double sup_potential_error = 0.0;  // sup over the grid of |P^k - (φ - φ_FS)|
  double extracted_constant = 0.0;   // minimal C closing both bracket sides at this k
};

struct C11Report {
  weights::CurvatureBounds bounds;
  std::vector<C11Level> levels;
  double constant = 0.0;         // worst per-level constant across k_list
  double stability_ratio = 0.0;  // max/min of the per-level constants
  std::vector<report::BoundReport> reports;
};

// Verifies, for every k in k_list, the two-sided bracket
//
//   a² / (C (1+A)) · ω_FS  ≤  ω_{P^k}  ≤  C (1+A²) / a · ω_FS
//
// where a ≤ φ''/φ_FS'' ≤ A are the declared curvature bounds (checked on the
// grid first; PreconditionViolation if violated).  C is extracted empirically
// as the smallest constant closing both sides at each level; the report pins
// the family-worst C into every per-level bound, asserts stability
// (max/min ≤ 2), and asserts sup|P^k - relative φ| non-increasing along
// k_list.
C11Report check_theorem_c11(const weights::ToricPotential& phi,
                            const weights::CurvatureBounds& bounds,
                            const std::vector<int>& k_list,
                            const weights::GridSpec& grid = {},
                            const SpectrumOptions& opts = {});

// --- Monotonicity of equilibrium masses -------------------------------------

// Intervals where f ≥ 0 on [lo, hi], detected on a uniform sample grid and
// refined by bisection to ~1e-10 endpoint accuracy.  Closed-set convention:
// sample points with f = 0 exactly count as inside.
std::vector<std::pair<double, double>> nonnegative_intervals(
    const std::function<double(double)>& f, double lo, double hi,
    int samples = 8001);

struct BerndtssonResult {
  int k = 0;
  double lhs = 0.0;  // ∫_{ψ ≤ φ} dM^k_φ
  double rhs = 0.0;  // ∫_{ψ ≤ φ} dM^k_ψ
  std::vector<std::pair<double, double>> region;  // the intervals {ψ ≤ φ}
  report::BoundReport report;  // upper bound check: lhs ≤ rhs
};

// Mass comparison on the closed region {ψ ≤ φ} (computed as {φ - ψ ≥ 0} in
// relative coordinates).  The densities must share the same level.
BerndtssonResult berndtsson_check(const BergmanDensity& phi_density,
                                  const BergmanDensity& psi_density,
                                  int samples = 8001);
BerndtssonResult berndtsson_check(const weights::ToricPotential& phi,
                                  const weights::ToricPotential& psi, int k,
                                  const SpectrumOptions& opts = {},
                                  int samples = 8001);

// Pointwise comparison on the complementary region {ψ ≥ φ}: there the
// density of M^k_ψ never exceeds the density of M^k_{max(φ,ψ)}.  Checked in
// ratio form (max over grid knots of density_ψ / density_max vs bound 1).
report::BoundReport berndtsson_pointwise_check(
    const weights::ToricPotential& phi, const weights::ToricPotential& psi,
    int k, const weights::GridSpec& grid = {}, const SpectrumOptions& opts = {});

// --- Level doubling and the lower density bound ------------------------------

struct DoublingResult {
  int k = 0;
  double min_ratio = 0.0;  // min over grid of 2 · density(φ/2, 2k) / density(φ, k)
  double epsilon = 0.0;    // 1 - min_ratio: the doubling defect (can be negative)
  report::BoundReport report;  // positivity of min_ratio
};

// Compares M^k_φ with the half-potential at doubled level:
// (1-ε_k)/2 · dM^k_φ ≤ dM^{2k}_{φ/2} pointwise on the grid, where
// φ/2 = φ_FS + (φ - φ_FS)/2.  ε_k is the extracted defect; callers assert
// its decay along a k-list.
DoublingResult doubling_check(const weights::ToricPotential& phi, int k,
                              const weights::GridSpec& grid = {},
                              const SpectrumOptions& opts = {});

struct LowerBoundResult {
  int k = 0;
  double a = 0.0;
  double min_ratio = 0.0;  // min over grid of density / a
  double epsilon = 0.0;    // 1 - min_ratio
  report::BoundReport report;  // min_ratio > 0
};

// Checks dM^k_φ ≥ (1-ε_k) a ω_FS on the grid for a declared curvature floor
// a ≤ φ''/φ_FS''.  The floor is certified against sampled curvature first;
// an uncertified floor throws PreconditionViolation.
LowerBoundResult lower_bound_check(const weights::ToricPotential& phi,
                                   double a, int k,
                                   const weights::GridSpec& grid = {},
                                   const SpectrumOptions& opts = {});

// Mass of M^k_φ on the sublevel set {φ - φ_FS ≤ c}, reported (not asserted):
// the tail that equilibrium-measure arguments control.
double tail_mass(const BergmanDensity& density, double c, int samples = 8001);
double tail_mass(const weights::ToricPotential& phi, double c, int k,
                 const SpectrumOptions& opts = {}, int samples = 8001);

}  // namespace berglab::toric
