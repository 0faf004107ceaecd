#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "berglab/radon_measure.hpp"
#include "berglab/report.hpp"
#include "berglab/rng.hpp"
#include "berglab/toric.hpp"
#include "berglab/weights.hpp"

namespace berglab::measure {

// Measure quantization on the t-line: given an atomless measure ν of total
// mass 2π, recover the unique full potential φ_ν with Monge–Ampère measure ν
// (an ODE in this invariant model: φ′ = F/(2π)), then push it through the
// Bergman machinery.  The weak limit of the quantized measures M^k recovers ν.

// ---------------------------------------------------------------------------
// Measure constructors
// ---------------------------------------------------------------------------

// Round background measure: CDF(t) = 2π e^t/(1+e^t), density 2π φ_FS″.
RadonMeasure1D fs_measure();

// Round profile translated by c: CDF(t) = 2π σ(t−c).  The associated
// potential has the closed form log((1+e^{t−c})/(1+e^t)) + const, which tests
// use as an oracle.
RadonMeasure1D translated_fs_measure(double c);

// Singular concentration: all mass on [−δ, δ], symmetric CDF
// F(t) = π(1 + sgn(t)(|t|/δ)^α) that is only α-Hölder at t = 0.  The density
// ∝ |t|^{α−1} is integrable but unbounded, so the solved potential has
// unbounded curvature while staying bounded.  Requires 0 < α ≤ 1, δ > 0.
RadonMeasure1D holder_measure(double alpha, double delta);

// Normalized logistic mixture: CDF = 2π Σ wᵢ σ(sᵢ (t−cᵢ)).  Weights are
// normalized to sum to 1; scales must be positive.
RadonMeasure1D sigmoid_mixture_measure(std::vector<double> mixture_weights,
                                       std::vector<double> scales,
                                       std::vector<double> centers);

// Deterministic random logistic mixture (2–4 components, scales in [0.8, 3],
// centers in [−3, 3]) for seeded round-trip and convergence sweeps.  Scales
// are kept ≥ 0.8 so the CDF reaches its limits inside the default t-window.
RadonMeasure1D random_measure(Rng& rng);

// Piecewise-linear CDF through the given (t, F) rows: linear interpolation
// between rows, constant outside.  Rows must have strictly increasing t and
// non-decreasing F; throws ConfigInvalid otherwise.
RadonMeasure1D measure_from_rows(const std::vector<std::pair<double, double>>& rows,
                                 std::string name);

// Same, parsed from a two-column text file ('#' comments and blank lines
// allowed).  Throws ConfigInvalid on malformed rows or non-monotone data.
RadonMeasure1D measure_from_file(const std::string& path);

// ---------------------------------------------------------------------------
// Stieltjes integration against a measure
// ---------------------------------------------------------------------------

// ∫ f dν for bounded continuous f, evaluated through the layer-cake
// substitution u = F(t): ∫₀^{2π} f(F⁻¹(u)) du with a monotone-bisection
// inverse.  Exact for measures known only through their CDF (no density
// needed) and robust for singular concentrations.
double integrate(const RadonMeasure1D& nu, const std::function<double(double)>& f,
                 double tol = 1e-9);

// ---------------------------------------------------------------------------
// Calabi–Yau step
// ---------------------------------------------------------------------------

struct SolveOptions {
  weights::GridSpec grid{-40.0, 40.0, 16001};
  double mass_tol = 1e-10;  // |F(±far_t) − limit| beyond this: MassMismatch
  double far_t = 1e7;       // proxy for ±∞ when probing the total mass
  // Atom probe: any grid cell carrying at least atom_mass_floor of mass is
  // bisected atom_bisections times toward its steepest half; if the final
  // sub-interval still holds more than atom_ratio of the cell's mass, the
  // measure has (numerically) an atom and is rejected.  A Hölder-α CDF sheds
  // mass like width^α under this probe, so genuinely continuous
  // concentrations pass for α ≳ 0.1 while true jumps keep ratio ≈ 1.
  double atom_mass_floor = 1e-3;
  int atom_bisections = 14;
  double atom_ratio = 0.5;
};

// Solves ω_φ = ν for the unique full potential with ∫ ϕ ω_FS = 0:
// slopes φ′(tᵢ) = F(tᵢ)/(2π), values by cumulative trapezoidal integration,
// additive constant fixed by the normalization.  The round trip
// ma_measure(result).cdf reproduces F exactly at the grid knots.
//
// Throws MassMismatch if the total mass is not 2π (checked at ±far_t),
// WindowTooSmall if F has not reached its limits within mass_tol at the grid
// endpoints, AtomDetected if the probe finds a jump, PreconditionViolation if
// the CDF decreases on the grid.
weights::ToricPotential solve_calabi_yau(const RadonMeasure1D& nu,
                                         const SolveOptions& opts = {});

// solve_calabi_yau → hilbert_norms → bergman_density at level k.
toric::BergmanDensity quantize_measure(const RadonMeasure1D& nu, int k,
                                       const SolveOptions& solve_opts = {},
                                       const toric::SpectrumOptions& spectrum_opts = {});

// ---------------------------------------------------------------------------
// Weak convergence of the quantized measures
// ---------------------------------------------------------------------------

struct TestFunction {
  std::function<double(double)> f;
  std::string name;
};

// Fixed family {1, tanh(t), tanh(t−2), 1/(1+t²), sigmoid(3t)}: bounded
// continuous functions with limits at ±∞ (so they extend through the poles)
// that separate measures on the t-line.
std::vector<TestFunction> default_test_functions();

struct WeakConvergenceOptions {
  SolveOptions solve{};
  toric::SpectrumOptions spectrum{};
  double threshold = 0.05;        // required bound on the last error of each row
  double quad_tol = 1e-10;        // tolerance for ∫ f dM^k
  double ground_truth_tol = 1e-9; // tolerance for ∫ f dν
  // Errors below this sit at quadrature noise (symmetric measures against odd
  // test functions); the last-is-minimum check treats them as ties.
  double noise_floor = 1e-10;
};

struct WeakConvergenceRow {
  std::string name;            // test function name
  double exact = 0.0;          // ∫ f dν
  std::vector<double> errors;  // e(f, k) = |∫ f dM^k_ν − ∫ f dν| along k_list
};

struct WeakConvergenceResult {
  std::vector<int> k_list;
  std::vector<WeakConvergenceRow> rows;
  // Two bound checks per test function: the last error is the row minimum
  // ("weak_min:f=…") and sits below the configured threshold
  // ("weak_threshold:f=…").
  std::vector<report::BoundReport> reports;
};

// Error matrix e(f, k) for the quantized measures of ν against the exact
// integrals.  k_list must be strictly increasing with at least two levels.
WeakConvergenceResult weak_convergence_report(
    const RadonMeasure1D& nu, const std::vector<TestFunction>& test_functions,
    const std::vector<int>& k_list, const WeakConvergenceOptions& opts = {});

}  // namespace berglab::measure
