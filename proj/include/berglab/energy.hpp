#pragma once

#include <functional>
#include <string>
#include <vector>

#include "berglab/report.hpp"
#include "berglab/toric.hpp"
#include "berglab/weights.hpp"

namespace berglab::energy {

// Monge-Ampère energy of a bounded relative potential ϕ = φ - φ_FS:
//   I(φ) = ½∫ϕ (ω_FS + ω_φ) = π∫ϕ(t) φ_FS''(t) dt + π∫ϕ(t) dφ'(t).
// part_reference is the ω_FS half, part_monge_ampere the dφ' half.
struct EnergyValue {
  double value = 0.0;
  double part_reference = 0.0;
  double part_monge_ampere = 0.0;
};

// ∫ f dω_FS = 2π ∫ f(t) φ_FS''(t) dt over the whole line.
double integrate_against_fs(const std::function<double(double)>& f,
                            double tol = 1e-10);

// ∫ f dMA(φ) with MA(φ) = 2π dφ'. Spline potentials integrate cell curvature
// exactly and add the knot atoms (slope jumps); smooth potentials use.
// adaptive quadrature of f·φ'' over the folded line.
double integrate_against_ma(const weights::ToricPotential& phi,
                            const std::function<double(double)>& f,
                            double tol = 1e-10);

EnergyValue ma_energy(const weights::ToricPotential& phi, double tol = 1e-10);

// Quantum energy relative to a reference spectrum at the same level:
//   I_k = -(2π/k²) Σ_j (log norms[j] - log norms_ref[j]).
double quantum_energy(const toric::QuantumSpectrum& spectrum,
                      const toric::QuantumSpectrum& reference);

// Largest convex minorant of φ_FS + χ with slopes in [0,1], evaluated on the
// grid knots (exact support-line construction, no slope discretization) and
// returned as a spline potential interpolating those knot values.
weights::ToricPotential envelope(const std::function<double(double)>& chi,
                                 const weights::GridSpec& grid = {});

// A perturbation direction with enough derivatives to build perturbed
// potentials φ + s·f.
struct SmoothFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second;
  std::string name = "f";
};

SmoothFunction constant_function(double c);
SmoothFunction zero_function();

weights::ToricPotential perturbed(const weights::ToricPotential& phi,
                                  const SmoothFunction& f, double s);

struct EnergyCheckOptions {
  // grid used for envelope construction and classical energies inside the
  // checks; finer than the default potential grid so interpolation bias stays
  // well under the derivative-identity tolerance
  weights::GridSpec grid{-40.0, 40.0, 32001};
  toric::SpectrumOptions spectrum{};
  double quad_tol = 1e-10;
  // central finite-difference steps and Richardson combination for the
  // derivative identities
  double step_coarse = 1e-3;
  double step_fine = 1e-4;
  double derivative_rel_tol = 1e-6;
};

// Both derivative identities at s = 0:
//   d/ds I_k(H^k_{φ+sf}) = ∫ f dM^k_φ   and   d/ds I(P(φ+sf)) = ∫ f dMA(φ).
// Left sides by Richardson-extrapolated central differences, right sides by
// quadrature against the Bergman and Monge-Ampère measures.
struct DerivativeIdentityResult {
  int k = 0;
  double quantum_derivative = 0.0;
  double quantum_pairing = 0.0;
  double classical_derivative = 0.0;
  double classical_pairing = 0.0;
  std::vector<report::BoundReport> reports;
};

DerivativeIdentityResult derivative_identity_check(
    const weights::ToricPotential& phi, const SmoothFunction& f, int k,
    const EnergyCheckOptions& opts = {});

// |I_k(H^k_{φ+f}) - I(P(φ+f))| over k_list; the last three entries must be
// non-increasing.
struct ConvergenceRow {
  int k = 0;
  double quantum = 0.0;
  double error = 0.0;
};

struct PerturbedConvergenceResult {
  double limit = 0.0;        // I(P(φ+f))
  double envelope_gap = 0.0; // max over knots of (φ+f) - P(φ+f)
  std::vector<ConvergenceRow> rows;
  std::vector<report::BoundReport> reports;
};

PerturbedConvergenceResult perturbed_convergence_check(
    const weights::ToricPotential& phi, const SmoothFunction& f,
    const std::vector<int>& k_list, const EnergyCheckOptions& opts = {});

// Concavity of s ↦ I_k(H^k_{φ+sf}): centered second differences at the given
// sample points must stay ≤ tolerance (1e-9).
struct ConcavityResult {
  int k = 0;
  std::vector<double> samples;
  std::vector<double> second_differences;
  std::vector<report::BoundReport> reports;
};

ConcavityResult concavity_check(const weights::ToricPotential& phi,
                                const SmoothFunction& f, int k,
                                const std::vector<double>& samples =
                                    {-1.0, -0.5, 0.0, 0.5, 1.0},
                                double step = 0.05,
                                const EnergyCheckOptions& opts = {});

// Monotonicity sandwich I_k(H^k_{P(φ+f)}) ≤ I_k(H^k_{φ+f}). The spline
// representation of the envelope can exceed the true minorant between knots
// by at most `overshoot`, so the certified row allows the exact monotone
// correction 2π·overshoot·(k+1)/k; the clean row (no correction) is also
// emitted and is the meaningful one whenever the envelope is strictly active.
struct SandwichResult {
  int k = 0;
  double energy_envelope = 0.0;
  double energy_perturbed = 0.0;
  double overshoot = 0.0;
  report::BoundReport certified;
  report::BoundReport clean;
};

SandwichResult sandwich_check(const weights::ToricPotential& phi,
                              const SmoothFunction& f, int k,
                              const EnergyCheckOptions& opts = {});

}  // namespace berglab::energy
