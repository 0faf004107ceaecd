#pragma once

#include <stdexcept>
#include <string>

namespace berglab {

// Failure modes are surfaced as distinct exception types so callers (and the
// CLI runner) can map them to exit codes without parsing messages.

// An adaptive loop (quadrature refinement, degree doubling, window growth)
// exhausted its budget before meeting its tolerance.
struct NonConvergent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A Gram factorization lost too much precision (condition estimate > 1e14);
// usually means the polynomial degree is too large for double precision.
struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two independent evaluation routes of the same quantity disagreed beyond
// tolerance.
struct CrossCheckMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A toric potential's slopes left [0,1] or decreased (loss of convexity /
// full-mass normalization).
struct SlopeViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A polynomial test case has vanishing gradient at the base point, so the
// sphere-mean inequality degenerates.
struct DegenerateGradient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A level-set comparison could not classify part of the line (the difference
// of potentials vanishes identically there and refinement cannot resolve it).
struct DegenerateLevelSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two quantum spectra built at different levels k were combined.
struct LevelMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A measure's CDF does not reach the required total mass.
struct MassMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A measure carries an atom (CDF jump that survives refinement); such
// measures are outside the admissible (non-pluripolar) class.
struct AtomDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A measure or weight does not settle inside the working t-window.
struct WindowTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An experiment configuration failed schema or value validation.
struct ConfigInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generic precondition gate for programmer-facing contracts.
struct PreconditionViolation : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionViolation(what);
}

}  // namespace berglab
