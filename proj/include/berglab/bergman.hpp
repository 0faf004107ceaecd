#pragma once

#include <complex>
#include <span>
#include <vector>

#include "berglab/weights.hpp"

namespace berglab::bergman {

using weights::complexd;

// Multi-indices with |alpha| <= degree, ordered by total degree and then
// lexicographically within each grade. For n = 1 this is 0, 1, ..., degree.
std::vector<std::vector<int>> graded_indices(int n, int degree);

// Gram matrix of the monomials under the weighted inner product,
// G_{ab} = int_Omega z^a conj(z)^b e^{-u} dlambda. Product-radial weights
// make it exactly diagonal (rotation invariance), stored as logarithms so
// entries spanning hundreds of orders of magnitude stay exact; the planar
// path (n = 1, possibly non-radial) stores a dense Hermitian matrix.
struct GramMatrix {
  int dimension = 1;
  int degree = 0;
  std::vector<std::vector<int>> indices;
  bool diagonal = true;
  std::vector<double> log_diag;  // diagonal storage: log G_{aa}
  std::vector<complexd> dense;   // row-major N x N (dense storage)

  int size() const { return static_cast<int>(indices.size()); }
  complexd entry(int a, int b) const;
};

GramMatrix gram_matrix(const weights::ReinhardtDomain& domain,
                       const weights::RadialWeight& weight, int degree,
                       double quad_tol = 1e-11);
// Disk of weight.radius. Fixed tensor rule: composite Gauss-Kronrod panels in
// radius crossed with a uniform trapezoid in angle (spectrally accurate for
// smooth weights); every Gram entry is assembled from the same node set.
GramMatrix gram_matrix_planar(const weights::PlanarWeight& weight, int degree,
                              int radial_panels = 64, int angular_points = 512);

// Coefficients of the orthonormal polynomials e_j in the monomial basis (row
// j holds e_j). Dense path: Cholesky G = L L^H accumulated in long double,
// C = L^{-1}; throws IllConditioned when the factorization loses positivity
// or its condition estimate (max diag L / min diag L)^2 exceeds 1e14.
struct OrthonormalBasis {
  int dimension = 1;
  int degree = 0;
  std::vector<std::vector<int>> indices;
  bool diagonal = true;
  std::vector<double> log_diag;  // diagonal path keeps the Gram logs
  std::vector<complexd> coeff;   // dense path: row-major lower-triangular C
  std::vector<std::complex<long double>> chol;  // dense path: L, kept for solves
  double condition = 1.0;

  int size() const { return static_cast<int>(indices.size()); }
};

OrthonormalBasis orthonormalize(const GramMatrix& gram);

// K_D(z) = sum_j |e_j(z)|^2, the degree-D truncation of the weighted Bergman
// kernel; non-decreasing in D. Evaluated in log scale on the diagonal path.
double log_kernel_diag(const OrthonormalBasis& basis,
                       std::span<const complexd> z);
double kernel_diag(const OrthonormalBasis& basis, std::span<const complexd> z);

// Extremal value sup{ |f'(z)v|^2 : f(z) = 0, ||f|| <= 1 } over the truncated
// space. Computed two independent ways -- the rank-one correction in the
// orthonormal basis and a triangular solve against the original Gram factor
// -- and cross-checked; CrossCheckMismatch above 1e-7 relative difference
// signals a conditioning failure. v is normalized internally.
double tilde_kernel(const OrthonormalBasis& basis, std::span<const complexd> z,
                    std::span<const complexd> v);

// Bergman metric B^2(z; v) = tilde / kernel, and its finite-difference
// cross-check (five-point complex Laplacian of log K along z + zeta v).
double bergman_metric(const OrthonormalBasis& basis,
                      std::span<const complexd> z,
                      std::span<const complexd> v);
double bergman_metric_fd(const OrthonormalBasis& basis,
                         std::span<const complexd> z,
                         std::span<const complexd> v, double h = 1e-3);

// Norm of the m-th Taylor-coefficient functional at 0 (n = 1):
// sup{ |c_m(f)|^2 : ||f|| <= 1 } = sum_j |C_{jm}|^2. The sup is attained by
// an f vanishing to order m, so it equals the constrained extremal value.
double taylor_kernel_at_zero(const OrthonormalBasis& basis, int m);

// Adaptive truncation: start at start_degree, double until the kernel moves
// by less than rel_tol (relatively) at the query point, or the dense path
// reports IllConditioned (the last converged value is kept -- truncations
// are certified lower approximations), or max_degree is hit.
struct TruncationOptions {
  int start_degree = 8;
  int max_degree = 512;
  double rel_tol = 1e-8;
  double quad_tol = 1e-11;  // moment tolerance on the radial path
  int radial_panels = 64;   // planar tensor rule
  int angular_points = 512;
};

struct KernelValue {
  double kernel = 0.0;      // K
  double log_kernel = 0.0;  // log K (exact on the diagonal path)
  double tilde = 0.0;       // K~(z; v), 0 when no direction was requested
  double metric = 0.0;      // B^2 = tilde / kernel
  int degree = 0;           // truncation degree actually used
};

KernelValue kernel_at(const weights::ReinhardtDomain& domain,
                      const weights::RadialWeight& weight,
                      std::span<const complexd> z,
                      std::span<const complexd> v = {},
                      const TruncationOptions& opts = {});
KernelValue kernel_at(const weights::PlanarWeight& weight, complexd z,
                      complexd v = {0.0, 0.0},
                      const TruncationOptions& opts = {});

// Demailly approximation u_k(z) = (1/k) log K_{Omega, k u}(z).
double demailly_approx(const weights::ReinhardtDomain& domain,
                       const weights::RadialWeight& weight, int k,
                       std::span<const complexd> z,
                       const TruncationOptions& opts = {});
double demailly_approx(const weights::PlanarWeight& weight, int k, complexd z,
                       const TruncationOptions& opts = {});

}  // namespace berglab::bergman
