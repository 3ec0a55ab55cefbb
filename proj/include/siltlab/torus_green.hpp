#pragma once

#include <cstdint>
#include <vector>

namespace silt {

// Spectral data for the resolvent (lambda - Delta)^{-1} on the discrete torus
// {0,...,R-1}^d, where Delta is the unnormalized lattice Laplacian
// (Delta f)(x) = sum_{y ~ x} (f(y) - f(x)).  Fourier modes k have eigenvalue
// mu_k = lambda + nu_k with nu_k = sum_j 2 (1 - cos(2 pi k_j / R)).
struct SpectralKernel {
  int d = 0;
  int R = 0;
  double lambda = 0.0;
  std::int64_t modes = 0;       // R^d
  std::vector<double> axis_nu;  // nu contribution per axis digit, length R
  std::vector<double> cos_tab;  // cos(2 pi t / R), t in [0, R)
  std::vector<double> mu;       // full eigenvalue table, only if modes <= 2^24

  bool has_mu_table() const { return !mu.empty(); }
};

// lambda below 1e-12 is rejected: the zero mode contributes 1/(lambda R^d)
// and the inversion loses all significance past that point.
SpectralKernel build_kernel(int d, int R, double lambda);

// Green function G_{R,lambda}(x, y) by direct mode summation.  Coordinates
// are reduced mod R internally, so any integer representatives work.
double green_value(const SpectralKernel& kernel, const std::int64_t* x,
                   const std::int64_t* y);

// Convenience overload for vectors (sizes must equal kernel.d).
double green_value(const SpectralKernel& kernel, const std::vector<std::int64_t>& x,
                   const std::vector<std::int64_t>& y);

// Return probability p_t(0,0) for the continuous-time walk on the torus,
// computed as a d-fold product of the one-dimensional kernel.  t = 0 gives 1.
double heat_kernel_zero(int d, int R, double t);

// Apply the resolvent to a real grid function (row-major R^d layout):
// out = (lambda - Delta)^{-1} in.  Exact up to roundoff via forward DFT,
// division by mu_k, inverse DFT, and a 1/modes normalization.
std::vector<double> apply_green(const SpectralKernel& kernel,
                                const std::vector<double>& in);

struct GreenEstimate {
  double value = 0.0;
  double error_bound = 0.0;  // last extrapolation increment, a heuristic bound
  int levels = 0;            // refinement levels actually consumed
};

// Full-lattice Green function at the origin for d >= 3,
//   G_d(0,0) = (2 pi)^{-d} int_{[-pi,pi]^d} dtheta / sum_j 2 (1 - cos theta_j),
// via midpoint rules on shifted grids plus iterated Richardson extrapolation.
// Throws std::runtime_error if tol cannot be met within the level budget.
GreenEstimate green_infinite(int d, double tol);

}  // namespace silt
