#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "siltlab/dft.hpp"
#include "siltlab/rng.hpp"
#include "siltlab/torus_green.hpp"

namespace silt {

// One realization of the centered Gaussian field on the torus grid whose
// covariance is the resolvent kernel: Cov(Z_x, Z_y) = G_{R,lambda}(x, y).
struct FieldSample {
  int d = 0;
  int R = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;           // replica substream index
  std::vector<double> values;        // R^d reals, row-major grid layout
};

// Spectral synthesis: one standard complex Gaussian per conjugate mode pair
// (a real one on self-conjugate modes), scaled by 1/sqrt(mu_k R^d), assembled
// with Hermitian symmetry and pushed through the inverse DFT.  Exact in
// distribution for the circulant covariance, O(R^d * R * d) per sample.
//
// Draw order is pinned for reproducibility: modes are visited in ascending
// flat index; a strictly-below-partner index draws (re, im), a self-conjugate
// index draws one real variate, and partner indices above draw nothing.
class FieldSampler {
 public:
  explicit FieldSampler(const SpectralKernel& kernel);

  // deterministic in (seed, index); independent replicas via the index
  FieldSample sample(std::uint64_t seed, std::uint64_t index = 0) const;

  int dim() const { return d_; }
  int side() const { return R_; }

 private:
  int d_, R_;
  double lambda_;
  std::int64_t n_;
  std::vector<std::int64_t> conj_;   // flat index of the mirrored mode -k
  std::vector<double> scale_;        // 1/sqrt(mu_k R^d)
  SeparableDft dft_;
};

// convenience wrapper that builds the sampler once and samples once
FieldSample sample_field(const SpectralKernel& kernel, std::uint64_t seed,
                         std::uint64_t index = 0);

// (sum_x |v_x|^p)^(1/p), p >= 1
double lp_norm(const FieldSample& sample, double p);

// Empirical statistics of ||Z||_p over n independent replicas.
struct NormStats {
  double p = 0.0;
  std::int64_t n = 0;
  double median = 0.0;
  double mean = 0.0;
  std::vector<double> norms;  // sorted ascending; the full tail table

  // fraction of replicas with norm >= threshold
  double tail_fraction(double threshold) const;
  // fraction with |norm - median| >= u
  double deviation_fraction(double u) const;
  // distribution-free one-sigma half-width from the binomial rank interval
  // around the median
  double median_stderr() const;
};

NormStats norm_statistics(const SpectralKernel& kernel, double p, std::int64_t n,
                          std::uint64_t seed);

}  // namespace silt
