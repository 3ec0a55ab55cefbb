#include "siltlab/gaussian_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "siltlab/intersection.hpp"

namespace silt {

FieldSampler::FieldSampler(const SpectralKernel& kernel)
    : d_(kernel.d),
      R_(kernel.R),
      lambda_(kernel.lambda),
      n_(kernel.modes),
      dft_(kernel.d, kernel.R) {
  if (!kernel.has_mu_table())
    throw std::invalid_argument(
        "FieldSampler: grid too large for synthesis (needs R^d <= 2^24)");

  conj_.resize(static_cast<std::size_t>(n_));
  scale_.resize(static_cast<std::size_t>(n_));
  for (std::int64_t idx = 0; idx < n_; ++idx) {
    // mirror each digit: k_j -> (R - k_j) mod R
    std::int64_t rem = idx, mirror = 0, weight = 1;
    for (int j = 0; j < d_; ++j) {
      const std::int64_t k = rem % R_;
      rem /= R_;
      mirror += ((R_ - k) % R_) * weight;
      weight *= R_;
    }
    conj_[static_cast<std::size_t>(idx)] = mirror;
    scale_[static_cast<std::size_t>(idx)] =
        1.0 / std::sqrt(kernel.mu[static_cast<std::size_t>(idx)] *
                        static_cast<double>(n_));
  }
}

FieldSample FieldSampler::sample(std::uint64_t seed, std::uint64_t index) const {
  Rng rng(seed, StreamSalt::field, index);

  std::vector<std::complex<double>> spec(static_cast<std::size_t>(n_));
  constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
  for (std::int64_t idx = 0; idx < n_; ++idx) {
    const std::int64_t partner = conj_[static_cast<std::size_t>(idx)];
    const double sc = scale_[static_cast<std::size_t>(idx)];
    if (idx < partner) {
      const double re = rng.normal() * kInvSqrt2;
      const double im = rng.normal() * kInvSqrt2;
      spec[static_cast<std::size_t>(idx)] = {re * sc, im * sc};
      spec[static_cast<std::size_t>(partner)] = {re * sc, -im * sc};
    } else if (idx == partner) {
      spec[static_cast<std::size_t>(idx)] = {rng.normal() * sc, 0.0};
    }
    // idx > partner: already filled by the mirrored pair
  }

  dft_.inverse(spec.data());

  FieldSample out;
  out.d = d_;
  out.R = R_;
  out.lambda = lambda_;
  out.seed = seed;
  out.index = index;
  out.values.resize(static_cast<std::size_t>(n_));
  for (std::int64_t i = 0; i < n_; ++i)
    out.values[static_cast<std::size_t>(i)] = spec[static_cast<std::size_t>(i)].real();
  return out;
}

FieldSample sample_field(const SpectralKernel& kernel, std::uint64_t seed,
                         std::uint64_t index) {
  return FieldSampler(kernel).sample(seed, index);
}

double lp_norm(const FieldSample& sample, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  std::vector<double> terms;
  terms.reserve(sample.values.size());
  for (double v : sample.values) terms.push_back(std::pow(std::fabs(v), p));
  return std::pow(compensated_sum(terms), 1.0 / p);
}

double NormStats::tail_fraction(double threshold) const {
  auto it = std::lower_bound(norms.begin(), norms.end(), threshold);
  return static_cast<double>(norms.end() - it) / static_cast<double>(n);
}

double NormStats::deviation_fraction(double u) const {
  std::int64_t hits = 0;
  for (double x : norms)
    if (std::fabs(x - median) >= u) ++hits;
  return static_cast<double>(hits) / static_cast<double>(n);
}

double NormStats::median_stderr() const {
  // binomial fluctuation of the median rank is sqrt(n)/2; the spread of the
  // order statistics across that rank window is the one-sigma half-width
  const double half = 0.5 * std::sqrt(static_cast<double>(n));
  auto clamp_rank = [&](double r) {
    std::int64_t i = static_cast<std::int64_t>(std::llround(r));
    if (i < 0) i = 0;
    if (i >= n) i = n - 1;
    return static_cast<std::size_t>(i);
  };
  const double lo = norms[clamp_rank(0.5 * static_cast<double>(n) - half)];
  const double hi = norms[clamp_rank(0.5 * static_cast<double>(n) + half)];
  return 0.5 * (hi - lo);
}

NormStats norm_statistics(const SpectralKernel& kernel, double p, std::int64_t n,
                          std::uint64_t seed) {
  if (!(p >= 1.0)) throw std::invalid_argument("norm_statistics: p must be >= 1");
  if (n < 1000) throw std::invalid_argument("norm_statistics: need n >= 1000");

  FieldSampler sampler(kernel);
  NormStats stats;
  stats.p = p;
  stats.n = n;
  stats.norms.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i)
    stats.norms.push_back(lp_norm(sampler.sample(seed, static_cast<std::uint64_t>(i)), p));

  std::sort(stats.norms.begin(), stats.norms.end());
  const std::size_t mid = static_cast<std::size_t>(n / 2);
  stats.median = (n % 2 == 1) ? stats.norms[mid]
                              : 0.5 * (stats.norms[mid - 1] + stats.norms[mid]);

  std::vector<double> copy = stats.norms;
  stats.mean = compensated_sum(copy) / static_cast<double>(n);
  return stats;
}

}  // namespace silt
