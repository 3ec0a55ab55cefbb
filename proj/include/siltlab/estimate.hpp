#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace silt {

// Universal Monte Carlo result record: sample mean with its standard error,
// plus enough bookkeeping to reproduce the run.
struct MCEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::string params;  // human-readable echo of the resolved parameters
};

// two-pass mean / stderr over replica values (values kept by the caller for
// the per-replica CSV)
inline MCEstimate mc_from_values(const std::vector<double>& values,
                                 std::uint64_t seed, std::string params) {
  if (values.empty()) throw std::invalid_argument("mc_from_values: no replicas");
  MCEstimate e;
  e.n = static_cast<std::int64_t>(values.size());
  e.seed = seed;
  e.params = std::move(params);
  double s = 0.0;
  for (double v : values) s += v;
  e.mean = s / static_cast<double>(e.n);
  if (e.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.std_err = std::sqrt(ss / (static_cast<double>(e.n) * static_cast<double>(e.n - 1)));
  }
  return e;
}

inline double binomial_stderr(double phat, std::int64_t n) {
  return std::sqrt(std::max(phat * (1.0 - phat), 0.0) / static_cast<double>(n));
}

// exact 95% upper confidence bound for a proportion when zero successes were
// observed: the p with (1-p)^n = 0.05
inline double clopper_pearson_upper_zero(std::int64_t n) {
  return 1.0 - std::pow(0.05, 1.0 / static_cast<double>(n));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

struct KsResult {
  double statistic = 0.0;  // sup |F_n - F|
  double critical = 0.0;   // rejection threshold at the requested level
  bool pass = false;
};

// One-sample Kolmogorov-Smirnov test against a cdf given as a callable.
// critical value from the asymptotic tail: c(alpha) = sqrt(-ln(alpha/2)/2)/sqrt(n)
template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf, double alpha) {
  if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks_test: bad level");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  KsResult r;
  r.statistic = d;
  r.critical = std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n);
  r.pass = d <= r.critical;
  return r;
}

}  // namespace silt
