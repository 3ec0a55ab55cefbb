#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "siltlab/gaussian_field.hpp"
#include "siltlab/torus_green.hpp"
#include "siltlab/variational.hpp"

using silt::FieldSample;
using silt::FieldSampler;
using silt::NormStats;
using silt::SpectralKernel;
using silt::build_kernel;
using silt::green_value;
using silt::lp_norm;
using silt::norm_statistics;
using silt::sample_field;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_upper(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

constexpr double kPhiInv075 = 0.674489750196082;  // standard normal 75% quantile

FieldSample manual_sample(int d, int R, std::vector<double> values) {
  FieldSample s;
  s.d = d;
  s.R = R;
  s.lambda = 1.0;
  s.values = std::move(values);
  return s;
}

}  // namespace

TEST_CASE("scalar field on the one-point torus is N(0, 1/lambda)") {
  const double lambda = 0.7;
  const SpectralKernel k = build_kernel(3, 1, lambda);
  const FieldSampler sampler(k);

  const int n = 10000;
  std::vector<double> z;
  z.reserve(n);
  for (int i = 0; i < n; ++i) {
    const FieldSample s = sampler.sample(99, static_cast<std::uint64_t>(i));
    REQUIRE(s.values.size() == 1);
    z.push_back(s.values[0]);
  }
  std::sort(z.begin(), z.end());

  // Kolmogorov-Smirnov against the exact scalar law at level 1e-3:
  // critical value sqrt(-ln(alpha/2)/2)/sqrt(n)
  const double sd = std::sqrt(1.0 / lambda);
  double dstat = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = normal_cdf(z[static_cast<std::size_t>(i)] / sd);
    dstat = std::max(dstat, std::fabs(f - (i + 1) / static_cast<double>(n)));
    dstat = std::max(dstat, std::fabs(f - i / static_cast<double>(n)));
  }
  const double crit = std::sqrt(-0.5 * std::log(0.5e-3)) / std::sqrt(static_cast<double>(n));
  CHECK(dstat < crit);
}

TEST_CASE("sampling is deterministic in seed and index") {
  const SpectralKernel k = build_kernel(3, 4, 1.0);
  const FieldSampler sampler(k);

  const FieldSample a = sampler.sample(7, 3);
  const FieldSample b = sampler.sample(7, 3);
  REQUIRE(a.values.size() == 64);
  CHECK(a.values == b.values);

  const FieldSample c = sampler.sample(7, 4);
  const FieldSample d = sampler.sample(8, 3);
  CHECK(a.values != c.values);
  CHECK(a.values != d.values);

  for (double v : a.values) CHECK(std::isfinite(v));

  // the convenience wrapper goes through the same path
  const FieldSample e = sample_field(k, 7, 3);
  CHECK(e.values == a.values);
}

TEST_CASE("empirical moments match the covariance kernel") {
  const int d = 3, R = 4;
  const double lambda = 1.0;
  const SpectralKernel k = build_kernel(d, R, lambda);
  const FieldSampler sampler(k);

  const int n = 100000;
  const int sites = 64;

  // 20 site pairs drawn once, fixed generator
  std::mt19937_64 gen(424242);
  std::uniform_int_distribution<int> pick(0, sites - 1);
  std::vector<std::pair<int, int>> pairs;
  while (pairs.size() < 20) {
    const int x = pick(gen), y = pick(gen);
    if (x != y) pairs.emplace_back(x, y);
  }

  std::vector<double> z0(static_cast<std::size_t>(n));
  std::vector<double> z0sq(static_cast<std::size_t>(n));
  std::vector<double> sumsq(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> prod(20, std::vector<double>(static_cast<std::size_t>(n)));

  for (int i = 0; i < n; ++i) {
    const FieldSample s = sampler.sample(1234, static_cast<std::uint64_t>(i));
    const double v0 = s.values[0];
    z0[static_cast<std::size_t>(i)] = v0;
    z0sq[static_cast<std::size_t>(i)] = v0 * v0;
    double total = 0.0;
    for (double v : s.values) total += v;
    sumsq[static_cast<std::size_t>(i)] = total * total;
    for (std::size_t p = 0; p < pairs.size(); ++p)
      prod[p][static_cast<std::size_t>(i)] =
          s.values[static_cast<std::size_t>(pairs[p].first)] *
          s.values[static_cast<std::size_t>(pairs[p].second)];
  }

  const std::vector<std::int64_t> origin = {0, 0, 0};
  const double g00 = green_value(k, origin, origin);

  SUBCASE("mean zero") {
    const oracle::MeanSe m = oracle::mean_se(z0);
    CHECK(std::fabs(m.mean) <= 4.0 * m.se);
  }
  SUBCASE("variance of Z0 is the Green value at the origin") {
    const oracle::MeanSe m = oracle::mean_se(z0sq);
    CHECK(std::fabs(m.mean - g00) <= 4.0 * m.se);
  }
  SUBCASE("field sum is the zero mode, variance R^d/lambda") {
    const oracle::MeanSe m = oracle::mean_se(sumsq);
    CHECK(std::fabs(m.mean - 64.0) <= 4.0 * m.se);
  }
  SUBCASE("pair covariances track green_value at 5 stderr") {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      std::vector<std::int64_t> x(3), y(3);
      int rx = pairs[p].first, ry = pairs[p].second;
      for (int j = 2; j >= 0; --j) {
        x[static_cast<std::size_t>(j)] = rx % R;
        y[static_cast<std::size_t>(j)] = ry % R;
        rx /= R;
        ry /= R;
      }
      const double target = green_value(k, x, y);
      const oracle::MeanSe m = oracle::mean_se(prod[p]);
      CHECK(std::fabs(m.mean - target) <= 5.0 * m.se);
    }
  }
}

TEST_CASE("spectral synthesis agrees with a dense Cholesky sampler") {
  // same covariance realized by a completely different factorization; compare
  // summary statistics of the two ensembles
  const int d = 3, R = 2;
  const double lambda = 0.8;
  const SpectralKernel k = build_kernel(d, R, lambda);
  const FieldSampler sampler(k);

  const oracle::Dense G = oracle::dense_green_matrix(d, R, lambda);
  const oracle::Dense L = oracle::cholesky(G);

  const int n = 20000;
  const int sites = 8;

  std::vector<double> lib_sq(static_cast<std::size_t>(n)), chol_sq(static_cast<std::size_t>(n));
  std::vector<double> lib_p6(static_cast<std::size_t>(n)), chol_p6(static_cast<std::size_t>(n));

  std::mt19937_64 gen(555);
  std::normal_distribution<double> nd;
  std::vector<double> xi(static_cast<std::size_t>(sites));
  std::vector<double> zc(static_cast<std::size_t>(sites));

  for (int i = 0; i < n; ++i) {
    const FieldSample s = sampler.sample(31337, static_cast<std::uint64_t>(i));
    double sq = 0.0;
    for (double v : s.values) sq += v * v;
    lib_sq[static_cast<std::size_t>(i)] = sq;
    lib_p6[static_cast<std::size_t>(i)] = lp_norm(s, 6.0);

    for (double& v : xi) v = nd(gen);
    double csq = 0.0, c6 = 0.0;
    for (int r = 0; r < sites; ++r) {
      double acc = 0.0;
      for (int c = 0; c <= r; ++c) acc += L.at(r, c) * xi[static_cast<std::size_t>(c)];
      zc[static_cast<std::size_t>(r)] = acc;
      csq += acc * acc;
      c6 += std::pow(std::fabs(acc), 6.0);
    }
    chol_sq[static_cast<std::size_t>(i)] = csq;
    chol_p6[static_cast<std::size_t>(i)] = std::pow(c6, 1.0 / 6.0);
  }

  // E sum Z^2 = trace G, exact for both samplers
  double trace = 0.0;
  for (int r = 0; r < sites; ++r) trace += G.at(r, r);

  const oracle::MeanSe a = oracle::mean_se(lib_sq);
  const oracle::MeanSe b = oracle::mean_se(chol_sq);
  CHECK(std::fabs(a.mean - trace) <= 4.0 * a.se);
  CHECK(std::fabs(b.mean - trace) <= 4.0 * b.se);

  const oracle::MeanSe p = oracle::mean_se(lib_p6);
  const oracle::MeanSe q = oracle::mean_se(chol_p6);
  CHECK(std::fabs(p.mean - q.mean) <= 4.0 * std::sqrt(p.se * p.se + q.se * q.se));
}

TEST_CASE("lp_norm") {
  SUBCASE("all-ones field has norm R^{d/p}") {
    const FieldSample s = manual_sample(3, 2, std::vector<double>(8, 1.0));
    CHECK(lp_norm(s, 6.0) == doctest::Approx(std::pow(2.0, 3.0 / 6.0)).epsilon(1e-14));
    CHECK(lp_norm(s, 2.0) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
  }
  SUBCASE("single nonzero entry gives its magnitude for every p") {
    std::vector<double> v(8, 0.0);
    v[5] = -3.5;
    const FieldSample s = manual_sample(3, 2, v);
    for (double p : {1.0, 2.0, 2.7, 6.0}) CHECK(lp_norm(s, p) == doctest::Approx(3.5).epsilon(1e-14));
  }
  SUBCASE("p=2 equals the Euclidean norm") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    std::vector<double> v(27);
    for (double& x : v) x = nd(gen);
    double dot = 0.0;
    for (double x : v) dot += x * x;
    const FieldSample s = manual_sample(3, 3, v);
    CHECK(std::fabs(lp_norm(s, 2.0) - std::sqrt(dot)) < 1e-12);
  }
  SUBCASE("p below 1 rejected") {
    const FieldSample s = manual_sample(3, 2, std::vector<double>(8, 1.0));
    CHECK_THROWS_AS(lp_norm(s, 0.5), std::invalid_argument);
  }
}

TEST_CASE("norm statistics") {
  const SpectralKernel k = build_kernel(3, 2, 1.0);

  SUBCASE("sample-size floor enforced") {
    CHECK_THROWS_AS(norm_statistics(k, 6.0, 999, 1), std::invalid_argument);
    CHECK_THROWS_AS(norm_statistics(k, 0.5, 2000, 1), std::invalid_argument);
  }

  const NormStats stats = norm_statistics(k, 6.0, 4000, 2024);

  SUBCASE("table sorted, median inside the central rank band") {
    REQUIRE(stats.norms.size() == 4000);
    CHECK(std::is_sorted(stats.norms.begin(), stats.norms.end()));
    CHECK(stats.median >= stats.norms[1600]);
    CHECK(stats.median <= stats.norms[2400]);
    CHECK(stats.tail_fraction(stats.median) == doctest::Approx(0.5).epsilon(0.04));
    CHECK(stats.deviation_fraction(0.0) == 1.0);
    CHECK(stats.median_stderr() > 0.0);
  }

  SUBCASE("median bound from the mean bound and the even Gaussian moment") {
    // median^2 <= 2^{1/q} R^{d/q} G(0,0) (E V^{2q})^{1/q} for q = 3, with a
    // 3-stderr Monte Carlo allowance on the squared median
    const std::vector<std::int64_t> origin = {0, 0, 0};
    const double g00 = green_value(k, origin, origin);
    const double q = 3.0;
    const double bound = std::pow(2.0, 1.0 / q) * std::pow(2.0, 3.0 / q) * g00 *
                         std::pow(oracle::gaussian_even_moment(3), 1.0 / q);
    const double slack = 3.0 * 2.0 * stats.median * stats.median_stderr();
    CHECK(stats.median * stats.median <= bound + slack);
  }

  SUBCASE("scalar median matches the half-normal quantile") {
    const double lambda = 0.7;
    const SpectralKernel k1 = build_kernel(3, 1, lambda);
    const NormStats s1 = norm_statistics(k1, 2.0, 20000, 7);
    const double target = std::sqrt(1.0 / lambda) * kPhiInv075;
    CHECK(std::fabs(s1.median - target) <= 4.0 * s1.median_stderr());
  }
}

TEST_CASE("norm concentration around the median") {
  // P[| ||Z|| - M | >= sqrt(u)] <= 2.5 * 2 P(V >= sqrt(rho1 u)) where rho1 is
  // the Rayleigh-type constant from the variational module and 2.5 is the
  // Monte Carlo allowance
  const int d = 3, R = 2;
  const double lambda = 1.0;
  const double q = 3.0;

  const double rho1 = silt::rho1(d, R, lambda, q).value;
  REQUIRE(rho1 > 0.0);

  const SpectralKernel k = build_kernel(d, R, lambda);
  const NormStats stats = norm_statistics(k, 2.0 * q, 20000, 99);

  for (double u : {1.0, 2.0, 4.0}) {
    const double lhs = stats.deviation_fraction(std::sqrt(u));
    const double rhs = 2.5 * 2.0 * normal_upper(std::sqrt(rho1 * u));
    CHECK(lhs <= rhs);
  }
}
