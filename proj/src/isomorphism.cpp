#include "siltlab/isomorphism.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "siltlab/gaussian_field.hpp"
#include "siltlab/lattice_walk.hpp"
#include "siltlab/torus_green.hpp"

namespace silt {
namespace {

void check_weights(const std::vector<double>& w) {
  for (double a : w)
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("TestFunctional: weights must be finite and >= 0");
}

struct Setup {
  SpectralKernel kernel;
  std::int64_t sites;
};

Setup prepare(const TestFunctional& F, int d, int R, double lambda, double s,
              std::int64_t n) {
  if (F.kind == FunctionalKind::linear)
    throw std::invalid_argument(
        "linear functionals are unbounded; use analytic_linear_check");
  if (s == 0.0 || !std::isfinite(s))
    throw std::invalid_argument("shift s must be nonzero and finite");
  if (n < 1000) throw std::invalid_argument("need n >= 1000 replicas");
  Setup st{build_kernel(d, R, lambda), 0};
  st.sites = st.kernel.modes;
  if (F.kind == FunctionalKind::exponential &&
      static_cast<std::int64_t>(F.weights.size()) != st.sites)
    throw std::invalid_argument("weight vector must cover the R^d grid");
  return st;
}

std::string describe(const char* side, const TestFunctional& F, int d, int R,
                     double lambda, double s, std::int64_t n) {
  std::ostringstream os;
  os << side << " d=" << d << " R=" << R << " lambda=" << lambda << " s=" << s
     << " n=" << n << " kind="
     << (F.kind == FunctionalKind::constant
             ? "constant"
             : F.kind == FunctionalKind::linear ? "linear" : "exponential");
  return os.str();
}

// flat row-major index of a torus site key
std::int64_t flat_index(const SiteKey& k, int d, int R) {
  std::int64_t idx = 0;
  for (int j = 0; j < d; ++j) idx = idx * R + k.c[j];
  return idx;
}

}  // namespace

TestFunctional TestFunctional::linear(std::vector<double> w) {
  check_weights(w);
  return {FunctionalKind::linear, std::move(w)};
}

TestFunctional TestFunctional::exponential(std::vector<double> w) {
  check_weights(w);
  return {FunctionalKind::exponential, std::move(w)};
}

MCEstimate lhs_estimate(const TestFunctional& F, int d, int R, double lambda,
                        double s, std::int64_t n, std::uint64_t seed,
                        std::vector<double>* replica_values) {
  const Setup st = prepare(F, d, R, lambda, s, n);
  if (F.kind == FunctionalKind::constant) {
    if (replica_values)
      replica_values->assign(static_cast<std::size_t>(n), 1.0);
    return MCEstimate{1.0, 0.0, n, seed, describe("lhs", F, d, R, lambda, s, n)};
  }

  FieldSampler sampler(st.kernel);
  WalkConfig wcfg;
  wcfg.d = d;
  wcfg.torus_R = R;
  wcfg.stop_rate = lambda;

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    // one master seed per replica; walk and field re-salt it independently
    const std::uint64_t master =
        derive_seed(seed, StreamSalt::lhs, static_cast<std::uint64_t>(i));
    wcfg.seed = master;
    const LocalTimeField l = simulate_local_times(wcfg);
    const FieldSample z = sampler.sample(master, 0);

    // exp(-sum a_x S_x) split into the Gaussian part over the full grid and
    // the walk part over the (sparse) occupied sites
    double expo = 0.0;
    for (std::int64_t x = 0; x < st.sites; ++x) {
      const double zs = z.values[static_cast<std::size_t>(x)] + s;
      expo += F.weights[static_cast<std::size_t>(x)] * 0.5 * zs * zs;
    }
    l.for_each([&](const SiteKey& key, double mass) {
      expo += F.weights[static_cast<std::size_t>(flat_index(key, d, R))] * mass;
    });
    values.push_back(std::exp(-expo));
  }
  MCEstimate est = mc_from_values(values, seed, describe("lhs", F, d, R, lambda, s, n));
  if (replica_values) *replica_values = std::move(values);
  return est;
}

MCEstimate rhs_estimate(const TestFunctional& F, int d, int R, double lambda,
                        double s, std::int64_t n, std::uint64_t seed,
                        bool paired_with_lhs, std::vector<double>* replica_values) {
  const Setup st = prepare(F, d, R, lambda, s, n);
  FieldSampler sampler(st.kernel);

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint64_t master = derive_seed(
        seed, paired_with_lhs ? StreamSalt::lhs : StreamSalt::rhs,
        static_cast<std::uint64_t>(i));
    const FieldSample z = sampler.sample(master, 0);

    double f = 1.0;
    if (F.kind == FunctionalKind::exponential) {
      double expo = 0.0;
      for (std::int64_t x = 0; x < st.sites; ++x) {
        const double zs = z.values[static_cast<std::size_t>(x)] + s;
        expo += F.weights[static_cast<std::size_t>(x)] * 0.5 * zs * zs;
      }
      f = std::exp(-expo);
    }
    values.push_back(f * (1.0 + z.values[0] / s));
  }
  MCEstimate est = mc_from_values(values, seed, describe("rhs", F, d, R, lambda, s, n));
  if (replica_values) *replica_values = std::move(values);
  return est;
}

LinearCheckReport analytic_linear_check(int d, int R, double lambda, double s,
                                        const std::vector<double>& weights) {
  if (s == 0.0 || !std::isfinite(s))
    throw std::invalid_argument("shift s must be nonzero and finite");
  check_weights(weights);
  const SpectralKernel kernel = build_kernel(d, R, lambda);
  if (static_cast<std::int64_t>(weights.size()) != kernel.modes)
    throw std::invalid_argument("weight vector must cover the R^d grid");

  const std::int64_t origin[kMaxDim] = {0};
  const double g00 = green_value(kernel, origin, origin);
  const double quad = 0.5 * (g00 + s * s);  // E[(Z_x + s)^2] / 2, any x

  double lhs = 0.0, rhs = 0.0;
  std::int64_t site[kMaxDim] = {0};
  for (std::int64_t idx = 0; idx < kernel.modes; ++idx) {
    std::int64_t rem = idx;
    for (int j = d - 1; j >= 0; --j) {
      site[j] = rem % R;
      rem /= R;
    }
    const double a = weights[static_cast<std::size_t>(idx)];
    lhs += a * (green_value(kernel, origin, site) + quad);
    rhs += a * (quad + green_value(kernel, site, origin));
  }
  return {lhs, rhs, std::fabs(lhs - rhs)};
}

}  // namespace silt
