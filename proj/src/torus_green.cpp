#include "siltlab/torus_green.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "siltlab/dft.hpp"
#include "siltlab/lattice_walk.hpp"

namespace silt {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMinLambda = 1e-12;

void check_domain(int d, int R) {
  if (d < 1) throw std::invalid_argument("kernel dimension must be at least 1");
  if (d > kMaxDim)
    throw std::invalid_argument("kernel dimension exceeds supported maximum (8)");
  if (R < 1) throw std::invalid_argument("torus side must be at least 1");
}

}  // namespace

SpectralKernel build_kernel(int d, int R, double lambda) {
  check_domain(d, R);
  if (!(lambda >= kMinLambda))
    throw std::invalid_argument("kill rate must be at least 1e-12");

  SpectralKernel k;
  k.d = d;
  k.R = R;
  k.lambda = lambda;
  k.modes = 1;
  for (int j = 0; j < d; ++j) {
    if (k.modes > (std::int64_t{1} << 62) / R)
      throw std::invalid_argument("mode count R^d overflows");
    k.modes *= R;
  }

  k.axis_nu.resize(R);
  k.cos_tab.resize(R);
  for (int t = 0; t < R; ++t) {
    const double theta = kTwoPi * t / R;
    k.axis_nu[t] = 2.0 * (1.0 - std::cos(theta));
    k.cos_tab[t] = std::cos(theta);
  }

  if (k.modes <= (std::int64_t{1} << 24)) {
    k.mu.resize(static_cast<std::size_t>(k.modes));
    for (std::int64_t idx = 0; idx < k.modes; ++idx) {
      std::int64_t rem = idx;
      double nu = 0.0;
      for (int j = 0; j < d; ++j) {
        nu += k.axis_nu[static_cast<std::size_t>(rem % R)];
        rem /= R;
      }
      k.mu[static_cast<std::size_t>(idx)] = lambda + nu;
    }
  }
  return k;
}

double green_value(const SpectralKernel& kernel, const std::int64_t* x,
                   const std::int64_t* y) {
  const int d = kernel.d;
  const int R = kernel.R;

  std::int64_t v[kMaxDim];
  for (int j = 0; j < d; ++j) {
    std::int64_t r = (x[j] - y[j]) % R;
    if (r < 0) r += R;
    v[j] = r;
  }

  double acc = 0.0;
  for (std::int64_t idx = 0; idx < kernel.modes; ++idx) {
    std::int64_t rem = idx;
    std::int64_t phase = 0;
    double mu;
    if (kernel.has_mu_table()) {
      for (int j = d - 1; j >= 0; --j) {
        phase += (rem % R) * v[j];
        rem /= R;
      }
      mu = kernel.mu[static_cast<std::size_t>(idx)];
    } else {
      double nu = 0.0;
      for (int j = d - 1; j >= 0; --j) {
        const std::int64_t m = rem % R;
        rem /= R;
        phase += m * v[j];
        nu += kernel.axis_nu[static_cast<std::size_t>(m)];
      }
      mu = kernel.lambda + nu;
    }
    acc += kernel.cos_tab[static_cast<std::size_t>(phase % R)] / mu;
  }
  return acc / static_cast<double>(kernel.modes);
}

double green_value(const SpectralKernel& kernel, const std::vector<std::int64_t>& x,
                   const std::vector<std::int64_t>& y) {
  if (static_cast<int>(x.size()) != kernel.d || static_cast<int>(y.size()) != kernel.d)
    throw std::invalid_argument("green_value: coordinate size must match kernel dimension");
  return green_value(kernel, x.data(), y.data());
}

double heat_kernel_zero(int d, int R, double t) {
  check_domain(d, R);
  if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative");

  // one-dimensional return probability, then the d-fold product (axes are
  // independent because the jump chain picks an axis uniformly and the
  // exponential clock thins accordingly)
  double axis = 0.0;
  for (int m = 0; m < R; ++m) {
    const double nu = 2.0 * (1.0 - std::cos(kTwoPi * m / R));
    axis += std::exp(-t * nu);
  }
  axis /= R;

  double p = 1.0;
  for (int j = 0; j < d; ++j) p *= axis;
  return p;
}

std::vector<double> apply_green(const SpectralKernel& kernel,
                                const std::vector<double>& in) {
  if (static_cast<std::int64_t>(in.size()) != kernel.modes)
    throw std::invalid_argument("apply_green: input size must equal R^d");

  std::vector<std::complex<double>> buf(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) buf[i] = in[i];

  SeparableDft dft(kernel.d, kernel.R);
  dft.forward(buf.data());
  for (std::int64_t idx = 0; idx < kernel.modes; ++idx) {
    double mu;
    if (kernel.has_mu_table()) {
      mu = kernel.mu[static_cast<std::size_t>(idx)];
    } else {
      std::int64_t rem = idx;
      double nu = 0.0;
      for (int j = 0; j < kernel.d; ++j) {
        nu += kernel.axis_nu[static_cast<std::size_t>(rem % kernel.R)];
        rem /= kernel.R;
      }
      mu = kernel.lambda + nu;
    }
    buf[static_cast<std::size_t>(idx)] /= mu;
  }
  dft.inverse(buf.data());

  std::vector<double> out(in.size());
  const double norm = 1.0 / static_cast<double>(kernel.modes);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = buf[i].real() * norm;
  return out;
}

namespace {

// Midpoint rule for the Green integrand over [-pi,pi]^d with n points per
// axis, exploiting the theta -> -theta symmetry (integrand depends on
// cos(theta_j) only): sum over the half-grid and weight by 2^d.
double midpoint_level(int d, std::int64_t n) {
  const std::int64_t half = n / 2;
  std::vector<double> c(static_cast<std::size_t>(half));
  const double h = kTwoPi / static_cast<double>(n);
  for (std::int64_t j = 0; j < half; ++j) {
    const double theta = -3.14159265358979323846264338328 + (j + 0.5) * h;
    c[static_cast<std::size_t>(j)] = 2.0 * (1.0 - std::cos(theta));
  }

  // odometer over the outer d-1 axes, tight loop over the last one; all
  // summands are positive and of comparable size, so plain accumulation
  // is adequate here
  std::vector<std::int64_t> digit(static_cast<std::size_t>(d - 1), 0);
  double total = 0.0;
  for (;;) {
    double base = 0.0;
    for (int j = 0; j < d - 1; ++j)
      base += c[static_cast<std::size_t>(digit[static_cast<std::size_t>(j)])];
    double inner = 0.0;
    for (std::int64_t j = 0; j < half; ++j)
      inner += 1.0 / (base + c[static_cast<std::size_t>(j)]);
    total += inner;

    int ax = d - 2;
    while (ax >= 0 && ++digit[static_cast<std::size_t>(ax)] == half)
      digit[static_cast<std::size_t>(ax--)] = 0;
    if (ax < 0) break;
  }

  double scale = 1.0;
  for (int j = 0; j < d; ++j) scale *= 2.0 / static_cast<double>(n);
  return total * scale;
}

}  // namespace

GreenEstimate green_infinite(int d, double tol) {
  if (d < 3)
    throw std::invalid_argument("full-lattice Green function requires d >= 3");
  if (d > kMaxDim)
    throw std::invalid_argument("kernel dimension exceeds supported maximum (8)");
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("tolerance must be positive and finite");

  // The midpoint error expands in powers h^{d-2}, h^{d-1}, ... from the
  // integrable singularity plus even powers from the smooth remainder; the
  // union starts at 1 for d = 3 and at 2 for d >= 4, advancing by one.
  constexpr std::int64_t kCellBudget = 300'000'000;
  constexpr int kMaxLevels = 8;  // n = 8 ... 1024

  double diag_prev = 0.0;
  std::vector<double> row;  // Richardson tableau, previous row
  for (int m = 0; m < kMaxLevels; ++m) {
    const std::int64_t n = std::int64_t{8} << m;
    std::int64_t cells = 1;
    bool over = false;
    for (int j = 0; j < d; ++j) {
      cells *= n / 2;
      if (cells > kCellBudget) {
        over = true;
        break;
      }
    }
    if (over) break;

    std::vector<double> next(static_cast<std::size_t>(m + 1));
    next[0] = midpoint_level(d, n);
    for (int j = 1; j <= m; ++j) {
      const int p = (d == 3) ? j : j + 1;
      const double factor = std::pow(2.0, p) - 1.0;
      next[static_cast<std::size_t>(j)] =
          next[static_cast<std::size_t>(j - 1)] +
          (next[static_cast<std::size_t>(j - 1)] - row[static_cast<std::size_t>(j - 1)]) /
              factor;
    }
    const double diag = next[static_cast<std::size_t>(m)];
    if (m >= 1) {
      const double err = std::fabs(diag - diag_prev);
      if (err <= tol) return {diag, err, m + 1};
    }
    diag_prev = diag;
    row = std::move(next);
  }
  throw std::runtime_error(
      "green_infinite: tolerance " + std::to_string(tol) +
      " not reached within the refinement budget; request a looser tolerance");
}

}  // namespace silt
