#pragma once

// Test-side oracles, deliberately implemented with different algorithms than
// the library: dense LU solves instead of spectral inversion, a dense matrix
// exponential instead of the separable heat product, a full-grid mode sum
// instead of the shifted midpoint rule, and plain Cholesky sampling instead
// of DFT synthesis.  Agreement between the two routes is the point.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

// ---- dense linear algebra --------------------------------------------------

// row-major square matrix
struct Dense {
  int n = 0;
  std::vector<double> a;

  explicit Dense(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Gaussian elimination with partial pivoting, solves A x = b
inline std::vector<double> lu_solve(Dense A, std::vector<double> b) {
  const int n = A.n;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A.at(r, col)) > std::fabs(A.at(piv, col))) piv = r;
    if (A.at(piv, col) == 0.0) throw std::runtime_error("lu_solve: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(A.at(piv, j), A.at(col, j));
      std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double m = A.at(r, col) / A.at(col, col);
      if (m == 0.0) continue;
      A.at(r, col) = 0.0;
      for (int j = col + 1; j < n; ++j) A.at(r, j) -= m * A.at(col, j);
      b[static_cast<std::size_t>(r)] -= m * b[static_cast<std::size_t>(col)];
    }
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) s -= A.at(i, j) * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = s / A.at(i, i);
  }
  return x;
}

inline Dense matmul(const Dense& A, const Dense& B) {
  Dense C(A.n);
  for (int i = 0; i < A.n; ++i)
    for (int k = 0; k < A.n; ++k) {
      const double v = A.at(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < A.n; ++j) C.at(i, j) += v * B.at(k, j);
    }
  return C;
}

// e^A by scaling-and-squaring with a Taylor series on the scaled matrix
inline Dense matexp(Dense A) {
  const int n = A.n;
  double norm1 = 0.0;
  for (int j = 0; j < n; ++j) {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += std::fabs(A.at(i, j));
    norm1 = std::max(norm1, c);
  }
  int squarings = 0;
  while (norm1 > 0.5) {
    norm1 *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (double& v : A.a) v *= scale;

  Dense result(n), term(n);
  for (int i = 0; i < n; ++i) {
    result.at(i, i) = 1.0;
    term.at(i, i) = 1.0;
  }
  for (int k = 1; k <= 40; ++k) {
    term = matmul(term, A);
    const double inv_k = 1.0 / k;
    double largest = 0.0;
    for (std::size_t idx = 0; idx < term.a.size(); ++idx) {
      term.a[idx] *= inv_k;
      result.a[idx] += term.a[idx];
      largest = std::max(largest, std::fabs(term.a[idx]));
    }
    if (largest < 1e-20) break;
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result);
  return result;
}

// lower-triangular factor L with L L^T = A (A symmetric positive definite)
inline Dense cholesky(const Dense& A) {
  Dense L(A.n);
  for (int i = 0; i < A.n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = A.at(i, j);
      for (int k = 0; k < j; ++k) s -= L.at(i, k) * L.at(j, k);
      if (i == j) {
        if (!(s > 0.0)) throw std::runtime_error("cholesky: matrix not positive definite");
        L.at(i, i) = std::sqrt(s);
      } else {
        L.at(i, j) = s / L.at(j, j);
      }
    }
  }
  return L;
}

// ---- torus operators as dense matrices --------------------------------------

// flat row-major index (last axis fastest), matching the library grid layout
inline int flat_site(const std::vector<int>& site, int R) {
  int idx = 0;
  for (int c : site) idx = idx * R + c;
  return idx;
}

// (lambda - Delta) on the torus {0..R-1}^d as an explicit dense matrix
inline Dense dense_resolvent(int d, int R, double lambda) {
  int n = 1;
  for (int j = 0; j < d; ++j) n *= R;
  Dense A(n);
  std::vector<int> site(static_cast<std::size_t>(d));
  for (int i = 0; i < n; ++i) {
    int rem = i;
    for (int j = d - 1; j >= 0; --j) {
      site[static_cast<std::size_t>(j)] = rem % R;
      rem /= R;
    }
    A.at(i, i) += lambda + 2.0 * d;
    for (int j = 0; j < d; ++j) {
      for (int dir : {-1, +1}) {
        std::vector<int> nb = site;
        nb[static_cast<std::size_t>(j)] = (nb[static_cast<std::size_t>(j)] + dir + R) % R;
        A.at(i, flat_site(nb, R)) -= 1.0;  // += on multi-edges when R <= 2
      }
    }
  }
  return A;
}

// full Green matrix by dense solves against unit vectors; O(n^3), small n only
inline Dense dense_green_matrix(int d, int R, double lambda) {
  Dense A = dense_resolvent(d, R, lambda);
  Dense G(A.n);
  for (int col = 0; col < A.n; ++col) {
    std::vector<double> e(static_cast<std::size_t>(A.n), 0.0);
    e[static_cast<std::size_t>(col)] = 1.0;
    const std::vector<double> g = lu_solve(A, std::move(e));
    for (int i = 0; i < A.n; ++i) G.at(i, col) = g[static_cast<std::size_t>(i)];
  }
  return G;
}

// ---- full-lattice Green value by lattice-sum quadrature ----------------------

// (1/n^d) sum over nonzero Fourier modes of 1/nu(2 pi k / n): the periodic
// trapezoid rule for the Green integral with the singular node dropped.
// The axis roles can be permuted to exercise the integrand's symmetry.
inline double green_mode_sum(int d, int n, const std::vector<int>& axis_order) {
  std::vector<double> nu_axis(static_cast<std::size_t>(n));
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (int k = 0; k < n; ++k)
    nu_axis[static_cast<std::size_t>(k)] = 2.0 * (1.0 - std::cos(kTwoPi * k / n));

  std::int64_t total = 1;
  for (int j = 0; j < d; ++j) total *= n;

  double sum = 0.0, comp = 0.0;  // Neumaier, the terms span many magnitudes
  std::vector<int> digit(static_cast<std::size_t>(d), 0);
  for (std::int64_t idx = 1; idx < total; ++idx) {
    // odometer over mode digits
    for (int j = d - 1; j >= 0; --j) {
      if (++digit[static_cast<std::size_t>(j)] < n) break;
      digit[static_cast<std::size_t>(j)] = 0;
    }
    double nu = 0.0;
    for (int j = 0; j < d; ++j)
      nu += nu_axis[static_cast<std::size_t>(digit[static_cast<std::size_t>(axis_order[static_cast<std::size_t>(j)])])];
    const double v = 1.0 / nu;
    const double t = sum + v;
    comp += (std::fabs(sum) >= std::fabs(v)) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return (sum + comp) / static_cast<double>(total);
}

struct QuadratureOracle {
  double value = 0.0;
  double stability = 0.0;  // |last two extrapolants|, the self-refinement gap
};

// Richardson ladder on doubling grids.  The raw error is dominated by the
// dropped singular cell, mass ~ h^{d-2}, and the remaining corrections step
// by h^2, so the ladder powers are d-2, d, d+2.
inline QuadratureOracle lattice_green_quadrature(int d, const std::vector<int>& ns) {
  std::vector<int> identity(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) identity[static_cast<std::size_t>(j)] = j;

  std::vector<double> row;
  row.reserve(ns.size());
  for (int n : ns) row.push_back(green_mode_sum(d, n, identity));

  for (int level = 0; level < 3 && row.size() > 1; ++level) {
    const double f = std::ldexp(1.0, d - 2 + 2 * level);  // 2^{d-2+2*level}
    std::vector<double> next;
    next.reserve(row.size() - 1);
    for (std::size_t i = 0; i + 1 < row.size(); ++i)
      next.push_back((f * row[i + 1] - row[i]) / (f - 1.0));
    row.swap(next);
  }
  QuadratureOracle out;
  out.value = row.back();
  out.stability = row.size() > 1 ? std::fabs(row.back() - row[row.size() - 2])
                                 : std::numeric_limits<double>::infinity();
  return out;
}

// ---- distribution helpers ----------------------------------------------------

// E V^{2q} = (2q-1)!! for V standard normal
inline double gaussian_even_moment(int q) {
  double m = 1.0;
  for (int k = 2 * q - 1; k > 1; k -= 2) m *= k;
  return m;
}

// composite Simpson rule on [a, b] with n (even) panels
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// mean and the standard error of the mean
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  MeanSe r;
  const double n = static_cast<double>(v.size());
  for (double x : v) r.mean += x;
  r.mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / (n * (n - 1.0)));
  return r;
}

}  // namespace oracle
