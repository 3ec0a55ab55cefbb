#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace silt {

struct SolverOptions {
  double grad_tol = 1e-10;     // tangent-gradient stopping threshold
  double residual_tol = 1e-8;  // Lagrange residual required to claim convergence
  int max_iters = 100000;
  std::optional<std::vector<double>> init;  // warm start; renormalized internally
};

struct VariationalSolution {
  double value = 0.0;
  std::vector<double> minimizer;    // nonnegative, normalized per problem
  double lagrange_residual = 0.0;   // l2 norm of the stationarity defect
  int iterations = 0;               // descent steps plus polish sweeps
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each accepted descent step
};

// rho1 = inf { lambda ||f||_2^2 + ||grad f||_2^2 : ||f||_{2q} = 1 } on the
// torus {0..R-1}^d, by projected gradient descent (gradient projected onto
// the tangent space of the constraint sphere, backtracking line search,
// nonnegativity clamp) from several starts, then a fixed-point polish
// f <- normalize((lambda - Delta)^{-1} f^{2q-1}) that drives the Lagrange
// residual to solver precision.  Non-convergence is flagged, and the value is
// still a valid upper bound.
VariationalSolution rho1(int d, int R, double lambda, double q,
                         const SolverOptions& opts = {});

// Dual problem: rho2 = sup { <f, G f> : ||f||_{(2q)'} = 1 } with
// (2q)' = 2q/(2q-1), by the Lagrange fixed-point iteration
// f <- normalize((G f)^{2q-1}), G applied spectrally.  rho1 * rho2 = 1.
VariationalSolution rho2(int d, int R, double lambda, double q,
                         const SolverOptions& opts = {});

// Best constant for the box-truncated critical embedding: minimizes
// ||grad f||_2^2 over ||f||_{2q} = 1, q = d/(d-2), with f supported in
// [-L, L]^d and zero outside (Dirichlet edges count).  Nonincreasing in L.
VariationalSolution sobolev_constant(int d, int L, const SolverOptions& opts = {});

struct TrendRow {
  int R = 0;
  double lambda = 0.0;
  double lambda_R2 = 0.0;
  double rho1_value = 0.0;
  double sobolev_ref = 0.0;  // box estimate at the reference L, same on all rows
};

// rho1 along a schedule of (R, lambda) with increasing lambda R^2, reported
// against the box constant: as the product grows, rho1 should stay above
// (about) the box estimate.  q = 0 selects the critical exponent d/(d-2).
std::vector<TrendRow> rho1_critical_trend(
    int d, double q, const std::vector<std::pair<int, double>>& schedule,
    int sobolev_L = 20);

// (4,2), (8,1), (16,0.5), (32,0.25): lambda R^2 doubles along the schedule
std::vector<std::pair<int, double>> default_trend_schedule();

}  // namespace silt
