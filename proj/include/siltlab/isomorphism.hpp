#pragma once

#include <cstdint>
#include <vector>

#include "siltlab/estimate.hpp"

namespace silt {

// Bounded test functionals F over nonnegative site fields (S_x; x in T_R).
// The exponential family exp(-sum_x a_x S_x) with a_x >= 0 is bounded by 1,
// which the distributional identity below requires for its Monte Carlo route.
// Linear functionals are unbounded and therefore only admitted through the
// closed-form check, never through lhs/rhs estimation.
enum class FunctionalKind { constant, linear, exponential };

struct TestFunctional {
  FunctionalKind kind = FunctionalKind::constant;
  std::vector<double> weights;  // row-major over the R^d grid; empty for constant

  static TestFunctional constant() { return {}; }
  static TestFunctional linear(std::vector<double> w);
  static TestFunctional exponential(std::vector<double> w);
};

// Both sides of the isomorphism identity
//   E[F(S)] = E[F(((Z + s)^2 / 2)) (1 + Z_0 / s)],
// where S_x = l_tau(x) + (Z_x + s)^2 / 2, l is the occupation field of the
// torus walk killed at rate lambda, Z is the independent centered Gaussian
// field with covariance G_{R,lambda}, and s != 0 is a fixed shift.
//
// The two estimators draw from distinct substreams by default, so their
// errors are independent; with paired_with_lhs the right side reuses the left
// side's field draws (common random numbers, variance reduction only).
MCEstimate lhs_estimate(const TestFunctional& F, int d, int R, double lambda,
                        double s, std::int64_t n, std::uint64_t seed,
                        std::vector<double>* replica_values = nullptr);
MCEstimate rhs_estimate(const TestFunctional& F, int d, int R, double lambda,
                        double s, std::int64_t n, std::uint64_t seed,
                        bool paired_with_lhs = false,
                        std::vector<double>* replica_values = nullptr);

struct LinearCheckReport {
  double lhs_closed = 0.0;
  double rhs_closed = 0.0;
  double gap = 0.0;  // |lhs_closed - rhs_closed|
};

// Closed forms of both sides for linear F(S) = sum_x a_x S_x: on the left,
// E[l_tau(x)] is the Green row G(0, x) and E[(Z_x+s)^2/2] = (G(x,x)+s^2)/2;
// on the right the Gaussian third moment E[Z_x^2 Z_0] vanishes and the cross
// term E[Z_x Z_0] = G(x, 0) reproduces the walk term.
LinearCheckReport analytic_linear_check(int d, int R, double lambda, double s,
                                        const std::vector<double>& weights);

}  // namespace silt
