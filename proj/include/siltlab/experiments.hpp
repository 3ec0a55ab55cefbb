#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "siltlab/estimate.hpp"

namespace silt {

enum class ExperimentKind {
  tail,
  exp_moment,
  isomorphism,
  variational,
  green_convergence,
  confinement,
};

// "tail" | "exp_moment" | ... ; throws std::invalid_argument naming the valid
// kinds on anything else
ExperimentKind parse_experiment_kind(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::tail;
  int d = 3;
  double q = 0.0;     // 0 selects the critical exponent d/(d-2)
  double T = 1.0;
  double b_T = 1.0;
  double theta = 0.0;
  double alpha = 1.0;
  double A = 1.0;
  int R = 0;          // 0: resolved by the preset
  double lambda = 0.0;  // 0: resolved by the preset
  std::string preset = "critical";  // critical | large_deviation | none
  double s = 1.0;       // isomorphism shift
  double a_weight = 0.1;  // uniform exponential-functional weight
  int box_L = 0;        // confinement box radius
  int L = 20;           // box radius for the sobolev solver
  std::string solver = "rho1";  // rho1 | sobolev (variational kind)
  int max_iters = 0;    // variational iteration cap; 0 keeps the solver default
  std::int64_t n = 1000;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

struct ResolvedScaling {
  int R = 1;
  double lambda = 0.0;
  bool warning = false;   // critical preset with b_T R^2 / T < 1
  std::string note;
};

// Critical preset: R = round(T^{1/d}), lambda = alpha b_T / T; the walk should
// wrap the torus, so b_T R^2 / T < 1 draws a warning.  Large-deviation preset:
// lambda = alpha T^{1/q} / T, R^d = A T.  Explicit R / lambda values override.
ResolvedScaling resolve_scaling(const ExperimentConfig& cfg);

// Naive Monte Carlo frequency of the event { sum_x l_T(x)^q >= b_T^q } for
// the lattice walk run to horizon T.  The comparison uses a one-part-in-1e9
// relative guard so the boundary case I = b^q exactly counts as a hit.
MCEstimate tail_probability(int d, double q, double T, double b_T, std::int64_t n,
                            std::uint64_t seed,
                            std::vector<double>* replica_values = nullptr);

// Joint frequency of { stayed in [-L, L]^d } and { I >= b^q }: a lower bound
// on the tail probability up to Monte Carlo error, usable deep in the tail
// where the naive estimator sees nothing.
MCEstimate confinement_lower_bound(int d, double q, double T, double b_T,
                                   int box_L, std::int64_t n, std::uint64_t seed,
                                   std::vector<double>* replica_values = nullptr);

struct ExpMomentResult {
  MCEstimate estimate;
  // set when the top 1% of replicas carries more than half the sample mean:
  // the moment may be infinite and the point estimate meaningless
  bool heavy_tail_warning = false;
};

// E[exp(theta I_T^{1/q})] by plain Monte Carlo
ExpMomentResult exp_moment(int d, double q, double T, double theta, std::int64_t n,
                           std::uint64_t seed,
                           std::vector<double>* replica_values = nullptr);

struct GreenScheduleRow {
  int R = 0;
  double lambda = 0.0;
  double green00 = 0.0;
};

// R = 8, 16, 32, 64 with lambda = 2 / R^2: lambda decreases while lambda R^d
// grows, so green00 decreases toward the infinite-lattice value
std::vector<GreenScheduleRow> green_convergence_schedule(int d);

// Dispatch one experiment and write <out_dir>/summary.json plus
// <out_dir>/replicas.csv.  Returns the process exit code: 0 success, 2 bad
// configuration, 3 numeric failure (solver did not converge).
int run_experiment(const ExperimentConfig& cfg);

}  // namespace silt
