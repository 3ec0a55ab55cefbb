#include "siltlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "siltlab/intersection.hpp"
#include "siltlab/isomorphism.hpp"
#include "siltlab/lattice_walk.hpp"
#include "siltlab/torus_green.hpp"
#include "siltlab/variational.hpp"

namespace silt {
namespace {

double resolve_q(int d, double q) {
  if (q != 0.0) {
    if (!(q >= 1.0)) throw std::invalid_argument("exponent q must be >= 1");
    return q;
  }
  if (d < 3) throw std::invalid_argument("critical exponent d/(d-2) needs d >= 3");
  return static_cast<double>(d) / (d - 2);
}

// I_T = sum l^q; q = 1 short-circuits to the exact total mass
double self_intersection(const LocalTimeField& field, double q) {
  return q == 1.0 ? field.mass_total() : silt(field, q);
}

std::string fmt_params(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ' ';
    first = false;
    os << k << '=' << v;
  }
  return os.str();
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- summary writer: deterministic key order, floats at full precision ----

class JsonWriter {
 public:
  void open_object(const std::string& key = "") { emit_key(key); out_ += "{"; fresh_ = true; }
  void close_object() { out_ += "}"; fresh_ = false; }
  void field(const std::string& key, double v) { emit_key(key); out_ += fmt_num(v); }
  void field(const std::string& key, std::int64_t v) { emit_key(key); out_ += std::to_string(v); }
  void field(const std::string& key, int v) { field(key, static_cast<std::int64_t>(v)); }
  void field_u64(const std::string& key, std::uint64_t v) { emit_key(key); out_ += std::to_string(v); }
  void field(const std::string& key, bool v) { emit_key(key); out_ += v ? "true" : "false"; }
  void field(const std::string& key, const std::string& v) {
    emit_key(key);
    out_ += '"';
    for (char c : v) {
      if (c == '"' || c == '\\') out_ += '\\';
      out_ += c;
    }
    out_ += '"';
  }
  void null_field(const std::string& key) { emit_key(key); out_ += "null"; }
  template <class T>
  void array_field(const std::string& key, const std::vector<T>& vs) {
    emit_key(key);
    out_ += '[';
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (i) out_ += ',';
      if constexpr (std::is_floating_point_v<T>)
        out_ += fmt_num(vs[i]);
      else
        out_ += std::to_string(vs[i]);
    }
    out_ += ']';
  }

  const std::string& str() const { return out_; }

 private:
  void emit_key(const std::string& key) {
    if (!fresh_) out_ += ',';
    fresh_ = false;
    out_ += '\n';
    if (!key.empty()) {
      out_ += '"';
      out_ += key;
      out_ += "\":";
    }
  }

  std::string out_;
  bool fresh_ = true;
};

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path.string());
  f << body;
}

void write_replicas_csv(const std::filesystem::path& path,
                        const std::vector<double>& values) {
  std::string body = "replica_index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    body += std::to_string(i);
    body += ',';
    body += fmt_num(values[i]);
    body += '\n';
  }
  write_text(path, body);
}

MCEstimate binomial_estimate(std::int64_t hits, std::int64_t n, std::uint64_t seed,
                             std::string params) {
  MCEstimate e;
  e.mean = static_cast<double>(hits) / static_cast<double>(n);
  e.std_err = binomial_stderr(e.mean, n);
  e.n = n;
  e.seed = seed;
  e.params = std::move(params);
  return e;
}

}  // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "tail") return ExperimentKind::tail;
  if (name == "exp_moment") return ExperimentKind::exp_moment;
  if (name == "isomorphism") return ExperimentKind::isomorphism;
  if (name == "variational") return ExperimentKind::variational;
  if (name == "green_convergence") return ExperimentKind::green_convergence;
  if (name == "confinement") return ExperimentKind::confinement;
  throw std::invalid_argument(
      "unknown experiment kind '" + name +
      "'; valid kinds: tail, exp_moment, isomorphism, variational, "
      "green_convergence, confinement");
}

std::string experiment_kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::tail: return "tail";
    case ExperimentKind::exp_moment: return "exp_moment";
    case ExperimentKind::isomorphism: return "isomorphism";
    case ExperimentKind::variational: return "variational";
    case ExperimentKind::green_convergence: return "green_convergence";
    case ExperimentKind::confinement: return "confinement";
  }
  return "?";
}

ResolvedScaling resolve_scaling(const ExperimentConfig& cfg) {
  ResolvedScaling r;
  const double q = resolve_q(cfg.d, cfg.q);
  if (cfg.preset == "critical") {
    r.R = std::max<int>(1, static_cast<int>(std::llround(std::pow(cfg.T, 1.0 / cfg.d))));
    r.lambda = cfg.alpha * cfg.b_T / cfg.T;
  } else if (cfg.preset == "large_deviation") {
    r.R = std::max<int>(1, static_cast<int>(std::llround(std::pow(cfg.A * cfg.T, 1.0 / cfg.d))));
    r.lambda = cfg.alpha * std::pow(cfg.T, 1.0 / q) / cfg.T;
  } else if (cfg.preset == "none") {
    if (cfg.R < 1 || !(cfg.lambda > 0.0))
      throw std::invalid_argument("preset 'none' needs explicit R >= 1 and lambda > 0");
  } else {
    throw std::invalid_argument("unknown preset '" + cfg.preset +
                                "'; valid: critical, large_deviation, none");
  }
  if (cfg.R > 0) r.R = cfg.R;            // explicit values win over the preset
  if (cfg.lambda > 0.0) r.lambda = cfg.lambda;

  if (cfg.preset == "critical") {
    const double wrap = cfg.b_T * r.R * r.R / cfg.T;
    if (wrap < 1.0) {
      r.warning = true;
      r.note = "b_T R^2 / T = " + fmt_num(wrap) +
               " < 1: the walk may not wrap the torus at this scale";
    }
  }
  return r;
}

MCEstimate tail_probability(int d, double q, double T, double b_T, std::int64_t n,
                            std::uint64_t seed, std::vector<double>* replica_values) {
  q = resolve_q(d, q);
  if (!(T >= 0.0) || !(b_T > 0.0))
    throw std::invalid_argument("tail_probability: need T >= 0 and b_T > 0");
  if (n < 1000) throw std::invalid_argument("tail_probability: need n >= 1000");

  const double threshold = std::pow(b_T, q) * (1.0 - 1e-9);
  WalkConfig wcfg;
  wcfg.d = d;
  wcfg.horizon_T = T;

  std::int64_t hits = 0;
  if (replica_values) replica_values->reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    wcfg.seed = derive_seed(seed, StreamSalt::generic, static_cast<std::uint64_t>(i));
    const LocalTimeField field = simulate_local_times(wcfg);
    const bool hit = self_intersection(field, q) >= threshold;
    hits += hit;
    if (replica_values) replica_values->push_back(hit ? 1.0 : 0.0);
  }
  return binomial_estimate(
      hits, n, seed,
      fmt_params({{"kind", "tail"}, {"d", std::to_string(d)}, {"q", fmt_num(q)},
                  {"T", fmt_num(T)}, {"b_T", fmt_num(b_T)}, {"n", std::to_string(n)}}));
}

MCEstimate confinement_lower_bound(int d, double q, double T, double b_T,
                                   int box_L, std::int64_t n, std::uint64_t seed,
                                   std::vector<double>* replica_values) {
  q = resolve_q(d, q);
  if (!(T >= 0.0) || !(b_T > 0.0))
    throw std::invalid_argument("confinement_lower_bound: need T >= 0 and b_T > 0");
  if (box_L < 0) throw std::invalid_argument("confinement_lower_bound: box_L >= 0");
  if (n < 1000) throw std::invalid_argument("confinement_lower_bound: need n >= 1000");

  const double threshold = std::pow(b_T, q) * (1.0 - 1e-9);
  WalkConfig wcfg;
  wcfg.d = d;
  wcfg.horizon_T = T;

  std::int64_t hits = 0;
  if (replica_values) replica_values->reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    wcfg.seed = derive_seed(seed, StreamSalt::generic, static_cast<std::uint64_t>(i));
    const auto field = confined_sample(wcfg, box_L);
    const bool hit = field && self_intersection(*field, q) >= threshold;
    hits += hit;
    if (replica_values) replica_values->push_back(hit ? 1.0 : 0.0);
  }
  return binomial_estimate(
      hits, n, seed,
      fmt_params({{"kind", "confinement"}, {"d", std::to_string(d)}, {"q", fmt_num(q)},
                  {"T", fmt_num(T)}, {"b_T", fmt_num(b_T)},
                  {"box_L", std::to_string(box_L)}, {"n", std::to_string(n)}}));
}

ExpMomentResult exp_moment(int d, double q, double T, double theta, std::int64_t n,
                           std::uint64_t seed, std::vector<double>* replica_values) {
  q = resolve_q(d, q);
  if (!(theta >= 0.0)) throw std::invalid_argument("exp_moment: need theta >= 0");
  if (!(T >= 0.0)) throw std::invalid_argument("exp_moment: need T >= 0");
  if (n < 1) throw std::invalid_argument("exp_moment: need n >= 1");

  WalkConfig wcfg;
  wcfg.d = d;
  wcfg.horizon_T = T;

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    wcfg.seed = derive_seed(seed, StreamSalt::generic, static_cast<std::uint64_t>(i));
    const LocalTimeField field = simulate_local_times(wcfg);
    values.push_back(std::exp(theta * field_lq_norm(field, q)));
  }

  ExpMomentResult out;
  out.estimate = mc_from_values(
      values, seed,
      fmt_params({{"kind", "exp_moment"}, {"d", std::to_string(d)}, {"q", fmt_num(q)},
                  {"T", fmt_num(T)}, {"theta", fmt_num(theta)}, {"n", std::to_string(n)}}));

  // top-1% mass share; if one tail percentile dominates the mean, the
  // empirical moment is not trustworthy (theta may exceed the critical value)
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const std::size_t top = std::max<std::size_t>(1, sorted.size() / 100);
  double top_sum = 0.0, total = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i];
    if (i < top) top_sum += sorted[i];
  }
  out.heavy_tail_warning = top_sum > 0.5 * total;

  if (replica_values) *replica_values = std::move(values);
  return out;
}

std::vector<GreenScheduleRow> green_convergence_schedule(int d) {
  std::vector<GreenScheduleRow> rows;
  const std::int64_t origin[kMaxDim] = {0};
  for (int i = 0; i < 4; ++i) {
    const int R = 8 << i;
    const double lambda = 2.0 / (static_cast<double>(R) * R);
    const SpectralKernel kernel = build_kernel(d, R, lambda);
    rows.push_back({R, lambda, green_value(kernel, origin, origin)});
  }
  return rows;
}

namespace {

int dispatch(const ExperimentConfig& cfg, JsonWriter& json,
             std::vector<double>& csv_values) {
  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;

  json.open_object();
  json.field("experiment", experiment_kind_name(cfg.kind));

  switch (cfg.kind) {
    case ExperimentKind::tail: {
      const MCEstimate e =
          tail_probability(cfg.d, cfg.q, cfg.T, cfg.b_T, cfg.n, cfg.seed, &csv_values);
      json.field("params", e.params);
      json.field("estimate", e.mean);
      json.field("stderr", e.std_err);
      json.field("n", e.n);
      json.field_u64("seed", e.seed);
      if (e.mean > 0.0) {
        json.field("log_rate_per_b", std::log(e.mean) / cfg.b_T);
      } else {
        json.null_field("log_rate_per_b");  // undefined at zero counts
        json.field("zero_count_upper_95", clopper_pearson_upper_zero(e.n));
      }
      break;
    }
    case ExperimentKind::confinement: {
      const MCEstimate e = confinement_lower_bound(cfg.d, cfg.q, cfg.T, cfg.b_T,
                                                   cfg.box_L, cfg.n, cfg.seed,
                                                   &csv_values);
      json.field("params", e.params);
      json.field("estimate", e.mean);
      json.field("stderr", e.std_err);
      json.field("n", e.n);
      json.field_u64("seed", e.seed);
      if (e.mean == 0.0)
        json.field("zero_count_upper_95", clopper_pearson_upper_zero(e.n));
      break;
    }
    case ExperimentKind::exp_moment: {
      const ExpMomentResult r =
          exp_moment(cfg.d, cfg.q, cfg.T, cfg.theta, cfg.n, cfg.seed, &csv_values);
      json.field("params", r.estimate.params);
      json.field("estimate", r.estimate.mean);
      json.field("stderr", r.estimate.std_err);
      json.field("n", r.estimate.n);
      json.field_u64("seed", r.estimate.seed);
      json.field("heavy_tail_warning", r.heavy_tail_warning);
      if (r.heavy_tail_warning)
        std::cerr << "warning: top 1% of replicas carries most of the mean; "
                     "the exponential moment may be infinite at this theta\n";
      break;
    }
    case ExperimentKind::isomorphism: {
      const ResolvedScaling sc = resolve_scaling(cfg);
      std::int64_t sites = 1;
      for (int j = 0; j < cfg.d; ++j) sites *= sc.R;
      const TestFunctional F = TestFunctional::exponential(
          std::vector<double>(static_cast<std::size_t>(sites), cfg.a_weight));
      // lhs replicas occupy CSV rows 0..n-1, rhs replicas rows n..2n-1
      std::vector<double> rhs_values;
      const MCEstimate lhs = lhs_estimate(F, cfg.d, sc.R, sc.lambda, cfg.s, cfg.n,
                                          cfg.seed, &csv_values);
      const MCEstimate rhs = rhs_estimate(F, cfg.d, sc.R, sc.lambda, cfg.s, cfg.n,
                                          cfg.seed, false, &rhs_values);
      csv_values.insert(csv_values.end(), rhs_values.begin(), rhs_values.end());
      json.field("params", fmt_params({{"d", std::to_string(cfg.d)},
                                       {"R", std::to_string(sc.R)},
                                       {"lambda", fmt_num(sc.lambda)},
                                       {"s", fmt_num(cfg.s)},
                                       {"a", fmt_num(cfg.a_weight)},
                                       {"n", std::to_string(cfg.n)}}));
      json.field("lhs_mean", lhs.mean);
      json.field("lhs_stderr", lhs.std_err);
      json.field("rhs_mean", rhs.mean);
      json.field("rhs_stderr", rhs.std_err);
      const double combined =
          std::sqrt(lhs.std_err * lhs.std_err + rhs.std_err * rhs.std_err);
      json.field("gap", std::fabs(lhs.mean - rhs.mean));
      json.field("combined_stderr", combined);
      json.field("n", cfg.n);
      json.field_u64("seed", cfg.seed);
      break;
    }
    case ExperimentKind::variational: {
      SolverOptions opts;
      if (cfg.max_iters > 0) opts.max_iters = cfg.max_iters;
      if (cfg.solver == "sobolev") {
        const VariationalSolution sol = sobolev_constant(cfg.d, cfg.L, opts);
        json.field("params", fmt_params({{"d", std::to_string(cfg.d)},
                                         {"L", std::to_string(cfg.L)}}));
        json.field("estimate", sol.value);
        json.field("lagrange_residual", sol.lagrange_residual);
        json.field("iterations", sol.iterations);
        json.field("converged", sol.converged);
        if (!sol.converged) code = 3;
      } else if (cfg.solver == "rho1") {
        const ResolvedScaling sc = resolve_scaling(cfg);
        const double q = resolve_q(cfg.d, cfg.q);
        const VariationalSolution r1 = rho1(cfg.d, sc.R, sc.lambda, q, opts);
        const VariationalSolution r2 = rho2(cfg.d, sc.R, sc.lambda, q, opts);
        json.field("params", fmt_params({{"d", std::to_string(cfg.d)},
                                         {"R", std::to_string(sc.R)},
                                         {"lambda", fmt_num(sc.lambda)},
                                         {"q", fmt_num(q)}}));
        json.field("estimate", r1.value);
        json.field("lagrange_residual", r1.lagrange_residual);
        json.field("iterations", r1.iterations);
        json.field("converged", r1.converged);
        json.field("rho2", r2.value);
        json.field("rho2_converged", r2.converged);
        json.field("duality_product", r1.value * r2.value);
        if (!r1.converged || !r2.converged) code = 3;
      } else {
        throw std::invalid_argument("unknown solver '" + cfg.solver +
                                    "'; valid: rho1, sobolev");
      }
      break;
    }
    case ExperimentKind::green_convergence: {
      const std::vector<GreenScheduleRow> rows = green_convergence_schedule(cfg.d);
      std::vector<int> Rs;
      std::vector<double> lambdas, values;
      bool monotone = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        Rs.push_back(rows[i].R);
        lambdas.push_back(rows[i].lambda);
        values.push_back(rows[i].green00);
        if (i > 0 && !(rows[i].green00 < rows[i - 1].green00)) monotone = false;
        csv_values.push_back(rows[i].green00);
      }
      json.field("params", fmt_params({{"d", std::to_string(cfg.d)}}));
      json.array_field("R", Rs);
      json.array_field("lambda", lambdas);
      json.array_field("green00", values);
      json.field("monotone_decreasing", monotone);
      break;
    }
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json.field("wall_time_seconds", wall);
  json.close_object();
  return code;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  try {
    std::filesystem::create_directories(cfg.out_dir);

    JsonWriter json;
    std::vector<double> csv_values;
    const int code = dispatch(cfg, json, csv_values);

    write_text(std::filesystem::path(cfg.out_dir) / "summary.json",
               json.str() + "\n");
    write_replicas_csv(std::filesystem::path(cfg.out_dir) / "replicas.csv",
                       csv_values);
    return code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace silt
