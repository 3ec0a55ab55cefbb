#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "siltlab/experiments.hpp"

namespace {

using silt::ExperimentConfig;
using silt::ExperimentKind;

// Applies a JSON config file onto cfg.  The file must name its experiment and
// it must agree with the invoked subcommand; unknown keys are rejected so a
// typo cannot silently fall back to a default.
void apply_config_file(ExperimentConfig& cfg, const std::string& path,
                       ExperimentKind expected) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

  if (!j.contains("experiment"))
    throw std::invalid_argument("config is missing the 'experiment' key");

  auto want_number = [&](const char* k) {
    if (!j.at(k).is_number())
      throw std::invalid_argument(std::string("config key '") + k + "' must be a number");
    return j.at(k).get<double>();
  };
  auto want_int = [&](const char* k) {
    if (!j.at(k).is_number_integer())
      throw std::invalid_argument(std::string("config key '") + k + "' must be an integer");
    return j.at(k).get<int>();
  };
  auto want_string = [&](const char* k) {
    if (!j.at(k).is_string())
      throw std::invalid_argument(std::string("config key '") + k + "' must be a string");
    return j.at(k).get<std::string>();
  };

  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key == "experiment") {
      const ExperimentKind got = silt::parse_experiment_kind(want_string("experiment"));
      if (got != expected)
        throw std::invalid_argument("config experiment '" + want_string("experiment") +
                                    "' does not match the invoked subcommand");
    } else if (key == "d") cfg.d = want_int("d");
    else if (key == "q") cfg.q = want_number("q");
    else if (key == "T") cfg.T = want_number("T");
    else if (key == "b_T") cfg.b_T = want_number("b_T");
    else if (key == "theta") cfg.theta = want_number("theta");
    else if (key == "alpha") cfg.alpha = want_number("alpha");
    else if (key == "A") cfg.A = want_number("A");
    else if (key == "R") cfg.R = want_int("R");
    else if (key == "lambda") cfg.lambda = want_number("lambda");
    else if (key == "preset") cfg.preset = want_string("preset");
    else if (key == "s") cfg.s = want_number("s");
    else if (key == "a_weight") cfg.a_weight = want_number("a_weight");
    else if (key == "box_L") cfg.box_L = want_int("box_L");
    else if (key == "L") cfg.L = want_int("L");
    else if (key == "solver") cfg.solver = want_string("solver");
    else if (key == "max_iters") cfg.max_iters = want_int("max_iters");
    else if (key == "n") {
      if (!j.at("n").is_number_integer())
        throw std::invalid_argument("config key 'n' must be an integer");
      cfg.n = j.at("n").get<std::int64_t>();
    } else if (key == "seed") {
      if (!j.at("seed").is_number_integer() && !j.at("seed").is_number_unsigned())
        throw std::invalid_argument("config key 'seed' must be an integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
    } else if (key == "out") cfg.out_dir = want_string("out");
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and optimization laboratory for lattice intersection "
               "local times"};
  app.require_subcommand(1);

  // shared flag storage; exactly one subcommand parses, so no clashes
  ExperimentConfig flags;
  std::string config_path;

  struct SubSpec {
    const char* name;
    const char* help;
    ExperimentKind kind;
    const char* solver;  // forced solver for the variational flavors
  };
  const SubSpec specs[] = {
      {"tail", "naive tail probability of a large self-intersection",
       ExperimentKind::tail, nullptr},
      {"confine", "confinement lower bound on the tail probability",
       ExperimentKind::confinement, nullptr},
      {"expmoment", "exponential moment of I_T^{1/q}", ExperimentKind::exp_moment,
       nullptr},
      {"iso", "two-sided Monte Carlo check of the isomorphism identity",
       ExperimentKind::isomorphism, nullptr},
      {"rho", "variational constants rho1/rho2 and their duality product",
       ExperimentKind::variational, "rho1"},
      {"sobolev", "box-truncated critical embedding constant",
       ExperimentKind::variational, "sobolev"},
      {"green", "torus Green value along the lambda-to-zero schedule",
       ExperimentKind::green_convergence, nullptr},
  };

  for (const SubSpec& sp : specs) {
    CLI::App* sub = app.add_subcommand(sp.name, sp.help);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--d", flags.d, "lattice dimension");
    sub->add_option("--q", flags.q, "intersection exponent (0: critical d/(d-2))");
    sub->add_option("--T", flags.T, "time horizon");
    sub->add_option("--b_T", flags.b_T, "deviation scale");
    sub->add_option("--theta", flags.theta, "exponential-moment coefficient");
    sub->add_option("--alpha", flags.alpha, "kill-rate multiplier");
    sub->add_option("--A", flags.A, "volume multiplier (large-deviation preset)");
    sub->add_option("--R", flags.R, "torus side (0: preset-resolved)");
    sub->add_option("--lambda", flags.lambda, "kill rate (0: preset-resolved)");
    sub->add_option("--preset", flags.preset,
                    "scaling preset: critical | large_deviation | none");
    sub->add_option("--s", flags.s, "isomorphism shift");
    sub->add_option("--a_weight", flags.a_weight, "uniform functional weight");
    sub->add_option("--box_L", flags.box_L, "confinement box radius");
    sub->add_option("--L", flags.L, "box radius for the sobolev solver");
    sub->add_option("--max_iters", flags.max_iters,
                    "variational iteration cap (0: solver default)");
    sub->add_option("--n", flags.n, "replica count");
    sub->add_option("--seed", flags.seed, "64-bit master seed");
    sub->add_option("--out", flags.out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help exits clean; anything else is a config error
  }

  CLI::App* sub = app.get_subcommands().front();
  const SubSpec* spec = nullptr;
  for (const SubSpec& sp : specs)
    if (sub->get_name() == sp.name) spec = &sp;

  ExperimentConfig cfg;
  cfg.kind = spec->kind;
  if (spec->solver) cfg.solver = spec->solver;

  try {
    if (sub->count("--config")) apply_config_file(cfg, config_path, spec->kind);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  // explicit flags override the config file
  if (sub->count("--d")) cfg.d = flags.d;
  if (sub->count("--q")) cfg.q = flags.q;
  if (sub->count("--T")) cfg.T = flags.T;
  if (sub->count("--b_T")) cfg.b_T = flags.b_T;
  if (sub->count("--theta")) cfg.theta = flags.theta;
  if (sub->count("--alpha")) cfg.alpha = flags.alpha;
  if (sub->count("--A")) cfg.A = flags.A;
  if (sub->count("--R")) cfg.R = flags.R;
  if (sub->count("--lambda")) cfg.lambda = flags.lambda;
  if (sub->count("--preset")) cfg.preset = flags.preset;
  if (sub->count("--s")) cfg.s = flags.s;
  if (sub->count("--a_weight")) cfg.a_weight = flags.a_weight;
  if (sub->count("--box_L")) cfg.box_L = flags.box_L;
  if (sub->count("--L")) cfg.L = flags.L;
  if (sub->count("--max_iters")) cfg.max_iters = flags.max_iters;
  if (sub->count("--n")) cfg.n = flags.n;
  if (sub->count("--seed")) cfg.seed = flags.seed;
  if (sub->count("--out")) cfg.out_dir = flags.out_dir;

  return silt::run_experiment(cfg);
}
