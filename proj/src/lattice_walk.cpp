#include "siltlab/lattice_walk.hpp"

#include <cmath>
#include <limits>

namespace silt {

void validate(const WalkConfig& cfg) {
  if (cfg.d < 1) throw std::invalid_argument("WalkConfig: d must be >= 1");
  if (cfg.d > kMaxDim) throw std::invalid_argument("WalkConfig: d exceeds supported maximum (8)");
  if (cfg.horizon_T) {
    if (!(*cfg.horizon_T >= 0.0) || !std::isfinite(*cfg.horizon_T))
      throw std::invalid_argument("WalkConfig: horizon_T must be finite and >= 0");
  }
  if (cfg.stop_rate) {
    if (!(*cfg.stop_rate > 0.0) || !std::isfinite(*cfg.stop_rate))
      throw std::invalid_argument("WalkConfig: stop_rate must be finite and > 0");
  }
  if (!cfg.horizon_T && !cfg.stop_rate)
    throw std::invalid_argument("WalkConfig: need horizon_T or stop_rate, otherwise the walk never stops");
  if (cfg.torus_R && *cfg.torus_R < 1)
    throw std::invalid_argument("WalkConfig: torus_R must be >= 1");
}

namespace {

// shared core: runs the walk, optionally aborting once it leaves [-L, L]^d
std::optional<LocalTimeField> run_walk(const WalkConfig& cfg, const int* box_radius) {
  validate(cfg);
  const int d = cfg.d;
  const double jump_rate = 2.0 * d;

  Rng rng(cfg.seed, StreamSalt::walk, 0);

  double stop = cfg.horizon_T ? *cfg.horizon_T : std::numeric_limits<double>::infinity();
  if (cfg.stop_rate) stop = std::min(stop, rng.exponential(*cfg.stop_rate));

  LocalTimeField field(d, cfg.torus_R ? Geometry::torus : Geometry::lattice,
                       cfg.torus_R.value_or(0));

  std::int64_t pos[kMaxDim] = {0};
  double t = 0.0;
  std::uint64_t jumps = 0;

  for (;;) {
    double dwell = rng.exponential(jump_rate);
    if (t + dwell >= stop) {
      field.deposit(pos, stop - t);
      break;
    }
    field.deposit(pos, dwell);
    t += dwell;
    std::uint64_t move = rng.below(2 * static_cast<std::uint64_t>(d));
    int axis = static_cast<int>(move >> 1);
    pos[axis] += (move & 1) ? 1 : -1;
    ++jumps;
    if (box_radius) {
      if (std::abs(pos[axis]) > *box_radius) return std::nullopt;
    }
  }

  field.set_elapsed(stop);
  field.set_jump_count(jumps);
  return field;
}

}  // namespace

LocalTimeField simulate_local_times(const WalkConfig& cfg) {
  return *run_walk(cfg, nullptr);
}

std::optional<LocalTimeField> confined_sample(const WalkConfig& cfg, int box_radius) {
  if (cfg.torus_R)
    throw std::invalid_argument("confined_sample: defined for walks on the full lattice only");
  if (box_radius < 0) throw std::invalid_argument("confined_sample: box_radius must be >= 0");
  return run_walk(cfg, &box_radius);
}

}  // namespace silt
