#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "siltlab/rng.hpp"

namespace silt {

// Continuous-time simple random walk: from any site, each of the 2d neighbor
// moves fires at rate 1, so holding times are Exp(2d) and the jump target is
// uniform over the neighbors.  Walks start at the origin.

constexpr int kMaxDim = 8;

enum class Geometry { lattice, torus };

struct WalkConfig {
  int d = 3;
  std::optional<double> horizon_T;    // absent: run until the kill clock fires
  std::optional<int> torus_R;         // present: occupation recorded modulo R
  std::optional<double> stop_rate;    // present: killed at an independent Exp(rate),
                                      // capped at horizon_T when both are given
  std::uint64_t seed = 0;
};

void validate(const WalkConfig& cfg);

struct SiteKey {
  std::array<std::int32_t, kMaxDim> c{};
  bool operator==(const SiteKey&) const = default;
};

struct SiteKeyHash {
  std::size_t operator()(const SiteKey& k) const {
    std::uint64_t h = 0x51a7b2c9d3e5f011ULL;
    for (int j = 0; j < kMaxDim; ++j)
      h = splitmix64(h ^ static_cast<std::uint32_t>(k.c[j]));
    return static_cast<std::size_t>(h);
  }
};

// Occupation-time field of one trajectory.  Sparse by construction: sites the
// walk never touched are absent, and zero-mass entries are never stored.
class LocalTimeField {
 public:
  LocalTimeField(int d, Geometry geom, int torus_R)
      : d_(d), geom_(geom), torus_R_(geom == Geometry::torus ? torus_R : 0) {
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("LocalTimeField: d out of range");
    if (geom == Geometry::torus && torus_R < 1)
      throw std::invalid_argument("LocalTimeField: torus_R must be >= 1");
  }

  int dim() const { return d_; }
  Geometry geometry() const { return geom_; }
  int torus_R() const { return torus_R_; }
  double elapsed() const { return elapsed_; }
  std::uint64_t jump_count() const { return jumps_; }
  std::size_t support_size() const { return mass_.size(); }

  // torus coordinates are canonicalized into [0, R); lattice ones kept as-is
  SiteKey canonical(const std::int64_t* site) const {
    SiteKey k;
    for (int j = 0; j < d_; ++j) {
      std::int64_t c = site[j];
      if (geom_ == Geometry::torus) {
        c %= torus_R_;
        if (c < 0) c += torus_R_;
      }
      if (c < INT32_MIN || c > INT32_MAX)
        throw std::overflow_error("LocalTimeField: coordinate exceeds 32-bit range");
      k.c[j] = static_cast<std::int32_t>(c);
    }
    return k;
  }

  void deposit(const std::int64_t* site, double dt) {
    if (dt < 0.0) throw std::invalid_argument("LocalTimeField: negative occupation increment");
    if (dt == 0.0) return;
    mass_[canonical(site)] += dt;
  }

  double mass_at(const std::int64_t* site) const {
    auto it = mass_.find(canonical(site));
    return it == mass_.end() ? 0.0 : it->second;
  }

  // compensated (Neumaier) total of the stored masses
  double mass_total() const {
    double s = 0.0, comp = 0.0;
    for (const auto& [k, v] : mass_) {
      double t = s + v;
      comp += (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
      s = t;
    }
    return s + comp;
  }

  template <class F>
  void for_each(F&& f) const {
    for (const auto& [k, v] : mass_) f(k, v);
  }

  void set_elapsed(double t) { elapsed_ = t; }
  void set_jump_count(std::uint64_t n) { jumps_ = n; }

 private:
  int d_;
  Geometry geom_;
  int torus_R_;
  double elapsed_ = 0.0;
  std::uint64_t jumps_ = 0;
  std::unordered_map<SiteKey, double, SiteKeyHash> mass_;
};

// Simulate one trajectory and return its occupation field.
// Draw order per replica (pins the byte-exact stream): kill clock first when
// stop_rate is set, then alternating (holding time, neighbor index) pairs.
LocalTimeField simulate_local_times(const WalkConfig& cfg);

// Rejection sampler: simulate on Z^d, discard the trajectory as soon as it
// leaves the sup-norm box [-L, L]^d.  Empty optional = rejected.
std::optional<LocalTimeField> confined_sample(const WalkConfig& cfg, int box_radius);

}  // namespace silt
