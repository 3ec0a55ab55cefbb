#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace silt {

// Derivation of independent substreams: every Monte Carlo replica draws from
// its own generator keyed by (seed, salt, index), so results do not depend on
// scheduling or on how replicas are split across workers.  The key is whitened
// through splitmix64 before seeding the engine; mt19937_64 itself is fully
// specified by the standard, and all variate transforms below are explicit,
// so a (seed, salt, index) triple pins the byte-exact draw sequence.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// stream salts keep draws for different purposes out of each other's streams
enum class StreamSalt : std::uint64_t {
  walk = 0x77616c6bULL,        // trajectory simulation
  field = 0x6669656cULL,       // gaussian field synthesis
  lhs = 0x6c687345ULL,         // isomorphism left-hand side
  rhs = 0x72687345ULL,         // isomorphism right-hand side
  generic = 0x67656e65ULL,
};

// Whitened engine seed for the (seed, salt, index) triple.  Also usable to
// derive a per-replica master seed that child streams re-salt independently.
inline std::uint64_t derive_seed(std::uint64_t seed, StreamSalt salt, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(salt)) ^ index);
}

class Rng {
 public:
  Rng(std::uint64_t seed, StreamSalt salt, std::uint64_t index)
      : eng_(derive_seed(seed, salt, index)) {}

  explicit Rng(std::uint64_t seed) : Rng(seed, StreamSalt::generic, 0) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [2^-53, 1]; never 0, so log(u) is always finite
  double u01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Exp(rate)
  double exponential(double rate) { return -std::log(u01()) / rate; }

  // standard normal, Box-Muller with cached second variate
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(u01()));
    double a = 6.283185307179586476925286766559 * u01();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // uniform integer in {0, 1, ..., n-1} by rejection (unbiased)
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace silt
