#pragma once

// Seeded generation of small exact laws. The bounded-integer helper is
// implemented here rather than with std::uniform_int_distribution so that
// streams are identical across standard libraries.

#include <cstdint>
#include <random>

#include "tpfr/dist.hpp"

namespace tpfr {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for trial `index` of a run with master seed `seed`.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  bool coin() { return uniform(0, 1) == 1; }

 private:
  std::mt19937_64 engine_;
};

/// Random law on `g`: random support, positive integer weights summing to at
/// most `max_denominator`, so every probability has denominator <= that.
Dist random_dist(Rng& rng, const GroupSpec& g, std::int64_t max_denominator = 64);

/// Random joint law on the product of `groups`, same weight scheme.
JointDist random_joint(Rng& rng, const std::vector<GroupSpec>& groups,
                       std::int64_t max_denominator = 64);

}  // namespace tpfr
