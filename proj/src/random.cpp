#include "tpfr/random.hpp"

#include <algorithm>
#include <numeric>

namespace tpfr {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ index);
}

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

namespace {

Pmf random_pmf(Rng& rng, std::uint64_t space, std::int64_t max_denominator) {
  const auto cap = static_cast<std::int64_t>(
      std::min<std::uint64_t>(space, static_cast<std::uint64_t>(max_denominator)));
  const std::int64_t k = rng.uniform(1, cap);
  // Partial Fisher-Yates over the code space picks k distinct atoms.
  std::vector<Code> codes(space);
  std::iota(codes.begin(), codes.end(), Code{0});
  for (std::int64_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform(i, static_cast<std::int64_t>(space) - 1));
    std::swap(codes[static_cast<std::size_t>(i)], codes[j]);
  }
  // Weights: one each, then distribute a random amount of extra mass.
  std::vector<std::int64_t> w(static_cast<std::size_t>(k), 1);
  const std::int64_t extra = rng.uniform(0, max_denominator - k);
  for (std::int64_t e = 0; e < extra; ++e) ++w[static_cast<std::size_t>(rng.uniform(0, k - 1))];
  std::vector<Atom> atoms;
  for (std::int64_t i = 0; i < k; ++i) {
    atoms.push_back(Atom{codes[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(i)]});
  }
  return Pmf::from_weights(std::move(atoms));
}

}  // namespace

Dist random_dist(Rng& rng, const GroupSpec& g, std::int64_t max_denominator) {
  return Dist(g, random_pmf(rng, g.size(), max_denominator));
}

JointDist random_joint(Rng& rng, const std::vector<GroupSpec>& groups,
                       std::int64_t max_denominator) {
  Code space = 1;
  for (const auto& g : groups) space *= g.size();
  return JointDist(groups, random_pmf(rng, space, max_denominator));
}

}  // namespace tpfr
