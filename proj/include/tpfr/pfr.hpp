#pragma once

// From a set of small doubling to a verified cover by cosets of a subgroup.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "tpfr/decrement.hpp"
#include "tpfr/dist.hpp"
#include "tpfr/group.hpp"

namespace tpfr {

/// |A + A| / |A|.
mpq_class doubling(const GroupSpec& g, const ElementSet& a);

struct Bridge {
  Dist uniform;
  /// d[U_A; -U_A] = H(U_A + U_A') - log |A|.
  double distance = 0.0;
  /// log K.
  double log_k = 0.0;
};

/// Throws if the distance exceeds log K beyond 1e-9 (Jensen rules this out).

Bridge entropic_bridge(const GroupSpec& g, const ElementSet& a);

struct Translate {
  Code x0 = 0;
  /// |A cap (H + x0)| / |H|.
  mpq_class density;
};

/// x0 maximizing |A cap (H + x0)|, the smallest code among ties.
Translate best_translate(const GroupSpec& g, const ElementSet& a, const Subgroup& h);

/// Greedy maximal family of pairwise disjoint translates a + B, a in A,
/// scanning A in code order. A is covered by T + (B - B).
std::vector<Code> ruzsa_cover(const GroupSpec& g, const ElementSet& a, const ElementSet& b);

/// H itself if |H| <= target, else a subgroup H' <= H with
/// target / m < |H'| <= target reached through prime-index steps. Each step
/// takes the largest prime p dividing the current order and the
/// lexicographically least subgroup of index p.
Subgroup subdivide(const Subgroup& h, std::uint64_t target);

struct CosetCover {
  Subgroup subgroup;
  /// Smallest element of each coset; sorted, distinct cosets.
  std::vector<Code> translates;
  mpq_class k;
  std::int64_t ell = 0;
};

/// Least l >= 1 with H inside lA - lA, or -1 if none.
std::int64_t least_difference_dilate(const GroupSpec& g, const ElementSet& a, const ElementSet& h);

struct PfrConfig {
  DecrementConfig decrement;
  /// C in the reported comparison count <= (2K)^(C m^3).
  double count_exponent = 12.0;
};

struct PfrResult {
  CosetCover cover;
  /// A was translated by -shift so that it contains 0.
  Code shift = 0;
  Bridge bridge;
  /// Subgroup found by the decrement, before subdivision.
  Subgroup found;
  Translate translate;
  std::vector<Code> ruzsa_translates;
  std::int64_t ell_bound = 0;
  /// log of (2K)^(C m^3), and whether the cover count is below it.
  double log_count_bound = 0.0;
  bool count_within_bound = false;
  MinimizeResult run;
};

PfrResult pfr_cover(const GroupSpec& g, const ElementSet& a, const PfrConfig& cfg = {});

struct CoverCheck {
  std::string name;
  bool pass = false;
  /// Soft checks are reported but do not fail verification.
  bool hard = true;
  std::string detail;
};

struct CoverReport {
  std::vector<CoverCheck> checks;
  /// Fewest cosets of any subgroup of size <= |A| that cover A, when the
  /// group is small enough to enumerate its subgroups.
  std::optional<std::size_t> optimal_count;
  bool pass() const;
};

CoverReport verify_cover(const GroupSpec& g, const ElementSet& a, const CosetCover& cover);

}  // namespace tpfr
