#pragma once

// Exact laws of group-valued random variables. A Pmf stores integer weights
// with P(code) = weight / total, reduced so that the weights are coprime;
// equal laws therefore have identical representations.

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tpfr/group.hpp"

namespace tpfr {

inline constexpr std::uint64_t kDefaultAtomCap = 10'000'000;

struct Atom {
  Code code;
  mpz_class weight;
};

class Pmf {
 public:
  static Pmf point(Code c);
  /// Merges duplicate codes, drops zero weights and reduces. Throws
  /// ShapeError if nothing positive remains or a weight is negative.
  static Pmf from_weights(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const mpz_class& total() const noexcept { return total_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  mpq_class prob(Code c) const;

  friend bool operator==(const Pmf& a, const Pmf& b);

 private:
  Pmf() = default;
  std::vector<Atom> atoms_;
  mpz_class total_;
};

class Dist {
 public:
  Dist(GroupSpec group, Pmf pmf);
  /// Probabilities must be positive and sum to exactly 1.
  static Dist from_probabilities(GroupSpec group,
                                 const std::vector<std::pair<Code, mpq_class>>& probs);

  const GroupSpec& group() const noexcept { return group_; }
  const Pmf& pmf() const noexcept { return pmf_; }
  mpq_class prob(Code c) const { return pmf_.prob(c); }
  ElementSet support() const;

  friend bool operator==(const Dist& a, const Dist& b) {
    return a.group_ == b.group_ && a.pmf_ == b.pmf_;
  }

 private:
  GroupSpec group_;
  Pmf pmf_;
};

/// Jointly independent members over a common group.
using RVTuple = std::vector<Dist>;

/// Common group of a nonempty tuple; throws ShapeError otherwise.
const GroupSpec& tuple_group(std::span<const Dist> t);

Dist uniform_on(const GroupSpec& g, const ElementSet& s);
Dist uniform_on(const Subgroup& h);
Dist point_mass(const GroupSpec& g, Code x);

/// Law of X ± Y for independent copies.
Dist convolve(const Dist& x, const Dist& y, Sign sign = Sign::Plus);
/// Law of the sum of independent copies of the members.
Dist convolve_all(std::span<const Dist> members);
Dist negate(const Dist& x);
Dist pushforward(const Dist& x, const LinearMap& map);

using Coords = std::vector<std::size_t>;

class JointDist {
 public:
  JointDist(std::vector<GroupSpec> coordinate_groups, Pmf pmf);
  static JointDist of(const Dist& d);

  const std::vector<GroupSpec>& coordinate_groups() const noexcept { return groups_; }
  std::size_t arity() const noexcept { return groups_.size(); }
  /// Product of the coordinate groups, first coordinate most significant.
  const GroupSpec& flat_group() const noexcept { return flat_; }
  const Pmf& pmf() const noexcept { return pmf_; }

  Code coordinate_code(Code flat, std::size_t i) const noexcept {
    return (flat / stride_[i]) % groups_[i].size();
  }
  Code join(std::span<const Code> parts) const;

  Dist flat() const { return Dist(flat_, pmf_); }
  Dist coordinate(std::size_t i) const;
  /// Law of the listed coordinates, in the listed order.
  JointDist marginal(std::span<const std::size_t> coords) const;
  /// Slice at coordinate `coord` = value, renormalized; that coordinate is
  /// removed. Throws NullEventError if the value has probability zero.
  JointDist condition(std::size_t coord, Code value) const;

  friend bool operator==(const JointDist& a, const JointDist& b) {
    return a.groups_ == b.groups_ && a.pmf_ == b.pmf_;
  }

 private:
  std::vector<GroupSpec> groups_;
  std::vector<Code> stride_;
  GroupSpec flat_;
  Pmf pmf_;
};

/// Joint law of two independent joints, coordinates of `a` first.
JointDist independent_product(const JointDist& a, const JointDist& b);

/// Joint law of (sum_k L_k^(1)(Y_k), ..., sum_k L_k^(r)(Y_k)) for
/// independent Y_k with the given laws. Each map sends its member's group
/// into the product of `blocks`. Built by sequential convolution of
/// pushforwards; throws CapExceeded("atoms") if an intermediate law has more
/// than `atom_cap` atoms.
JointDist lifted_joint(std::span<const Dist> members, std::span<const LinearMap> maps,
                       std::vector<GroupSpec> blocks,
                       std::uint64_t atom_cap = kDefaultAtomCap);

struct Slice {
  /// Value of the conditioning coordinates, as a code of their joint group.
  Code value;
  mpq_class prob;
  /// Conditional law of the target coordinates.
  JointDist law;
};

/// The conditional laws of `target` given each positive-probability value of
/// `given`, in increasing order of that value.
std::vector<Slice> slices(const JointDist& j, std::span<const std::size_t> target,
                          std::span<const std::size_t> given);

}  // namespace tpfr
