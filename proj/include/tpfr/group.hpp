#pragma once

// Finite abelian groups Z/m_1 x ... x Z/m_k with elements stored as
// mixed-radix codes. The first cyclic factor is the most significant digit,
// so numeric order on codes is lexicographic order on residue vectors.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tpfr {

using Code = std::uint64_t;

/// Sorted, duplicate-free list of element codes.
using ElementSet = std::vector<Code>;

/// Default bound on |G| for any group (including flattened product spaces
/// used by joint distributions).
inline constexpr std::uint64_t kDefaultGroupCap = std::uint64_t{1} << 56;

/// Default bound on |G| for exhaustive subgroup enumeration.
inline constexpr std::uint64_t kDefaultSubgroupCap = 64;

struct Element {
  std::vector<std::int64_t> residues;

  friend auto operator<=>(const Element&, const Element&) = default;
  friend bool operator==(const Element&, const Element&) = default;
};

class GroupSpec {
 public:
  /// The trivial group.
  GroupSpec() = default;
  explicit GroupSpec(std::vector<std::int64_t> orders,
                     std::uint64_t max_size = kDefaultGroupCap);

  const std::vector<std::int64_t>& orders() const noexcept { return orders_; }
  std::size_t rank() const noexcept { return orders_.size(); }
  std::uint64_t size() const noexcept { return size_; }
  /// lcm of the cyclic orders (1 for the trivial group).
  std::int64_t torsion() const noexcept { return torsion_; }

  Code encode(const Element& x) const;
  Element decode(Code c) const;
  std::int64_t residue(Code c, std::size_t i) const noexcept {
    return static_cast<std::int64_t>((c / stride_[i]) % static_cast<Code>(orders_[i]));
  }
  bool contains(const Element& x) const noexcept;

  Code zero() const noexcept { return 0; }
  Code add(Code a, Code b) const noexcept;
  Code sub(Code a, Code b) const noexcept;
  Code neg(Code a) const noexcept;
  /// c * a, with c any integer (reduced modulo the torsion).
  Code scale(std::int64_t c, Code a) const noexcept;

  /// Direct product: orders of `*this` followed by orders of `other`.
  GroupSpec times(const GroupSpec& other) const;
  GroupSpec power(std::size_t n) const;

  std::string to_string() const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) noexcept {
    return a.orders_ == b.orders_;
  }

 private:
  std::vector<std::int64_t> orders_;
  std::vector<Code> stride_;
  std::uint64_t size_ = 1;
  std::int64_t torsion_ = 1;
};

// Element-level arithmetic. All throw ShapeError if an element does not
// belong to `g`.
Element add(const GroupSpec& g, const Element& a, const Element& b);
Element neg(const GroupSpec& g, const Element& a);
Element scalar_mul(const GroupSpec& g, std::int64_t c, const Element& a);

/// Homomorphism between products of cyclic groups given by an integer
/// matrix acting on residues modulo the target orders.
class LinearMap {
 public:
  /// `matrix` has one row per target factor and one column per source
  /// factor. Throws ShapeError when the matrix does not define a
  /// homomorphism, i.e. when some source generator of order m_s is sent to
  /// an element whose order does not divide m_s.
  LinearMap(GroupSpec source, GroupSpec target,
            std::vector<std::vector<std::int64_t>> matrix);

  static LinearMap identity(const GroupSpec& g);
  static LinearMap zero(const GroupSpec& source, const GroupSpec& target);
  /// Multiplication by an integer on a single group.
  static LinearMap scalar(const GroupSpec& g, std::int64_t c);
  /// Projection of `source` onto its cyclic factors [first, first + count).
  static LinearMap projection(const GroupSpec& source, std::size_t first,
                              std::size_t count);
  /// x -> (f_1(x), ..., f_r(x)) into the product of the parts' targets.
  static LinearMap stacked(const GroupSpec& source, std::span<const LinearMap> parts);

  const GroupSpec& source() const noexcept { return source_; }
  const GroupSpec& target() const noexcept { return target_; }
  const std::vector<std::vector<std::int64_t>>& matrix() const noexcept { return matrix_; }

  Code apply(Code x) const;
  Element apply(const Element& x) const;

  /// (*this) o inner.
  LinearMap after(const LinearMap& inner) const;

 private:
  GroupSpec source_;
  GroupSpec target_;
  std::vector<std::vector<std::int64_t>> matrix_;
};

class Subgroup {
 public:
  /// Validates closure; throws ShapeError if `elements` is not a subgroup.
  Subgroup(GroupSpec parent, ElementSet elements);

  static Subgroup trivial(const GroupSpec& g);
  static Subgroup whole(const GroupSpec& g);

  const GroupSpec& parent() const noexcept { return parent_; }
  const ElementSet& elements() const noexcept { return elements_; }
  std::size_t size() const noexcept { return elements_.size(); }
  bool contains(Code x) const;
  bool is_subset_of(const ElementSet& s) const;

  friend bool operator==(const Subgroup& a, const Subgroup& b) {
    return a.parent_ == b.parent_ && a.elements_ == b.elements_;
  }

 private:
  GroupSpec parent_;
  ElementSet elements_;
};

/// True iff `s` contains 0 and is closed under addition and negation.
bool is_subgroup(const GroupSpec& g, const ElementSet& s);

struct Coset {
  Subgroup subgroup;
  /// Lexicographically least member.
  Code representative;

  ElementSet elements() const;
  friend bool operator==(const Coset& a, const Coset& b) {
    return a.subgroup == b.subgroup && a.representative == b.representative;
  }
};

/// Least subgroup containing `gens`. Throws CapExceeded if the closure grows
/// beyond `max_elements`.
Subgroup generated_subgroup(const GroupSpec& g, std::span<const Code> gens,
                            std::uint64_t max_elements = kDefaultGroupCap);

/// Every subgroup exactly once, sorted by size and then by element list.
/// Throws CapExceeded("subgroup-enumeration") when |G| > cap.
std::vector<Subgroup> enumerate_subgroups(const GroupSpec& g,
                                          std::uint64_t cap = kDefaultSubgroupCap);

enum class Sign { Plus, Minus };

ElementSet make_set(std::vector<Code> codes);
ElementSet negate_set(const GroupSpec& g, const ElementSet& a);
ElementSet sumset(const GroupSpec& g, const ElementSet& a, const ElementSet& b,
                  Sign sign = Sign::Plus);
/// l-fold sumset A + ... + A for l >= 1.
ElementSet dilate(const GroupSpec& g, const ElementSet& a, std::int64_t l);
ElementSet translate(const GroupSpec& g, const ElementSet& a, Code t);

std::vector<Coset> cosets_of(const GroupSpec& g, const Subgroup& h);
Coset coset_of(const GroupSpec& g, const Subgroup& h, Code x);

}  // namespace tpfr
