#include "tpfr/group.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "tpfr/errors.hpp"

namespace tpfr {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

void require_member(const GroupSpec& g, const Element& x) {
  if (!g.contains(x)) {
    throw ShapeError("element does not belong to " + g.to_string());
  }
}

}  // namespace

GroupSpec::GroupSpec(std::vector<std::int64_t> orders, std::uint64_t max_size)
    : orders_(std::move(orders)) {
  stride_.assign(orders_.size(), 1);
  for (std::size_t i = orders_.size(); i-- > 0;) {
    if (orders_[i] < 2) throw ShapeError("cyclic orders must be at least 2");
    stride_[i] = size_;
    if (size_ > max_size / static_cast<std::uint64_t>(orders_[i])) {
      throw CapExceeded("group-size", "group order exceeds the configured cap");
    }
    size_ *= static_cast<std::uint64_t>(orders_[i]);
    torsion_ = std::lcm(torsion_, orders_[i]);
  }
}

Code GroupSpec::encode(const Element& x) const {
  require_member(*this, x);
  Code c = 0;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    c += stride_[i] * static_cast<Code>(x.residues[i]);
  }
  return c;
}

Element GroupSpec::decode(Code c) const {
  if (c >= size_) throw ShapeError("element code out of range");
  Element x;
  x.residues.resize(orders_.size());
  for (std::size_t i = 0; i < orders_.size(); ++i) x.residues[i] = residue(c, i);
  return x;
}

bool GroupSpec::contains(const Element& x) const noexcept {
  if (x.residues.size() != orders_.size()) return false;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (x.residues[i] < 0 || x.residues[i] >= orders_[i]) return false;
  }
  return true;
}

Code GroupSpec::add(Code a, Code b) const noexcept {
  Code c = 0;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    std::int64_t r = residue(a, i) + residue(b, i);
    if (r >= orders_[i]) r -= orders_[i];
    c += stride_[i] * static_cast<Code>(r);
  }
  return c;
}

Code GroupSpec::sub(Code a, Code b) const noexcept { return add(a, neg(b)); }

Code GroupSpec::neg(Code a) const noexcept {
  Code c = 0;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    std::int64_t r = residue(a, i);
    if (r != 0) r = orders_[i] - r;
    c += stride_[i] * static_cast<Code>(r);
  }
  return c;
}

Code GroupSpec::scale(std::int64_t k, Code a) const noexcept {
  const std::int64_t kr = mod(k, torsion_);
  Code c = 0;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    const std::int64_t r = static_cast<std::int64_t>(
        (static_cast<__int128>(kr) * residue(a, i)) % orders_[i]);
    c += stride_[i] * static_cast<Code>(r);
  }
  return c;
}

GroupSpec GroupSpec::times(const GroupSpec& other) const {
  std::vector<std::int64_t> o = orders_;
  o.insert(o.end(), other.orders_.begin(), other.orders_.end());
  return GroupSpec(std::move(o));
}

GroupSpec GroupSpec::power(std::size_t n) const {
  std::vector<std::int64_t> o;
  o.reserve(orders_.size() * n);
  for (std::size_t k = 0; k < n; ++k) o.insert(o.end(), orders_.begin(), orders_.end());
  return GroupSpec(std::move(o));
}

std::string GroupSpec::to_string() const {
  if (orders_.empty()) return "{0}";
  std::ostringstream os;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (i) os << " x ";
    os << "Z/" << orders_[i];
  }
  return os.str();
}

Element add(const GroupSpec& g, const Element& a, const Element& b) {
  return g.decode(g.add(g.encode(a), g.encode(b)));
}

Element neg(const GroupSpec& g, const Element& a) { return g.decode(g.neg(g.encode(a))); }

Element scalar_mul(const GroupSpec& g, std::int64_t c, const Element& a) {
  return g.decode(g.scale(c, g.encode(a)));
}

// ---------------------------------------------------------------------------

LinearMap::LinearMap(GroupSpec source, GroupSpec target,
                     std::vector<std::vector<std::int64_t>> matrix)
    : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix)) {
  if (matrix_.size() != target_.rank()) {
    throw ShapeError("linear map: one matrix row per target factor expected");
  }
  for (std::size_t t = 0; t < matrix_.size(); ++t) {
    auto& row = matrix_[t];
    if (row.size() != source_.rank()) {
      throw ShapeError("linear map: one matrix column per source factor expected");
    }
    const std::int64_t nt = target_.orders()[t];
    for (std::size_t s = 0; s < row.size(); ++s) {
      row[s] = mod(row[s], nt);
      const auto image_times_order =
          static_cast<__int128>(row[s]) * source_.orders()[s];
      if (image_times_order % nt != 0) {
        throw ShapeError("linear map is not well defined on " + source_.to_string());
      }
    }
  }
}

LinearMap LinearMap::identity(const GroupSpec& g) {
  std::vector<std::vector<std::int64_t>> m(g.rank(), std::vector<std::int64_t>(g.rank(), 0));
  for (std::size_t i = 0; i < g.rank(); ++i) m[i][i] = 1;
  return LinearMap(g, g, std::move(m));
}

LinearMap LinearMap::zero(const GroupSpec& source, const GroupSpec& target) {
  return LinearMap(source, target,
                   std::vector<std::vector<std::int64_t>>(
                       target.rank(), std::vector<std::int64_t>(source.rank(), 0)));
}

LinearMap LinearMap::scalar(const GroupSpec& g, std::int64_t c) {
  std::vector<std::vector<std::int64_t>> m(g.rank(), std::vector<std::int64_t>(g.rank(), 0));
  for (std::size_t i = 0; i < g.rank(); ++i) m[i][i] = c;
  return LinearMap(g, g, std::move(m));
}

LinearMap LinearMap::projection(const GroupSpec& source, std::size_t first, std::size_t count) {
  if (first + count > source.rank()) throw ShapeError("projection out of range");
  std::vector<std::int64_t> o(source.orders().begin() + static_cast<std::ptrdiff_t>(first),
                              source.orders().begin() + static_cast<std::ptrdiff_t>(first + count));
  std::vector<std::vector<std::int64_t>> m(count, std::vector<std::int64_t>(source.rank(), 0));
  for (std::size_t i = 0; i < count; ++i) m[i][first + i] = 1;
  return LinearMap(source, GroupSpec(std::move(o)), std::move(m));
}

LinearMap LinearMap::stacked(const GroupSpec& source, std::span<const LinearMap> parts) {
  std::vector<std::int64_t> orders;
  std::vector<std::vector<std::int64_t>> m;
  for (const auto& p : parts) {
    if (!(p.source() == source)) throw ShapeError("stacked map: source mismatch");
    orders.insert(orders.end(), p.target().orders().begin(), p.target().orders().end());
    m.insert(m.end(), p.matrix().begin(), p.matrix().end());
  }
  return LinearMap(source, GroupSpec(std::move(orders)), std::move(m));
}

Code LinearMap::apply(Code x) const {
  const std::size_t sr = source_.rank();
  std::int64_t buf[64];
  std::vector<std::int64_t> heap;
  std::int64_t* xs = buf;
  if (sr > 64) {
    heap.resize(sr);
    xs = heap.data();
  }
  for (std::size_t s = 0; s < sr; ++s) xs[s] = source_.residue(x, s);
  Code y = 0;
  for (std::size_t t = 0; t < matrix_.size(); ++t) {
    const std::int64_t nt = target_.orders()[t];
    std::int64_t acc = 0;
    const auto& row = matrix_[t];
    for (std::size_t s = 0; s < sr; ++s) {
      if (row[s] != 0 && xs[s] != 0) acc = (acc + row[s] * xs[s]) % nt;
    }
    y = y * static_cast<Code>(nt) + static_cast<Code>(acc);
  }
  return y;
}

Element LinearMap::apply(const Element& x) const {
  return target_.decode(apply(source_.encode(x)));
}

LinearMap LinearMap::after(const LinearMap& inner) const {
  if (!(inner.target() == source_)) throw ShapeError("composition: groups do not match");
  const std::size_t rows = target_.rank();
  const std::size_t cols = inner.source().rank();
  std::vector<std::vector<std::int64_t>> m(rows, std::vector<std::int64_t>(cols, 0));
  for (std::size_t t = 0; t < rows; ++t) {
    const std::int64_t nt = target_.orders()[t];
    for (std::size_t s = 0; s < cols; ++s) {
      __int128 acc = 0;
      for (std::size_t k = 0; k < source_.rank(); ++k) {
        acc += static_cast<__int128>(matrix_[t][k]) * inner.matrix()[k][s];
      }
      m[t][s] = static_cast<std::int64_t>(acc % nt);
    }
  }
  return LinearMap(inner.source(), target_, std::move(m));
}

// ---------------------------------------------------------------------------

bool is_subgroup(const GroupSpec& g, const ElementSet& s) {
  if (!std::is_sorted(s.begin(), s.end())) return false;
  if (s.empty() || s.front() != 0) return false;
  for (Code a : s) {
    if (a >= g.size()) return false;
    if (!std::binary_search(s.begin(), s.end(), g.neg(a))) return false;
    for (Code b : s) {
      if (!std::binary_search(s.begin(), s.end(), g.add(a, b))) return false;
    }
  }
  return true;
}

Subgroup::Subgroup(GroupSpec parent, ElementSet elements)
    : parent_(std::move(parent)), elements_(make_set(std::move(elements))) {
  if (!is_subgroup(parent_, elements_)) {
    throw ShapeError("element list is not a subgroup of " + parent_.to_string());
  }
}

Subgroup Subgroup::trivial(const GroupSpec& g) { return Subgroup(g, {0}); }

Subgroup Subgroup::whole(const GroupSpec& g) {
  ElementSet all(g.size());
  std::iota(all.begin(), all.end(), Code{0});
  return Subgroup(g, std::move(all));
}

bool Subgroup::contains(Code x) const {
  return std::binary_search(elements_.begin(), elements_.end(), x);
}

bool Subgroup::is_subset_of(const ElementSet& s) const {
  return std::includes(s.begin(), s.end(), elements_.begin(), elements_.end());
}

ElementSet Coset::elements() const {
  return translate(subgroup.parent(), subgroup.elements(), representative);
}

Subgroup generated_subgroup(const GroupSpec& g, std::span<const Code> gens,
                            std::uint64_t max_elements) {
  std::set<Code> seen{0};
  std::deque<Code> frontier{0};
  std::vector<Code> steps;
  for (Code x : gens) {
    if (x >= g.size()) throw ShapeError("generator outside the group");
    if (x != 0) steps.push_back(x);
  }
  // Finite group: closure under adding generators is already closed under negation.
  while (!frontier.empty()) {
    const Code h = frontier.front();
    frontier.pop_front();
    for (Code s : steps) {
      const Code y = g.add(h, s);
      if (seen.insert(y).second) {
        if (seen.size() > max_elements) {
          throw CapExceeded("subgroup-size", "generated subgroup exceeds the configured cap");
        }
        frontier.push_back(y);
      }
    }
  }
  return Subgroup(g, ElementSet(seen.begin(), seen.end()));
}

std::vector<Subgroup> enumerate_subgroups(const GroupSpec& g, std::uint64_t cap) {
  if (g.size() > cap) {
    throw CapExceeded("subgroup-enumeration", "group too large for exhaustive subgroup search");
  }
  const std::size_t n = g.size();
  using Bits = std::vector<bool>;
  std::vector<ElementSet> cyclic(n);
  for (Code x = 0; x < n; ++x) {
    Code y = 0;
    do {
      cyclic[x].push_back(y);
      y = g.add(y, x);
    } while (y != 0);
  }

  std::set<Bits> seen;
  std::vector<Bits> order;
  Bits start(n, false);
  start[0] = true;
  seen.insert(start);
  order.push_back(start);
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const Bits h = order[idx];
    for (Code x = 0; x < n; ++x) {
      if (h[x]) continue;
      Bits joined(n, false);
      for (Code a = 0; a < n; ++a) {
        if (!h[a]) continue;
        for (Code c : cyclic[x]) joined[g.add(a, c)] = true;
      }
      if (seen.insert(joined).second) order.push_back(std::move(joined));
    }
  }

  std::vector<ElementSet> lists;
  lists.reserve(order.size());
  for (const auto& b : order) {
    ElementSet s;
    for (Code x = 0; x < n; ++x) {
      if (b[x]) s.push_back(x);
    }
    lists.push_back(std::move(s));
  }
  std::sort(lists.begin(), lists.end(), [](const ElementSet& a, const ElementSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  std::vector<Subgroup> out;
  out.reserve(lists.size());
  for (auto& s : lists) out.emplace_back(g, std::move(s));
  return out;
}

ElementSet make_set(std::vector<Code> codes) {
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  return codes;
}

ElementSet negate_set(const GroupSpec& g, const ElementSet& a) {
  std::vector<Code> out;
  out.reserve(a.size());
  for (Code x : a) out.push_back(g.neg(x));
  return make_set(std::move(out));
}

ElementSet sumset(const GroupSpec& g, const ElementSet& a, const ElementSet& b, Sign sign) {
  if (a.empty() || b.empty()) throw ShapeError("sumset of an empty set");
  std::vector<bool> hit(g.size(), false);
  for (Code x : a) {
    for (Code y : b) hit[sign == Sign::Plus ? g.add(x, y) : g.sub(x, y)] = true;
  }
  ElementSet out;
  for (Code z = 0; z < g.size(); ++z) {
    if (hit[z]) out.push_back(z);
  }
  return out;
}

ElementSet dilate(const GroupSpec& g, const ElementSet& a, std::int64_t l) {
  if (l < 1) throw ShapeError("dilate needs a positive multiple");
  if (a.empty()) throw ShapeError("dilate of an empty set");
  // kA is eventually periodic in k; remember the sequence to jump ahead.
  std::map<ElementSet, std::int64_t> first_seen{{a, 1}};
  std::vector<ElementSet> history{a};
  for (std::int64_t k = 2; k <= l; ++k) {
    ElementSet next = sumset(g, history.back(), a);
    auto [it, fresh] = first_seen.emplace(next, k);
    if (!fresh) {
      const std::int64_t start = it->second;
      const std::int64_t period = k - start;
      return history[static_cast<std::size_t>(start - 1 + (l - start) % period)];
    }
    history.push_back(std::move(next));
  }
  ElementSet acc = history.back();
  return acc;
}

ElementSet translate(const GroupSpec& g, const ElementSet& a, Code t) {
  std::vector<Code> out;
  out.reserve(a.size());
  for (Code x : a) out.push_back(g.add(x, t));
  return make_set(std::move(out));
}

Coset coset_of(const GroupSpec& g, const Subgroup& h, Code x) {
  Code rep = x;
  for (Code e : h.elements()) rep = std::min(rep, g.add(x, e));
  return Coset{h, rep};
}

std::vector<Coset> cosets_of(const GroupSpec& g, const Subgroup& h) {
  if (!(h.parent() == g)) throw ShapeError("subgroup of a different group");
  std::vector<bool> covered(g.size(), false);
  std::vector<Coset> out;
  for (Code x = 0; x < g.size(); ++x) {
    if (covered[x]) continue;
    // x is the least uncovered element, hence the least member of its coset.
    for (Code e : h.elements()) covered[g.add(x, e)] = true;
    out.push_back(Coset{h, x});
  }
  return out;
}

}  // namespace tpfr
