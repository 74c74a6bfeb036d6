#include "tpfr/dist.hpp"

#include <algorithm>
#include <unordered_map>

#include "tpfr/errors.hpp"

namespace tpfr {

namespace {

constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 16;

// Sums weights per code over a code space of the given size.
class Accumulator {
 public:
  explicit Accumulator(std::uint64_t space) : dense_(space <= kDenseLimit) {
    if (dense_) weights_.resize(space);
  }

  void add(Code c, const mpz_class& w) {
    if (dense_) {
      if (weights_[c] == 0) touched_.push_back(c);
      weights_[c] += w;
    } else {
      sparse_[c] += w;
    }
  }

  void add_product(Code c, const mpz_class& a, const mpz_class& b) {
    if (dense_) {
      if (weights_[c] == 0) touched_.push_back(c);
      mpz_addmul(weights_[c].get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    } else {
      mpz_addmul(sparse_[c].get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    }
  }

  std::size_t atoms() const { return dense_ ? touched_.size() : sparse_.size(); }

  Pmf finish() {
    std::vector<Atom> out;
    if (dense_) {
      std::sort(touched_.begin(), touched_.end());
      out.reserve(touched_.size());
      for (Code c : touched_) out.push_back(Atom{c, std::move(weights_[c])});
    } else {
      out.reserve(sparse_.size());
      for (auto& [c, w] : sparse_) out.push_back(Atom{c, std::move(w)});
    }
    return Pmf::from_weights(std::move(out));
  }

 private:
  bool dense_;
  std::vector<mpz_class> weights_;
  std::vector<Code> touched_;
  std::unordered_map<Code, mpz_class> sparse_;
};

Pmf convolve_pmf(const GroupSpec& g, const Pmf& a, const Pmf& b, Sign sign,
                 std::uint64_t atom_cap = kDefaultAtomCap) {
  Accumulator acc(g.size());
  for (const auto& x : a.atoms()) {
    for (const auto& y : b.atoms()) {
      const Code z = sign == Sign::Plus ? g.add(x.code, y.code) : g.sub(x.code, y.code);
      acc.add_product(z, x.weight, y.weight);
    }
    if (acc.atoms() > atom_cap) {
      throw CapExceeded("atoms", "joint law exceeds the atom cap");
    }
  }
  return acc.finish();
}

Pmf map_pmf(const Pmf& p, std::uint64_t space, const auto& f) {
  Accumulator acc(space);
  for (const auto& a : p.atoms()) acc.add(f(a.code), a.weight);
  return acc.finish();
}

}  // namespace

// --- Pmf -------------------------------------------------------------------

Pmf Pmf::point(Code c) {
  Pmf p;
  p.atoms_.push_back(Atom{c, 1});
  p.total_ = 1;
  return p;
}

Pmf Pmf::from_weights(std::vector<Atom> atoms) {
  const auto by_code = [](const Atom& a, const Atom& b) { return a.code < b.code; };
  if (!std::is_sorted(atoms.begin(), atoms.end(), by_code)) {
    std::sort(atoms.begin(), atoms.end(), by_code);
  }
  Pmf p;
  p.atoms_.reserve(atoms.size());
  for (auto& a : atoms) {
    if (sgn(a.weight) < 0) throw ShapeError("negative probability weight");
    if (sgn(a.weight) == 0) continue;
    if (!p.atoms_.empty() && p.atoms_.back().code == a.code) {
      p.atoms_.back().weight += a.weight;
    } else {
      p.atoms_.push_back(std::move(a));
    }
  }
  if (p.atoms_.empty()) throw ShapeError("distribution with no positive mass");
  mpz_class g = p.atoms_.front().weight;
  for (const auto& a : p.atoms_) {
    if (g == 1) break;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.weight.get_mpz_t());
  }
  p.total_ = 0;
  for (auto& a : p.atoms_) {
    if (g != 1) mpz_divexact(a.weight.get_mpz_t(), a.weight.get_mpz_t(), g.get_mpz_t());
    p.total_ += a.weight;
  }
  return p;
}

mpq_class Pmf::prob(Code c) const {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), c,
                                   [](const Atom& a, Code v) { return a.code < v; });
  if (it == atoms_.end() || it->code != c) return 0;
  mpq_class q(it->weight, total_);
  q.canonicalize();
  return q;
}

bool operator==(const Pmf& a, const Pmf& b) {
  if (a.total_ != b.total_ || a.atoms_.size() != b.atoms_.size()) return false;
  for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
    if (a.atoms_[i].code != b.atoms_[i].code || a.atoms_[i].weight != b.atoms_[i].weight) {
      return false;
    }
  }
  return true;
}

// --- Dist ------------------------------------------------------------------

Dist::Dist(GroupSpec group, Pmf pmf) : group_(std::move(group)), pmf_(std::move(pmf)) {
  if (pmf_.atoms().back().code >= group_.size()) {
    throw ShapeError("distribution support outside " + group_.to_string());
  }
}

Dist Dist::from_probabilities(GroupSpec group,
                              const std::vector<std::pair<Code, mpq_class>>& probs) {
  mpz_class den = 1;
  mpq_class sum = 0;
  for (const auto& [c, q] : probs) {
    if (sgn(q) <= 0) throw ShapeError("probabilities must be positive");
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
    sum += q;
  }
  if (sum != 1) throw ShapeError("probabilities must sum to 1");
  std::vector<Atom> atoms;
  atoms.reserve(probs.size());
  for (const auto& [c, q] : probs) {
    atoms.push_back(Atom{c, mpz_class(q.get_num() * (den / q.get_den()))});
  }
  return Dist(std::move(group), Pmf::from_weights(std::move(atoms)));
}

ElementSet Dist::support() const {
  ElementSet s;
  s.reserve(pmf_.size());
  for (const auto& a : pmf_.atoms()) s.push_back(a.code);
  return s;
}

const GroupSpec& tuple_group(std::span<const Dist> t) {
  if (t.empty()) throw ShapeError("empty tuple");
  for (const auto& d : t) {
    if (!(d.group() == t.front().group())) throw ShapeError("tuple members live in different groups");
  }
  return t.front().group();
}

Dist uniform_on(const GroupSpec& g, const ElementSet& s) {
  if (s.empty()) throw ShapeError("uniform law on an empty set");
  std::vector<Atom> atoms;
  atoms.reserve(s.size());
  for (Code c : s) atoms.push_back(Atom{c, 1});
  return Dist(g, Pmf::from_weights(std::move(atoms)));
}

Dist uniform_on(const Subgroup& h) { return uniform_on(h.parent(), h.elements()); }

Dist point_mass(const GroupSpec& g, Code x) { return Dist(g, Pmf::point(x)); }

Dist convolve(const Dist& x, const Dist& y, Sign sign) {
  if (!(x.group() == y.group())) throw ShapeError("convolution of laws on different groups");
  return Dist(x.group(), convolve_pmf(x.group(), x.pmf(), y.pmf(), sign));
}

Dist convolve_all(std::span<const Dist> members) {
  const GroupSpec& g = tuple_group(members);
  Pmf acc = members.front().pmf();
  for (std::size_t k = 1; k < members.size(); ++k) {
    acc = convolve_pmf(g, acc, members[k].pmf(), Sign::Plus);
  }
  return Dist(g, std::move(acc));
}

Dist negate(const Dist& x) {
  const GroupSpec& g = x.group();
  return Dist(g, map_pmf(x.pmf(), g.size(), [&](Code c) { return g.neg(c); }));
}

Dist pushforward(const Dist& x, const LinearMap& map) {
  if (!(x.group() == map.source())) throw ShapeError("pushforward: law is not on the map's source");
  return Dist(map.target(),
              map_pmf(x.pmf(), map.target().size(), [&](Code c) { return map.apply(c); }));
}

// --- JointDist -------------------------------------------------------------

namespace {

GroupSpec concat(const std::vector<GroupSpec>& groups) {
  std::vector<std::int64_t> orders;
  for (const auto& g : groups) orders.insert(orders.end(), g.orders().begin(), g.orders().end());
  return GroupSpec(std::move(orders));
}

}  // namespace

JointDist::JointDist(std::vector<GroupSpec> coordinate_groups, Pmf pmf)
    : groups_(std::move(coordinate_groups)), flat_(concat(groups_)), pmf_(std::move(pmf)) {
  stride_.assign(groups_.size(), 1);
  Code s = 1;
  for (std::size_t i = groups_.size(); i-- > 0;) {
    stride_[i] = s;
    s *= groups_[i].size();
  }
  if (pmf_.atoms().back().code >= flat_.size()) {
    throw ShapeError("joint law support outside the coordinate groups");
  }
}

JointDist JointDist::of(const Dist& d) { return JointDist({d.group()}, d.pmf()); }

Code JointDist::join(std::span<const Code> parts) const {
  if (parts.size() != groups_.size()) throw ShapeError("wrong number of coordinates");
  Code c = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] >= groups_[i].size()) throw ShapeError("coordinate value out of range");
    c += parts[i] * stride_[i];
  }
  return c;
}

Dist JointDist::coordinate(std::size_t i) const {
  const std::size_t one[] = {i};
  return marginal(one).flat();
}

JointDist JointDist::marginal(std::span<const std::size_t> coords) const {
  std::vector<bool> used(groups_.size(), false);
  std::vector<GroupSpec> gs;
  for (std::size_t c : coords) {
    if (c >= groups_.size() || used[c]) throw ShapeError("marginal: bad coordinate list");
    used[c] = true;
    gs.push_back(groups_[c]);
  }
  std::vector<Code> new_stride(coords.size(), 1);
  Code space = 1;
  for (std::size_t k = coords.size(); k-- > 0;) {
    new_stride[k] = space;
    space *= gs[k].size();
  }
  Pmf p = map_pmf(pmf_, space, [&](Code flat) {
    Code c = 0;
    for (std::size_t k = 0; k < coords.size(); ++k) {
      c += coordinate_code(flat, coords[k]) * new_stride[k];
    }
    return c;
  });
  return JointDist(std::move(gs), std::move(p));
}

JointDist JointDist::condition(std::size_t coord, Code value) const {
  if (coord >= groups_.size()) throw ShapeError("condition: bad coordinate");
  const Code low_span = stride_[coord];
  const Code high_span = low_span * groups_[coord].size();
  std::vector<Atom> kept;
  for (const auto& a : pmf_.atoms()) {
    if (coordinate_code(a.code, coord) != value) continue;
    kept.push_back(Atom{(a.code / high_span) * low_span + a.code % low_span, a.weight});
  }
  if (kept.empty()) throw NullEventError("conditioning on an event of probability zero");
  std::vector<GroupSpec> gs = groups_;
  gs.erase(gs.begin() + static_cast<std::ptrdiff_t>(coord));
  return JointDist(std::move(gs), Pmf::from_weights(std::move(kept)));
}

JointDist independent_product(const JointDist& a, const JointDist& b) {
  std::vector<GroupSpec> gs = a.coordinate_groups();
  gs.insert(gs.end(), b.coordinate_groups().begin(), b.coordinate_groups().end());
  const Code nb = b.flat_group().size();
  std::vector<Atom> atoms;
  atoms.reserve(a.pmf().size() * b.pmf().size());
  for (const auto& x : a.pmf().atoms()) {
    for (const auto& y : b.pmf().atoms()) {
      atoms.push_back(Atom{x.code * nb + y.code, x.weight * y.weight});
    }
  }
  return JointDist(std::move(gs), Pmf::from_weights(std::move(atoms)));
}

JointDist lifted_joint(std::span<const Dist> members, std::span<const LinearMap> maps,
                       std::vector<GroupSpec> blocks, std::uint64_t atom_cap) {
  if (members.size() != maps.size()) throw ShapeError("lifted joint: one map per member expected");
  const GroupSpec target = concat(blocks);
  Pmf acc = Pmf::point(0);
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!(maps[k].target() == target)) throw ShapeError("lifted joint: map target mismatch");
    const Dist image = pushforward(members[k], maps[k]);
    acc = convolve_pmf(target, acc, image.pmf(), Sign::Plus, atom_cap);
  }
  return JointDist(std::move(blocks), std::move(acc));
}

std::vector<Slice> slices(const JointDist& j, std::span<const std::size_t> target,
                          std::span<const std::size_t> given) {
  Coords order(given.begin(), given.end());
  order.insert(order.end(), target.begin(), target.end());
  const JointDist m = j.marginal(order);

  std::vector<GroupSpec> target_groups;
  Code target_space = 1;
  for (std::size_t t : target) {
    target_groups.push_back(j.coordinate_groups()[t]);
    target_space *= j.coordinate_groups()[t].size();
  }

  std::vector<Slice> out;
  const auto& atoms = m.pmf().atoms();
  for (std::size_t lo = 0; lo < atoms.size();) {
    const Code value = atoms[lo].code / target_space;
    std::size_t hi = lo;
    mpz_class mass = 0;
    std::vector<Atom> part;
    while (hi < atoms.size() && atoms[hi].code / target_space == value) {
      part.push_back(Atom{atoms[hi].code % target_space, atoms[hi].weight});
      mass += atoms[hi].weight;
      ++hi;
    }
    mpq_class prob(mass, m.pmf().total());
    prob.canonicalize();
    out.push_back(Slice{value, prob, JointDist(target_groups, Pmf::from_weights(std::move(part)))});
    lo = hi;
  }
  return out;
}

}  // namespace tpfr
