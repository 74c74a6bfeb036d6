#include "tpfr/pfr.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tpfr/entropy.hpp"
#include "tpfr/errors.hpp"
#include "tpfr/rational.hpp"
#include "tpfr/ruzsa.hpp"

namespace tpfr {

namespace {

void require_nonempty(const ElementSet& a) {
  if (a.empty()) throw ShapeError("the set must be nonempty");
}

std::string element_text(const GroupSpec& g, Code x) {
  std::string s = "(";
  for (std::size_t i = 0; i < g.rank(); ++i) s += (i ? "," : "") + std::to_string(g.residue(x, i));
  return s + ")";
}

bool includes(const ElementSet& big, const ElementSet& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::uint64_t largest_prime_factor(std::uint64_t n) {
  std::uint64_t best = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      best = p;
      n /= p;
    }
  }
  return n > 1 ? n : best;
}

std::vector<Code> coset_reps_meeting(const GroupSpec& g, const Subgroup& h, const ElementSet& a) {
  std::set<Code> reps;
  for (Code x : a) reps.insert(coset_of(g, h, x).representative);
  return {reps.begin(), reps.end()};
}

}  // namespace

mpq_class doubling(const GroupSpec& g, const ElementSet& a) {
  require_nonempty(a);
  mpq_class k(static_cast<long>(sumset(g, a, a).size()), static_cast<long>(a.size()));
  k.canonicalize();
  return k;
}

Bridge entropic_bridge(const GroupSpec& g, const ElementSet& a) {
  const Dist u = uniform_on(g, a);
  const mpq_class k = doubling(g, a);
  const double log_k = log_ratio(k.get_num(), k.get_den());
  const double dist = rdist(u, negate(u));
  if (dist > log_k + 1e-9) throw Error("d[U_A; -U_A] exceeds log K");
  return Bridge{u, dist, log_k};
}

Translate best_translate(const GroupSpec& g, const ElementSet& a, const Subgroup& h) {
  require_nonempty(a);
  if (!(h.parent() == g)) throw ShapeError("subgroup of a different group");
  // p_{U_A - U_H}(x) = |A cap (H + x)| / (|A| |H|).
  const Dist diff = convolve(uniform_on(g, a), uniform_on(h), Sign::Minus);
  Code best = 0;
  mpz_class best_w = -1;
  for (const auto& at : diff.pmf().atoms()) {
    if (at.weight > best_w) {
      best_w = at.weight;
      best = at.code;
    }
  }
  const mpq_class p = diff.prob(best);
  return Translate{best, p * static_cast<long>(a.size())};
}

std::vector<Code> ruzsa_cover(const GroupSpec& g, const ElementSet& a, const ElementSet& b) {
  if (b.empty()) throw ShapeError("the covering set must be nonempty");
  std::vector<Code> kept;
  std::vector<bool> used(g.size(), false);
  for (Code x : a) {
    const ElementSet tb = translate(g, b, x);
    if (std::any_of(tb.begin(), tb.end(), [&](Code y) { return used[y]; })) continue;
    for (Code y : tb) used[y] = true;
    kept.push_back(x);
  }
  return kept;
}

Subgroup subdivide(const Subgroup& h, std::uint64_t target) {
  if (target < 1) throw ShapeError("subdivision target must be at least 1");
  Subgroup cur = h;
  if (cur.size() <= target) return cur;
  const auto all = enumerate_subgroups(h.parent());
  while (cur.size() > target) {
    const std::uint64_t p = largest_prime_factor(cur.size());
    // enumerate_subgroups sorts by size then lexicographically.
    const auto it = std::find_if(all.begin(), all.end(), [&](const Subgroup& s) {
      return s.size() * p == cur.size() && includes(cur.elements(), s.elements());
    });
    if (it == all.end()) throw Error("no subgroup of prime index found");
    cur = *it;
  }
  return cur;
}

std::int64_t least_difference_dilate(const GroupSpec& g, const ElementSet& a, const ElementSet& h) {
  require_nonempty(a);
  ElementSet la = a;
  ElementSet prev;
  for (std::int64_t l = 1;; ++l) {
    const ElementSet diff = sumset(g, la, negate_set(g, la));
    if (includes(diff, h)) return l;
    if (diff == prev) return -1;
    prev = diff;
    la = sumset(g, la, a);
  }
}

PfrResult pfr_cover(const GroupSpec& g, const ElementSet& a_in, const PfrConfig& cfg) {
  require_nonempty(a_in);
  const auto m = g.torsion();
  if (m < 2) throw ShapeError("the trivial group has nothing to cover");
  const Code shift = a_in.front();
  const ElementSet a = translate(g, a_in, g.neg(shift));

  const Bridge bridge = entropic_bridge(g, a);
  const EntropicPfr ent = entropic_pfr(bridge.uniform, negate(bridge.uniform), cfg.decrement);
  const Subgroup& found = ent.subgroup;

  const Translate tr = best_translate(g, a, found);
  ElementSet b;
  for (Code x : a) {
    if (found.contains(g.sub(x, tr.x0))) b.push_back(x);
  }
  const std::vector<Code> t = ruzsa_cover(g, a, b);

  // A is inside T + (B - B), and B - B lies in the found subgroup; each of
  // those cosets splits into cosets of the subdivided subgroup.
  const Subgroup sub = subdivide(found, a.size());
  std::set<Code> pieces;
  for (Code x : t) {
    for (Code y : found.elements()) pieces.insert(coset_of(g, sub, g.add(x, y)).representative);
  }
  const std::vector<Code> meeting = coset_reps_meeting(g, sub, a);
  std::vector<Code> translates;
  for (Code r : pieces) {
    if (std::binary_search(meeting.begin(), meeting.end(), r)) {
      translates.push_back(coset_of(g, sub, g.add(r, shift)).representative);
    }
  }
  std::sort(translates.begin(), translates.end());

  const mpq_class k = doubling(g, a_in);
  const std::int64_t ell = least_difference_dilate(g, a_in, sub.elements());
  const double mm = static_cast<double>(m);
  const double log_bound = cfg.count_exponent * mm * mm * mm * std::log(2.0 * k.get_d());
  const bool within = std::log(static_cast<double>(translates.size())) <= log_bound;
  return PfrResult{CosetCover{sub, std::move(translates), k, ell},
                   shift,
                   bridge,
                   found,
                   tr,
                   t,
                   ent.run.ell_bound,
                   log_bound,
                   within,
                   ent.run};
}

bool CoverReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CoverCheck& c) { return c.pass || !c.hard; });
}

CoverReport verify_cover(const GroupSpec& g, const ElementSet& a, const CosetCover& cover) {
  CoverReport rep;
  const Subgroup& h = cover.subgroup;
  const bool valid = h.parent() == g && is_subgroup(g, h.elements());
  rep.checks.push_back({"subgroup", valid, true, valid ? "" : "not a subgroup of " + g.to_string()});
  if (!valid) return rep;

  std::string missing;
  for (Code x : a) {
    const bool hit = std::any_of(cover.translates.begin(), cover.translates.end(),
                                 [&](Code t) { return h.contains(g.sub(x, t)); });
    if (!hit) {
      missing = "uncovered element " + element_text(g, x);
      break;
    }
  }
  rep.checks.push_back({"coverage", missing.empty(), true, missing});

  rep.checks.push_back({"subgroup_size", h.size() <= a.size(), true,
                        std::to_string(h.size()) + " vs |A| = " + std::to_string(a.size())});

  bool contained = false;
  if (cover.ell >= 1 && !a.empty()) {
    const ElementSet la = dilate(g, a, cover.ell);
    contained = includes(sumset(g, la, negate_set(g, la)), h.elements());
  }
  rep.checks.push_back({"containment", contained, true, "ell = " + std::to_string(cover.ell)});

  std::set<Code> cosets;
  for (Code t : cover.translates) cosets.insert(coset_of(g, h, t).representative);
  const bool distinct = cosets.size() == cover.translates.size();
  rep.checks.push_back({"distinct_cosets", distinct, true, std::to_string(cover.translates.size()) + " translates"});

  const bool k_ok = !a.empty() && cover.k == doubling(g, a);
  rep.checks.push_back({"doubling", k_ok, true, format_rational(cover.k)});

  try {
    std::size_t best = a.size();
    for (const auto& s : enumerate_subgroups(g)) {
      if (s.size() > a.size()) continue;
      best = std::min(best, coset_reps_meeting(g, s, a).size());
    }
    rep.optimal_count = best;
    rep.checks.push_back({"optimal_ratio", true, false,
                          std::to_string(cover.translates.size()) + " / " + std::to_string(best)});
  } catch (const CapExceeded&) {
    rep.checks.push_back({"optimal_ratio", true, false, "group too large to enumerate"});
  }
  return rep;
}

}  // namespace tpfr
