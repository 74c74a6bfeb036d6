#pragma once

// Brute-force reference computations for the tests. Everything here works on
// plain residue vectors and doubles and enumerates the full product sample
// space of independent variables, so it shares no code path with the library
// beyond Element decoding.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "tpfr/dist.hpp"

namespace oracle {

using Vec = std::vector<std::int64_t>;

struct Law {
  Vec orders;
  std::vector<std::pair<Vec, double>> atoms;
};

inline Law from(const tpfr::Dist& d) {
  Law l{d.group().orders(), {}};
  for (const auto& a : d.pmf().atoms()) {
    mpq_class q(a.weight, d.pmf().total());
    l.atoms.emplace_back(d.group().decode(a.code).residues, q.get_d());
  }
  return l;
}

inline Vec add(const Vec& orders, const Vec& a, const Vec& b) {
  Vec c(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) c[i] = (a[i] + b[i]) % orders[i];
  return c;
}

inline Vec scale(const Vec& orders, std::int64_t k, const Vec& a) {
  Vec c(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    c[i] = ((k % orders[i]) * a[i] % orders[i] + orders[i]) % orders[i];
  }
  return c;
}

inline Vec neg(const Vec& orders, const Vec& a) { return scale(orders, -1, a); }

inline Vec zero(const Vec& orders) { return Vec(orders.size(), 0); }

inline Vec cat(std::initializer_list<Vec> parts) {
  Vec out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

using Outcome = std::vector<const Vec*>;

/// Calls f(outcome, probability) for every point of the product space.
inline void enumerate(const std::vector<Law>& laws,
                      const std::function<void(const Outcome&, double)>& f) {
  Outcome cur(laws.size());
  std::function<void(std::size_t, double)> rec = [&](std::size_t k, double p) {
    if (k == laws.size()) {
      f(cur, p);
      return;
    }
    for (const auto& [x, q] : laws[k].atoms) {
      cur[k] = &x;
      rec(k + 1, p * q);
    }
  };
  rec(0, 1.0);
}

inline double entropy(const std::map<Vec, double>& m) {
  double h = 0.0;
  for (const auto& [k, p] : m) {
    if (p > 0) h -= p * std::log(p);
  }
  return h;
}

/// Law of key(outcome) on the product space.
inline std::map<Vec, double> law_of(const std::vector<Law>& laws,
                                    const std::function<Vec(const Outcome&)>& key) {
  std::map<Vec, double> m;
  enumerate(laws, [&](const Outcome& o, double p) { m[key(o)] += p; });
  return m;
}

inline double H(const std::vector<Law>& laws, const std::function<Vec(const Outcome&)>& key) {
  return entropy(law_of(laws, key));
}

/// H(A | B) as H(A, B) - H(B).
inline double Hc(const std::vector<Law>& laws, const std::function<Vec(const Outcome&)>& a,
                 const std::function<Vec(const Outcome&)>& b) {
  return H(laws, [&](const Outcome& o) { return cat({a(o), b(o)}); }) - H(laws, b);
}

/// I(A : B | C) = H(A,C) + H(B,C) - H(A,B,C) - H(C).
inline double I(const std::vector<Law>& laws, const std::function<Vec(const Outcome&)>& a,
                const std::function<Vec(const Outcome&)>& b,
                const std::function<Vec(const Outcome&)>& c) {
  return H(laws, [&](const Outcome& o) { return cat({a(o), c(o)}); }) +
         H(laws, [&](const Outcome& o) { return cat({b(o), c(o)}); }) -
         H(laws, [&](const Outcome& o) { return cat({a(o), b(o), c(o)}); }) - H(laws, c);
}

inline double H(const Law& l) {
  std::map<Vec, double> m;
  for (const auto& [x, p] : l.atoms) m[x] += p;
  return entropy(m);
}

/// H of the sum of independent copies of the given laws.
inline double H_sum(const std::vector<Law>& laws) {
  const Vec& orders = laws.front().orders;
  return H(laws, [&](const Outcome& o) {
    Vec s = zero(orders);
    for (const Vec* x : o) s = add(orders, s, *x);
    return s;
  });
}

/// d[X;Y] = H(X - Y) - H(X)/2 - H(Y)/2.
inline double rdist(const Law& x, const Law& y) {
  const Vec& orders = x.orders;
  const double h = H({x, y}, [&](const Outcome& o) { return add(orders, *o[0], neg(orders, *o[1])); });
  return h - 0.5 * H(x) - 0.5 * H(y);
}

inline double multidist(const std::vector<Law>& t) {
  double mean = 0.0;
  for (const auto& l : t) mean += H(l);
  return H_sum(t) - mean / static_cast<double>(t.size());
}

/// H(X - aY) for independent X, Y.
inline double H_dilate(const Law& x, const Law& y, std::int64_t a) {
  const Vec& orders = x.orders;
  return H({x, y}, [&](const Outcome& o) { return add(orders, *o[0], scale(orders, -a, *o[1])); });
}

}  // namespace oracle

namespace oracle {

/// All subgroups of a group with at most two generators, as sorted vectors,
/// by closing every pair of elements under addition.
inline std::vector<std::vector<Vec>> subgroups(const Vec& orders) {
  std::vector<Vec> all{zero(orders)};
  for (std::size_t k = 0; k < orders.size(); ++k) {
    std::vector<Vec> next;
    for (const auto& v : all) {
      for (std::int64_t r = 0; r < orders[k]; ++r) {
        Vec w = v;
        w[k] = r;
        next.push_back(w);
      }
    }
    all = next;
  }
  std::map<std::vector<Vec>, int> found;
  for (const auto& a : all) {
    for (const auto& b : all) {
      std::map<Vec, int> closed{{zero(orders), 0}};
      std::vector<Vec> frontier{zero(orders)};
      while (!frontier.empty()) {
        Vec x = frontier.back();
        frontier.pop_back();
        for (const Vec* g : {&a, &b}) {
          Vec y = add(orders, x, *g);
          if (closed.emplace(y, 0).second) frontier.push_back(y);
        }
      }
      std::vector<Vec> h;
      for (const auto& [v, _] : closed) h.push_back(v);
      found.emplace(h, 0);
    }
  }
  std::vector<std::vector<Vec>> out;
  for (const auto& [h, _] : found) out.push_back(h);
  return out;
}

inline Law uniform(const Vec& orders, const std::vector<Vec>& s) {
  Law l{orders, {}};
  for (const auto& v : s) l.atoms.emplace_back(v, 1.0 / static_cast<double>(s.size()));
  return l;
}

/// min over subgroups H of sum_i d[X_i; U_H].
inline double best_subgroup_objective(const std::vector<Law>& t) {
  double best = 1e300;
  for (const auto& h : subgroups(t.front().orders)) {
    const Law u = uniform(t.front().orders, h);
    double s = 0.0;
    for (const auto& x : t) s += rdist(x, u);
    best = std::min(best, s);
  }
  return best;
}

}  // namespace oracle
