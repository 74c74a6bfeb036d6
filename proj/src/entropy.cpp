#include "tpfr/entropy.hpp"

#include <cmath>

#include "tpfr/errors.hpp"
#include "tpfr/rational.hpp"

namespace tpfr {

namespace {

void require_disjoint(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  for (std::size_t x : a) {
    for (std::size_t y : b) {
      if (x == y) throw ShapeError("coordinate sets overlap");
    }
  }
}

}  // namespace

double entropy(const Pmf& p) {
  if (p.size() == 1) return 0.0;
  double h = 0.0;
  for (const auto& a : p.atoms()) {
    const double q = ratio(a.weight, p.total());
    h -= q * log_ratio(a.weight, p.total());
  }
  return h;
}

double entropy(const Dist& d) { return entropy(d.pmf()); }

double entropy(const JointDist& j) { return entropy(j.pmf()); }

double entropy(const JointDist& j, std::span<const std::size_t> coords) {
  return entropy(j.marginal(coords));
}

double cond_entropy(const JointDist& j, std::span<const std::size_t> target,
                    std::span<const std::size_t> given) {
  require_disjoint(target, given);
  double h = 0.0;
  for (const auto& s : slices(j, target, given)) h += s.prob.get_d() * entropy(s.law);
  return h;
}

double mutual_info(const JointDist& j, std::span<const std::size_t> a,
                   std::span<const std::size_t> b, std::span<const std::size_t> given) {
  require_disjoint(a, b);
  require_disjoint(a, given);
  require_disjoint(b, given);
  Coords ab(a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  return cond_entropy(j, a, given) + cond_entropy(j, b, given) - cond_entropy(j, ab, given);
}

}  // namespace tpfr
