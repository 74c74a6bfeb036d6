#include "tpfr/ruzsa.hpp"

#include "tpfr/entropy.hpp"
#include "tpfr/errors.hpp"

namespace tpfr {

double rdist(const Dist& x, const Dist& y) {
  return entropy(convolve(x, y, Sign::Minus)) - 0.5 * entropy(x) - 0.5 * entropy(y);
}

void require_cond_pair(const JointDist& pair, const GroupSpec& g) {
  if (pair.arity() != 2) throw ShapeError("conditional pair needs exactly two coordinates");
  if (!(pair.coordinate_groups()[0] == g)) throw ShapeError("conditional pair on the wrong group");
}

double cond_rdist(const Dist& x, const JointDist& yw) {
  require_cond_pair(yw, x.group());
  const std::size_t y[] = {0};
  const std::size_t w[] = {1};
  double d = 0.0;
  for (const auto& s : slices(yw, y, w)) d += s.prob.get_d() * rdist(x, s.law.flat());
  return d;
}

double multidist(std::span<const Dist> t) {
  tuple_group(t);
  double mean = 0.0;
  for (const auto& d : t) mean += entropy(d);
  mean /= static_cast<double>(t.size());
  return entropy(convolve_all(t)) - mean;
}

double cond_multidist(std::span<const JointDist> pairs, std::uint64_t atom_cap) {
  if (pairs.empty()) throw ShapeError("empty tuple");
  const GroupSpec g = pairs.front().coordinate_groups()[0];
  std::vector<GroupSpec> blocks{g};
  for (const auto& p : pairs) {
    require_cond_pair(p, g);
    blocks.push_back(p.coordinate_groups()[1]);
  }
  // Pair i maps (x, y) to (x, 0, ..., y in block i + 1, ..., 0).
  std::vector<Dist> members;
  std::vector<LinearMap> maps;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const GroupSpec& src = pairs[i].flat_group();
    std::vector<LinearMap> parts{LinearMap::projection(src, 0, g.rank())};
    for (std::size_t k = 1; k < blocks.size(); ++k) {
      parts.push_back(k == i + 1 ? LinearMap::projection(src, g.rank(), blocks[k].rank())
                                 : LinearMap::zero(src, blocks[k]));
    }
    members.push_back(pairs[i].flat());
    maps.push_back(LinearMap::stacked(src, parts));
  }
  const JointDist j = lifted_joint(members, maps, blocks, atom_cap);
  const std::size_t sum[] = {0};
  Coords ys;
  for (std::size_t k = 1; k < blocks.size(); ++k) ys.push_back(k);
  double mean = 0.0;
  const std::size_t x0[] = {0};
  const std::size_t y1[] = {1};
  for (const auto& p : pairs) mean += cond_entropy(p, x0, y1);
  mean /= static_cast<double>(pairs.size());
  return cond_entropy(j, sum, ys) - mean;
}

double cond_multidist_averaged(std::span<const JointDist> pairs) {
  if (pairs.empty()) throw ShapeError("empty tuple");
  const GroupSpec g = pairs.front().coordinate_groups()[0];
  const std::size_t x0[] = {0};
  const std::size_t y1[] = {1};
  std::vector<std::vector<Slice>> per;
  for (const auto& p : pairs) {
    require_cond_pair(p, g);
    per.push_back(slices(p, x0, y1));
  }
  // Odometer over all value tuples (y_1, ..., y_m).
  std::vector<std::size_t> idx(per.size(), 0);
  double total = 0.0;
  RVTuple t;
  while (true) {
    mpq_class w = 1;
    t.clear();
    for (std::size_t i = 0; i < per.size(); ++i) {
      w *= per[i][idx[i]].prob;
      t.push_back(per[i][idx[i]].law.flat());
    }
    total += w.get_d() * multidist(t);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == per[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return total;
}

}  // namespace tpfr
