#include "tpfr/calculus.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tpfr/entropy.hpp"
#include "tpfr/errors.hpp"
#include "tpfr/ruzsa.hpp"

namespace tpfr {

// --- reports ---------------------------------------------------------------

double ReportPart::residual() const { return std::abs(lhs - rhs); }

bool ReportPart::pass(double tol) const {
  const double v = kind == PartKind::Slack ? slack() : residual();
  if (!std::isfinite(v)) return false;
  return kind == PartKind::Slack ? v >= -tol : v <= tol;
}

bool SlackReport::pass(double tol) const {
  for (const auto& p : parts) {
    if (!p.pass(tol)) return false;
  }
  return true;
}

double SlackReport::min_slack() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : parts) {
    if (p.kind == PartKind::Slack) v = std::min(v, p.slack());
  }
  return v;
}

double SlackReport::max_residual() const {
  double v = 0.0;
  for (const auto& p : parts) {
    if (p.kind == PartKind::Residual) v = std::max(v, p.residual());
  }
  return v;
}

void Digest::bytes(const void* p, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= b[i];
    h_ *= 0x100000001b3ULL;
  }
}

Digest& Digest::add(std::string_view tag) {
  bytes(tag.data(), tag.size());
  bytes("\0", 1);
  return *this;
}

Digest& Digest::add(std::int64_t v) {
  for (int i = 0; i < 8; ++i) {
    const unsigned char c = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    bytes(&c, 1);
  }
  return *this;
}

Digest& Digest::add(const GroupSpec& g) {
  add("group").add(static_cast<std::int64_t>(g.rank()));
  for (auto o : g.orders()) add(o);
  return *this;
}

Digest& Digest::add(const Pmf& p) {
  add("pmf").add(static_cast<std::int64_t>(p.size()));
  for (const auto& a : p.atoms()) add(static_cast<std::int64_t>(a.code)).add(a.weight.get_str());
  return *this;
}

Digest& Digest::add(const Dist& d) { return add(d.group()).add(d.pmf()); }

Digest& Digest::add(const JointDist& j) {
  add("joint").add(static_cast<std::int64_t>(j.arity()));
  for (const auto& g : j.coordinate_groups()) add(g);
  return add(j.pmf());
}

Digest& Digest::add(std::span<const Dist> t) {
  add("tuple").add(static_cast<std::int64_t>(t.size()));
  for (const auto& d : t) add(d);
  return *this;
}

std::string Digest::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

namespace {

ReportPart slack(std::string label, double lhs, double rhs) {
  return ReportPart{std::move(label), PartKind::Slack, lhs, rhs};
}

ReportPart residual(std::string label, double lhs, double rhs) {
  return ReportPart{std::move(label), PartKind::Residual, lhs, rhs};
}

void require_same_group(const Dist& a, const Dist& b) {
  if (!(a.group() == b.group())) throw ShapeError("arguments live in different groups");
}

void require_pair_on(const JointDist& j, const GroupSpec& g) {
  if (j.arity() != 2 || !(j.coordinate_groups()[0] == g) || !(j.coordinate_groups()[1] == g)) {
    throw ShapeError("expected a joint law of two variables on " + g.to_string());
  }
}

// Matrix sum of two maps with the same source and target.
LinearMap plus(const LinearMap& a, const LinearMap& b) {
  auto m = a.matrix();
  for (std::size_t t = 0; t < m.size(); ++t) {
    for (std::size_t s = 0; s < m[t].size(); ++s) m[t][s] += b.matrix()[t][s];
  }
  return LinearMap(a.source(), a.target(), std::move(m));
}

LinearMap stack(const GroupSpec& src, const std::vector<LinearMap>& parts) {
  return LinearMap::stacked(src, parts);
}

JointDist image_joint(const Dist& flat, const LinearMap& map, std::vector<GroupSpec> blocks) {
  return JointDist(std::move(blocks), pushforward(flat, map).pmf());
}

// (X, pi X) as a two-coordinate joint.
JointDist with_image(const Dist& x, const LinearMap& pi) {
  return image_joint(x, stack(x.group(), {LinearMap::identity(x.group()), pi}),
                     {x.group(), pi.target()});
}

Coords range(std::size_t lo, std::size_t hi) {
  Coords c;
  for (std::size_t k = lo; k < hi; ++k) c.push_back(k);
  return c;
}

std::vector<Dist> images(std::span<const Dist> t, const LinearMap& pi) {
  std::vector<Dist> out;
  for (const auto& x : t) out.push_back(pushforward(x, pi));
  return out;
}

// I(sum X : pi(X_I) | pi(sum X), rho(X_I)) for independent X_i, where rho is
// an optional second map (pass nullptr to drop that conditioning).
double chain_information(std::span<const Dist> t, const LinearMap& pi, const LinearMap* rho,
                         std::uint64_t atom_cap) {
  const GroupSpec& g = tuple_group(t);
  const std::size_t m = t.size();
  std::vector<GroupSpec> blocks{g};
  for (std::size_t i = 0; i < m; ++i) blocks.push_back(pi.target());
  blocks.push_back(pi.target());
  if (rho) {
    for (std::size_t i = 0; i < m; ++i) blocks.push_back(rho->target());
  }
  std::vector<LinearMap> maps;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<LinearMap> parts{LinearMap::identity(g)};
    for (std::size_t k = 0; k < m; ++k) parts.push_back(k == i ? pi : LinearMap::zero(g, pi.target()));
    parts.push_back(pi);
    if (rho) {
      for (std::size_t k = 0; k < m; ++k) {
        parts.push_back(k == i ? *rho : LinearMap::zero(g, rho->target()));
      }
    }
    maps.push_back(stack(g, parts));
  }
  const JointDist j = lifted_joint(t, maps, blocks, atom_cap);
  const Coords a{0};
  const Coords b = range(1, m + 1);
  const Coords c = range(m + 1, blocks.size());
  return mutual_info(j, a, b, c);
}

std::int64_t floor_log2(std::uint64_t v) { return 63 - std::countl_zero(v); }

}  // namespace

// --- Ruzsa distance calculus ----------------------------------------------

SlackReport check_triangle(const Dist& x, const Dist& y, const Dist& z) {
  require_same_group(x, y);
  require_same_group(y, z);
  const double dxy = rdist(x, y), dyx = rdist(y, x), dyz = rdist(y, z), dxz = rdist(x, z);
  return {"ruzsa.triangle",
          {residual("symmetry", dxy, dyx), slack("nonnegativity", 0.0, dxy),
           slack("triangle", dxz, dxy + dyz)},
          Digest().add(x).add(y).add(z).hex()};
}

SlackReport check_sum_lower(const JointDist& xy) {
  const GroupSpec g = xy.coordinate_groups().at(0);
  require_pair_on(xy, g);
  const GroupSpec gg = xy.flat_group();
  const LinearMap px = LinearMap::projection(gg, 0, g.rank());
  const LinearMap py = LinearMap::projection(gg, g.rank(), g.rank());
  const LinearMap neg_py = LinearMap::scalar(g, -1).after(py);
  const Coords cx{0}, cy{1};
  const double hx = entropy(xy, cx), hy = entropy(xy, cy), i = mutual_info(xy, cx, cy);
  const double lower = std::max(hx, hy) - i;
  return {"ruzsa.sum_lower",
          {slack("plus", lower, entropy(pushforward(xy.flat(), plus(px, py)))),
           slack("minus", lower, entropy(pushforward(xy.flat(), plus(px, neg_py))))},
          Digest().add(xy).hex()};
}

SlackReport check_bsg(const JointDist& xy) {
  const GroupSpec g = xy.coordinate_groups().at(0);
  require_pair_on(xy, g);
  const GroupSpec gg = xy.flat_group();
  const LinearMap px = LinearMap::projection(gg, 0, g.rank());
  const LinearMap py = LinearMap::projection(gg, g.rank(), g.rank());
  const JointDist xys = image_joint(xy.flat(), stack(gg, {px, py, plus(px, py)}), {g, g, g});
  const Coords pair{0, 1}, s{2}, cx{0}, cy{1};
  double lhs = 0.0;
  for (const auto& sl : slices(xys, pair, s)) {
    lhs += sl.prob.get_d() * rdist(sl.law.coordinate(0), sl.law.coordinate(1));
  }
  const double rhs = 3.0 * mutual_info(xy, cx, cy) + 2.0 * entropy(xys, s) - entropy(xy, cx) -
                     entropy(xy, cy);
  return {"ruzsa.bsg", {slack("bsg", lhs, rhs)}, Digest().add(xy).hex()};
}

SlackReport check_difference_triangle(const JointDist& xz, const Dist& y) {
  require_pair_on(xz, y.group());
  const GroupSpec& g = y.group();
  const GroupSpec gg = xz.flat_group();
  const LinearMap diff = plus(LinearMap::projection(gg, 0, g.rank()),
                              LinearMap::scalar(g, -1).after(LinearMap::projection(gg, g.rank(), g.rank())));
  const Dist x = xz.coordinate(0), z = xz.coordinate(1);
  const double lhs = entropy(pushforward(xz.flat(), diff));
  const double rhs = entropy(convolve(x, y, Sign::Minus)) + entropy(convolve(y, z, Sign::Minus)) - entropy(y);
  return {"ruzsa.diff_triangle", {slack("difference_triangle", lhs, rhs)},
          Digest().add(xz).add(y).hex()};
}

SlackReport check_negation(const Dist& x, const Dist& y) {
  require_same_group(x, y);
  return {"ruzsa.negation", {slack("negation", rdist(x, negate(y)), 3.0 * rdist(x, y))},
          Digest().add(x).add(y).hex()};
}

SlackReport check_conditioning(const Dist& x, const JointDist& yz) {
  require_cond_pair(yz, x.group());
  const Coords cy{0}, cz{1};
  const double lhs = cond_rdist(x, yz);
  const double rhs = rdist(x, yz.coordinate(0)) + 0.5 * mutual_info(yz, cy, cz);
  return {"ruzsa.conditioning", {slack("conditioning", lhs, rhs)}, Digest().add(x).add(yz).hex()};
}

SlackReport check_sum_conditioning(const Dist& x, const Dist& y, const Dist& z) {
  require_same_group(x, y);
  require_same_group(y, z);
  const GroupSpec& g = x.group();
  const Dist members[] = {y, z};
  const std::vector<LinearMap> maps{stack(g, {LinearMap::identity(g), LinearMap::identity(g)}),
                                    stack(g, {LinearMap::zero(g, g), LinearMap::identity(g)})};
  const JointDist pair = lifted_joint(members, maps, {g, g});
  const double lhs = cond_rdist(x, pair);
  const double rhs = rdist(x, y) + 0.5 * (entropy(convolve(y, z)) - entropy(z));
  return {"ruzsa.sum_conditioning", {slack("sum_conditioning", lhs, rhs)},
          Digest().add(x).add(y).add(z).hex()};
}

SlackReport check_kv(const Dist& x, std::span<const Dist> ys) {
  if (ys.empty()) throw ShapeError("empty tuple");
  double inc = 0.0, dsum = 0.0;
  for (const auto& y : ys) {
    require_same_group(x, y);
    inc += entropy(convolve(x, y)) - entropy(x);
    dsum += rdist(x, y);
  }
  const Dist ysum = convolve_all(ys);
  return {"ruzsa.kv",
          {slack("entropy_increment", entropy(convolve(x, ysum)) - entropy(x), inc),
           slack("distance_sum", rdist(x, ysum), 2.0 * dsum)},
          Digest().add(x).add(ys).hex()};
}

SlackReport check_kv_sharp(const Dist& x, std::span<const Dist> ys) {
  if (ys.empty()) throw ShapeError("empty tuple");
  double dsum = 0.0;
  for (const auto& y : ys) {
    require_same_group(x, y);
    dsum += rdist(x, y);
  }
  const double n = static_cast<double>(ys.size());
  return {"ruzsa.kv_sharp",
          {slack("distance_sum_sharp", rdist(x, convolve_all(ys)), (2.0 * n - 1.0) / n * dsum)},
          Digest().add(x).add(ys).hex()};
}

// --- Multidistance --------------------------------------------------------

SlackReport check_sum_vs_member(std::span<const Dist> t, const Dist& y, std::size_t i0) {
  tuple_group(t);
  require_same_group(t.front(), y);
  if (t.size() < 2 || i0 >= t.size()) throw ShapeError("need at least two members and a valid index");
  const Dist w = convolve_all(t);
  const double lhs = rdist(y, w);
  const double rhs = rdist(y, t[i0]) + 0.5 * (entropy(w) - entropy(t[i0]));
  return {"multi.sum_vs_member", {slack("sum_vs_member", lhs, rhs)},
          Digest().add(t).add(y).add(static_cast<std::int64_t>(i0)).hex()};
}

SlackReport check_sum_domination(std::span<const Dist> t, std::span<const Dist> ys,
                                 std::span<const std::size_t> f) {
  tuple_group(t);
  tuple_group(ys);
  require_same_group(t.front(), ys.front());
  if (t.size() < 2 || f.size() != ys.size()) throw ShapeError("index map must cover the second tuple");
  double rhs = entropy(convolve_all(t));
  Digest dg;
  dg.add(t).add(ys);
  for (std::size_t j = 0; j < ys.size(); ++j) {
    if (f[j] >= t.size()) throw ShapeError("index map out of range");
    rhs += entropy(convolve(ys[j], t[f[j]], Sign::Minus)) - entropy(t[f[j]]);
    dg.add(static_cast<std::int64_t>(f[j]));
  }
  return {"multi.sum_domination", {slack("sum_domination", entropy(convolve_all(ys)), rhs)}, dg.hex()};
}

SlackReport check_sum_self_distance(std::span<const Dist> t) {
  tuple_group(t);
  if (t.size() < 2) throw ShapeError("need at least two members");
  const Dist w = convolve_all(t);
  return {"multi.sum_self_distance", {slack("sum_self_distance", rdist(w, negate(w)), 2.0 * multidist(t))},
          Digest().add(t).hex()};
}

SlackReport check_pairwise(std::span<const Dist> t) {
  tuple_group(t);
  const std::size_t m = t.size();
  if (m < 2) throw ShapeError("need at least two members");
  double lhs = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      if (j != k) lhs += rdist(t[j], negate(t[k]));
    }
  }
  const double md = static_cast<double>(m);
  return {"multi.pairwise", {slack("pairwise", lhs, md * (md - 1.0) * multidist(t))}, Digest().add(t).hex()};
}

SlackReport check_self_distances(std::span<const Dist> t) {
  tuple_group(t);
  if (t.size() < 2) throw ShapeError("need at least two members");
  double lhs = 0.0;
  for (const auto& x : t) lhs += rdist(x, x);
  return {"multi.self", {slack("self", lhs, 2.0 * static_cast<double>(t.size()) * multidist(t))},
          Digest().add(t).hex()};
}

SlackReport check_identical(std::span<const Dist> t) {
  tuple_group(t);
  if (t.size() < 2) throw ShapeError("need at least two members");
  for (const auto& x : t) {
    if (!(x == t.front())) throw ShapeError("members are not identically distributed");
  }
  return {"multi.identical",
          {slack("identical", multidist(t), static_cast<double>(t.size()) * rdist(t.front(), t.front()))},
          Digest().add(t).hex()};
}

// --- Dilates and data processing ------------------------------------------

double dilate_increment(const Dist& x, const Dist& y, std::int64_t a) {
  require_same_group(x, y);
  if (a == 0) return 0.0;
  const Dist ay = pushforward(y, LinearMap::scalar(y.group(), a));
  return entropy(convolve(x, ay, Sign::Minus)) - entropy(x);
}

SlackReport check_dilate(const Dist& x, const Dist& y, std::int64_t a) {
  const double lhs = dilate_increment(x, y, a);
  const double d = rdist(x, y);
  const std::uint64_t abs_a = a < 0 ? static_cast<std::uint64_t>(-a) : static_cast<std::uint64_t>(a);
  const double c1 = 4.0 * static_cast<double>(abs_a);
  const double c2 = a == 0 ? 0.0 : 4.0 + 10.0 * static_cast<double>(floor_log2(abs_a));
  return {"dilate",
          {slack("linear", lhs, c1 * d), slack("logarithmic", lhs, c2 * d)},
          Digest().add(x).add(y).add(a).hex()};
}

SlackReport check_data_processing(const JointDist& j, std::size_t x, std::size_t y,
                                  std::span<const std::size_t> given, const FunctionTable& f,
                                  const FunctionTable& g) {
  Coords order{x, y};
  order.insert(order.end(), given.begin(), given.end());
  const JointDist m = j.marginal(order);
  const GroupSpec& gx = m.coordinate_groups()[0];
  const GroupSpec& gy = m.coordinate_groups()[1];
  const auto check_table = [](const FunctionTable& t, const GroupSpec& src) {
    if (t.values.size() != src.size()) throw ShapeError("partial function table");
    for (Code v : t.values) {
      if (v >= t.target.size()) throw ShapeError("function table value outside its target group");
    }
  };
  check_table(f, gx);
  check_table(g, gy);

  std::vector<GroupSpec> groups{f.target, g.target};
  Code rest = 1;
  for (std::size_t k = 2; k < m.arity(); ++k) {
    groups.push_back(m.coordinate_groups()[k]);
    rest *= m.coordinate_groups()[k].size();
  }
  std::vector<Atom> atoms;
  for (const auto& a : m.pmf().atoms()) {
    const Code fx = f.values[m.coordinate_code(a.code, 0)];
    const Code gyv = g.values[m.coordinate_code(a.code, 1)];
    atoms.push_back(Atom{(fx * g.target.size() + gyv) * rest + a.code % rest, a.weight});
  }
  const JointDist image(groups, Pmf::from_weights(std::move(atoms)));
  const Coords c0{0}, c1{1};
  const Coords cz = range(2, m.arity());
  Digest dg;
  dg.add(j).add(static_cast<std::int64_t>(x)).add(static_cast<std::int64_t>(y));
  for (std::size_t c : given) dg.add(static_cast<std::int64_t>(c));
  for (Code v : f.values) dg.add(static_cast<std::int64_t>(v));
  for (Code v : g.values) dg.add(static_cast<std::int64_t>(v));
  return {"data_processing",
          {slack("data_processing", mutual_info(image, c0, c1, cz), mutual_info(m, c0, c1, cz))},
          dg.hex()};
}

// --- Chain rules ------------------------------------------------------------

SlackReport chain_rule_residual(std::span<const Dist> t, const LinearMap& pi, std::uint64_t atom_cap) {
  const GroupSpec& g = tuple_group(t);
  if (!(pi.source() == g)) throw ShapeError("map is not defined on the tuple's group");
  std::vector<JointDist> pairs;
  for (const auto& x : t) pairs.push_back(with_image(x, pi));
  const double cond = cond_multidist(pairs, atom_cap);
  const double proj = multidist(images(t, pi));
  const double info = chain_information(t, pi, nullptr, atom_cap);
  Digest dg;
  dg.add(t);
  for (const auto& row : pi.matrix()) {
    for (auto v : row) dg.add(v);
  }
  return {"chain.rule", {residual("identity", multidist(t), cond + proj + info)}, dg.hex()};
}

SlackReport cond_chain_rule_residual(std::span<const JointDist> pairs, const LinearMap& pi,
                                     std::uint64_t atom_cap) {
  if (pairs.empty()) throw ShapeError("empty tuple");
  const GroupSpec g = pairs.front().coordinate_groups().at(0);
  if (!(pi.source() == g)) throw ShapeError("map is not defined on the tuple's group");
  const GroupSpec& h = pi.target();
  const std::size_t m = pairs.size();

  std::vector<JointDist> fine, coarse;
  std::vector<Dist> flats;
  std::vector<GroupSpec> blocks{g};
  for (std::size_t i = 0; i < m; ++i) blocks.push_back(h);
  blocks.push_back(h);
  for (const auto& p : pairs) {
    require_cond_pair(p, g);
    blocks.push_back(p.coordinate_groups()[1]);
  }
  std::vector<LinearMap> maps;
  for (std::size_t i = 0; i < m; ++i) {
    const JointDist& p = pairs[i];
    const GroupSpec& a = p.coordinate_groups()[1];
    const GroupSpec& src = p.flat_group();
    const LinearMap px = LinearMap::projection(src, 0, g.rank());
    const LinearMap py = LinearMap::projection(src, g.rank(), a.rank());
    const LinearMap ppx = pi.after(px);
    fine.push_back(image_joint(p.flat(), stack(src, {px, ppx, py}), {g, h.times(a)}));
    coarse.push_back(image_joint(p.flat(), stack(src, {ppx, py}), {h, a}));
    flats.push_back(p.flat());
    std::vector<LinearMap> parts{px};
    for (std::size_t k = 0; k < m; ++k) parts.push_back(k == i ? ppx : LinearMap::zero(src, h));
    parts.push_back(ppx);
    for (std::size_t k = 0; k < m; ++k) {
      parts.push_back(k == i ? py : LinearMap::zero(src, blocks[m + 2 + k]));
    }
    maps.push_back(stack(src, parts));
  }
  const JointDist j = lifted_joint(flats, maps, blocks, atom_cap);
  const Coords ca{0};
  const Coords cb = range(1, m + 1);
  const Coords cc = range(m + 1, blocks.size());
  const double info = mutual_info(j, ca, cb, cc);
  const double rhs = cond_multidist(fine, atom_cap) + cond_multidist(coarse, atom_cap) + info;
  Digest dg;
  for (const auto& p : pairs) dg.add(p);
  for (const auto& row : pi.matrix()) {
    for (auto v : row) dg.add(v);
  }
  return {"chain.conditional", {residual("identity", cond_multidist(pairs, atom_cap), rhs)}, dg.hex()};
}

SlackReport iterated_chain_slack(std::span<const Dist> t, std::span<const LinearMap> steps,
                                 std::uint64_t atom_cap) {
  const GroupSpec& g = tuple_group(t);
  const std::size_t n = steps.size();
  if (n == 0) throw ShapeError("empty chain");
  // pis[d] : G_n -> G_d.
  std::vector<LinearMap> pis(n + 1, LinearMap::identity(g));
  for (std::size_t d = n; d-- > 0;) {
    const LinearMap& step = steps[n - 1 - d];
    if (!(step.source() == pis[d + 1].target())) throw ShapeError("chain maps do not compose");
    pis[d] = step.after(pis[d + 1]);
  }
  if (pis[0].target().size() != 1) throw ShapeError("chain must end in the trivial group");

  double cond_sum = 0.0;
  for (std::size_t d = 1; d <= n; ++d) {
    std::vector<JointDist> pairs;
    for (const auto& x : t) {
      pairs.push_back(image_joint(x, stack(g, {pis[d], pis[d - 1]}), {pis[d].target(), pis[d - 1].target()}));
    }
    cond_sum += cond_multidist(pairs, atom_cap);
  }
  double info_sum = 0.0;
  for (std::size_t d = 1; d < n; ++d) info_sum += chain_information(t, pis[d], &pis[d - 1], atom_cap);
  const double first_info = chain_information(t, pis[1], nullptr, atom_cap);
  const double dx = multidist(t);
  Digest dg;
  dg.add(t);
  for (const auto& s : steps) {
    dg.add(s.target());
    for (const auto& row : s.matrix()) {
      for (auto v : row) dg.add(v);
    }
  }
  return {"chain.iterated",
          {residual("identity", dx, cond_sum + info_sum), slack("inequality", cond_sum + first_info, dx)},
          dg.hex()};
}

GridTerms grid_decomposition(const Grid& grid, std::uint64_t atom_cap) {
  const std::size_t m = grid.size();
  if (m < 2) throw ShapeError("grid must be at least 2 x 2");
  for (const auto& row : grid) {
    if (row.size() != m) throw ShapeError("grid must be square");
  }
  const GroupSpec g = grid[0][0].group();
  for (const auto& row : grid) tuple_group(row);
  for (const auto& row : grid) require_same_group(row.front(), grid[0][0]);

  const auto column = [&](std::size_t j) {
    RVTuple c;
    for (std::size_t i = 0; i < m; ++i) c.push_back(grid[i][j]);
    return c;
  };

  GridTerms out;
  // Column sums in blocks 0..m-1, row sums in m..2m-1, total in 2m.
  {
    const std::vector<GroupSpec> blocks(2 * m + 1, g);
    std::vector<Dist> members;
    std::vector<LinearMap> maps;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        std::vector<LinearMap> parts;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
          const bool hit = k == j || k == m + i || k == 2 * m;
          parts.push_back(hit ? LinearMap::identity(g) : LinearMap::zero(g, g));
        }
        members.push_back(grid[i][j]);
        maps.push_back(stack(g, parts));
      }
    }
    const JointDist joint = lifted_joint(members, maps, blocks, atom_cap);
    const Coords total{2 * m};
    out.mutual_info = mutual_info(joint, range(0, m), range(m, 2 * m), total);
  }
  const LinearMap both = stack(g, {LinearMap::identity(g), LinearMap::identity(g)});
  const LinearMap second = stack(g, {LinearMap::zero(g, g), LinearMap::identity(g)});
  for (std::size_t j = 0; j + 1 < m; ++j) {
    // Pairs (X_ij, X_ij + ... + X_im).
    std::vector<JointDist> pairs;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<Dist> members;
      std::vector<LinearMap> maps;
      for (std::size_t l = j; l < m; ++l) {
        members.push_back(grid[i][l]);
        maps.push_back(l == j ? both : second);
      }
      pairs.push_back(lifted_joint(members, maps, {g, g}, atom_cap));
    }
    out.a.push_back(multidist(column(j)) - cond_multidist(pairs, atom_cap));
  }
  RVTuple row_sums;
  for (const auto& row : grid) row_sums.push_back(convolve_all(row));
  out.b = multidist(column(m - 1)) - multidist(row_sums);
  return out;
}

SlackReport grid_chain_slack(const Grid& grid, std::uint64_t atom_cap) {
  const GridTerms terms = grid_decomposition(grid, atom_cap);
  double rhs = terms.b;
  for (double a : terms.a) rhs += a;
  Digest dg;
  for (const auto& row : grid) dg.add(std::span<const Dist>(row));
  return {"chain.grid",
          {slack("bound", terms.mutual_info, rhs), slack("mutual_information_nonneg", 0.0, terms.mutual_info)},
          dg.hex()};
}

}  // namespace tpfr
