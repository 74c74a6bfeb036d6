#include "tpfr/decrement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tpfr/entropy.hpp"
#include "tpfr/errors.hpp"
#include "tpfr/ruzsa.hpp"

namespace tpfr {

namespace {

constexpr std::size_t kZ1 = 0, kZ2 = 1, kZ3 = 2, kW = 3;

std::size_t mod(std::int64_t a, std::size_t m) {
  const auto mm = static_cast<std::int64_t>(m);
  return static_cast<std::size_t>(((a % mm) + mm) % mm);
}

const GroupSpec& require_grid_tuple(const RVTuple& t) {
  const GroupSpec& g = tuple_group(t);
  if (t.size() < 2) throw ShapeError("need a tuple of at least two laws");
  return g;
}

bool is_torsion_for(const GroupSpec& g, std::size_t m) { return static_cast<std::int64_t>(m) % g.torsion() == 0; }

// The endgame variables need m g = 0 for every g.
const GroupSpec& require_torsion_tuple(const RVTuple& t) {
  const GroupSpec& g = require_grid_tuple(t);
  if (!is_torsion_for(g, t.size())) {
    throw ShapeError("group " + g.to_string() + " is not " + std::to_string(t.size()) + "-torsion");
  }
  return g;
}

std::string code_list(const GroupSpec& g, const std::vector<Code>& codes) {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < codes.size(); ++k) {
    if (k) os << ',';
    const auto& r = g.decode(codes[k]).residues;
    if (r.size() == 1) {
      os << r[0];
    } else {
      os << '(';
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << ')';
    }
  }
  os << ']';
  return os.str();
}

double mean_entropy(const RVTuple& t) {
  double s = 0.0;
  for (const auto& x : t) s += entropy(x);
  return s / static_cast<double>(t.size());
}

std::int64_t saturating_mul(std::int64_t a, std::int64_t b) {
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  if (a != 0 && b > kMax / a) return kMax;
  return a * b;
}

}  // namespace

// --- endgame ----------------------------------------------------------------

std::vector<GridInstance> grid_instances(const RVTuple& base) {
  const std::size_t m = base.size();
  std::vector<GridInstance> out;
  const char* names[] = {"rows", "anti_diagonals", "diagonals"};
  for (int kind = 0; kind < 3; ++kind) {
    GridInstance gi{names[kind], {}, std::vector<std::vector<std::size_t>>(m, std::vector<std::size_t>(m))};
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<Dist> row;
      for (std::size_t j = 0; j < m; ++j) {
        // Entry (i, j) is Y_{i,j}, Y_{i-j,j} or Y_{i,j-i}; only the row
        // index of Y decides its law.
        const std::size_t src = kind == 1 ? mod(static_cast<std::int64_t>(i) - static_cast<std::int64_t>(j), m) : i;
        gi.base_index[i][j] = src;
        row.push_back(base[src]);
      }
      gi.grid.push_back(std::move(row));
    }
    out.push_back(std::move(gi));
  }
  return out;
}

EndgameLaws build_endgame(const RVTuple& t, std::uint64_t atom_cap) {
  const GroupSpec& g = require_torsion_tuple(t);
  const std::size_t m = t.size();
  std::vector<Dist> members;
  std::vector<LinearMap> maps;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto ii = static_cast<std::int64_t>(i), jj = static_cast<std::int64_t>(j);
      const std::vector<LinearMap> parts{LinearMap::scalar(g, ii), LinearMap::scalar(g, jj),
                                         LinearMap::scalar(g, static_cast<std::int64_t>(mod(-ii - jj, m))),
                                         LinearMap::identity(g)};
      members.push_back(t[i]);
      maps.push_back(LinearMap::stacked(g, parts));
    }
  }
  return EndgameLaws{t, lifted_joint(members, maps, {g, g, g, g}, atom_cap), grid_instances(t)};
}

std::size_t endgame_identity_violations(const EndgameLaws& e) {
  const GroupSpec& g = e.base.front().group();
  std::size_t bad = 0;
  for (const auto& a : e.zjoint.pmf().atoms()) {
    const Code z1 = e.zjoint.coordinate_code(a.code, kZ1);
    const Code z2 = e.zjoint.coordinate_code(a.code, kZ2);
    const Code z3 = e.zjoint.coordinate_code(a.code, kZ3);
    if (g.add(g.add(z1, z2), z3) != g.zero()) ++bad;
  }
  return bad;
}

InfoTriple mutual_info_triple(const EndgameLaws& e) {
  const Coords z1{kZ1}, z2{kZ2}, z3{kZ3}, w{kW};
  return {mutual_info(e.zjoint, z1, z2, w), mutual_info(e.zjoint, z2, z3, w),
          mutual_info(e.zjoint, z1, z3, w)};
}

GridTerms grid_bound(const RVTuple& base, const GridInstance& g, std::uint64_t atom_cap) {
  const std::size_t m = base.size();
  if (g.grid.size() != m || g.base_index.size() != m) throw ShapeError("column certificate invalid");
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<bool> seen(m, false);
    for (std::size_t i = 0; i < m; ++i) {
      if (g.grid[i].size() != m || g.base_index[i].size() != m) throw ShapeError("column certificate invalid");
      const std::size_t src = g.base_index[i][j];
      if (src >= m || seen[src] || !(g.grid[i][j] == base[src])) {
        throw ShapeError("column certificate invalid");
      }
      seen[src] = true;
    }
  }
  return grid_decomposition(g.grid, atom_cap);
}

SlackReport check_grid_bounds(const EndgameLaws& e, std::uint64_t atom_cap) {
  const InfoTriple tri = mutual_info_triple(e);
  std::vector<double> bounds;
  for (std::size_t k = 0; k < e.grids.size(); ++k) {
    // Identical grids have identical terms; the third instance repeats the
    // laws of the first.
    std::optional<double> reuse;
    for (std::size_t l = 0; l < k; ++l) {
      if (e.grids[l].grid == e.grids[k].grid) reuse = bounds[l];
    }
    if (reuse) {
      bounds.push_back(*reuse);
      continue;
    }
    const GridTerms terms = grid_bound(e.base, e.grids[k], atom_cap);
    double b = terms.b;
    for (double a : terms.a) b += a;
    bounds.push_back(b);
  }
  return {"endgame.grid_bounds",
          {ReportPart{"z1_z2", PartKind::Slack, tri.z1_z2, bounds[0]},
           ReportPart{"z3_z2", PartKind::Slack, tri.z2_z3, bounds[1]},
           ReportPart{"z1_z3", PartKind::Slack, tri.z1_z3, bounds[2]}},
          Digest().add(std::span<const Dist>(e.base)).hex()};
}

SlackReport check_endgame_estimate(int item, const EndgameLaws& e) {
  const RVTuple& t = e.base;
  const double m = static_cast<double>(t.size());
  const double k = multidist(t);
  const double log2m = std::log2(m);
  const Coords w{kW}, z2{kZ2};
  const std::string digest = Digest().add(std::span<const Dist>(t)).hex();
  switch (item) {
    case 1:
      return {"endgame.entropy_w",
              {ReportPart{"entropy_w", PartKind::Slack, entropy(e.zjoint, w), (2 * m - 1) * k + mean_entropy(t)}},
              digest};
    case 2:
      return {"endgame.entropy_z2",
              {ReportPart{"entropy_z2", PartKind::Slack, entropy(e.zjoint, z2),
                          28 * (m - 1) * log2m * k + mean_entropy(t)}},
              digest};
    case 3:
      return {"endgame.info_wz2",
              {ReportPart{"info_wz2", PartKind::Slack, mutual_info(e.zjoint, w, z2), 2 * (m - 1) * k}},
              digest};
    case 4: {
      const Coords z2w{kZ2, kW};
      const JointDist pair = e.zjoint.marginal(z2w);
      double lhs = 0.0;
      for (const auto& x : t) lhs += cond_rdist(x, pair);
      return {"endgame.dist_z2",
              {ReportPart{"dist_z2", PartKind::Slack, lhs, 15 * m * m * log2m * k}},
              digest};
    }
    default:
      throw ShapeError("endgame estimate item must be 1..4");
  }
}

SlackReport check_endgame_estimate(int item, const RVTuple& t) {
  return check_endgame_estimate(item, build_endgame(t));
}

// --- slice selection ----------------------------------------------------------

SliceChoice best_slice(const JointDist& t23, std::span<const Dist> ys, double alpha) {
  if (t23.arity() != 2) throw ShapeError("expected the joint (T2, T3)");
  const Coords target{0}, given{1};
  std::optional<SliceChoice> best;
  double average = 0.0;
  for (const auto& sl : slices(t23, target, given)) {
    const Dist u = sl.law.coordinate(0);
    double obj = rdist(u, u);
    for (const auto& y : ys) obj += alpha * rdist(y, u);
    average += sl.prob.get_d() * obj;
    if (!best || obj < best->objective) best = SliceChoice{sl.value, u, obj, 0.0};
  }
  best->average = average;
  return *best;
}

SlackReport check_slice_bound(const JointDist& t123, std::span<const Dist> ys, double alpha) {
  if (t123.arity() != 3) throw ShapeError("expected a joint law of three variables");
  const GroupSpec g = t123.coordinate_groups()[0];
  for (const auto& c : t123.coordinate_groups()) {
    if (!(c == g)) throw ShapeError("coordinates live in different groups");
  }
  for (const auto& a : t123.pmf().atoms()) {
    const Code s = g.add(g.add(t123.coordinate_code(a.code, 0), t123.coordinate_code(a.code, 1)),
                         t123.coordinate_code(a.code, 2));
    if (s != g.zero()) throw ShapeError("coordinates do not sum to zero");
  }
  const Coords c1{0}, c2{1}, c3{2}, c23{1, 2};
  const double delta = mutual_info(t123, c1, c2) + mutual_info(t123, c1, c3) + mutual_info(t123, c2, c3);
  const SliceChoice choice = best_slice(t123.marginal(c23), ys, alpha);
  const Dist t2 = t123.coordinate(1);
  double rhs = (2.0 + alpha * static_cast<double>(ys.size()) / 2.0) * delta;
  for (const auto& y : ys) rhs += alpha * rdist(y, t2);
  Digest dg;
  dg.add(t123).add(ys);
  return {"endgame.slice_bound",
          {ReportPart{"slice_bound", PartKind::Slack, choice.objective, rhs},
           ReportPart{"average_bound", PartKind::Slack, choice.average, rhs},
           ReportPart{"min_below_average", PartKind::Slack, choice.objective, choice.average}},
          dg.hex()};
}

// --- candidates ---------------------------------------------------------------

std::string family_name(Family f) {
  switch (f) {
    case Family::Fibre: return "fibres";
    case Family::Sums: return "sums";
    case Family::Endgame: return "endgame";
  }
  return "?";
}

std::vector<Candidate> candidates_fibres(const RVTuple& t, std::size_t cap, std::uint64_t atom_cap) {
  const GroupSpec& g = require_grid_tuple(t);
  const std::size_t m = t.size();
  const auto grids = grid_instances(t);
  const LinearMap both = LinearMap::stacked(g, std::vector{LinearMap::identity(g), LinearMap::identity(g)});
  const LinearMap second = LinearMap::stacked(g, std::vector{LinearMap::zero(g, g), LinearMap::identity(g)});
  const Coords target{0}, given{1};

  std::vector<Candidate> out;
  // The third grid has the same rows as the first, hence the same fibres.
  for (std::size_t k = 0; k < 2; ++k) {
    const GridInstance& gi = grids[k];
    for (std::size_t j = 0; j + 1 < m; ++j) {
      std::vector<std::vector<Slice>> rows;
      for (std::size_t i = 0; i < m; ++i) {
        std::vector<Dist> members;
        std::vector<LinearMap> maps;
        for (std::size_t l = j; l < m; ++l) {
          members.push_back(gi.grid[i][l]);
          maps.push_back(l == j ? both : second);
        }
        rows.push_back(slices(lifted_joint(members, maps, {g, g}, atom_cap), target, given));
      }
      // Beam over rows keeps exactly the `cap` most likely value tuples.
      struct Partial {
        mpq_class prob;
        std::vector<std::size_t> pick;
      };
      std::vector<Partial> beam{{mpq_class(1), {}}};
      for (const auto& row : rows) {
        std::vector<Partial> next;
        for (const auto& p : beam) {
          for (std::size_t s = 0; s < row.size(); ++s) {
            Partial q{p.prob * row[s].prob, p.pick};
            q.pick.push_back(s);
            next.push_back(std::move(q));
          }
        }
        std::stable_sort(next.begin(), next.end(), [](const Partial& a, const Partial& b) { return a.prob > b.prob; });
        if (next.size() > cap) next.resize(cap);
        beam = std::move(next);
      }
      for (const auto& p : beam) {
        Candidate c{{}, Family::Fibre, "", {}, 1};
        std::vector<Code> ys;
        for (std::size_t i = 0; i < m; ++i) {
          const Slice& sl = rows[i][p.pick[i]];
          c.tuple.push_back(sl.law.coordinate(0));
          c.sigma.push_back(gi.base_index[i][j]);
          ys.push_back(sl.value);
        }
        c.label = "fibre(grid=" + gi.name + ",column=" + std::to_string(j) + ",y=" + code_list(g, ys) + ")";
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

std::vector<Candidate> candidates_sums(const RVTuple& t) {
  require_grid_tuple(t);
  const std::size_t m = t.size();
  const auto grids = grid_instances(t);
  std::vector<Candidate> out;
  for (std::size_t k = 0; k < 2; ++k) {
    const GridInstance& gi = grids[k];
    Candidate c{{}, Family::Sums, "sums(grid=" + gi.name + ")", {}, static_cast<std::int64_t>(m)};
    for (std::size_t i = 0; i < m; ++i) {
      c.tuple.push_back(convolve_all(gi.grid[i]));
      c.sigma.push_back(gi.base_index[i][m - 1]);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> candidates_endgame(const EndgameLaws& e, double eta) {
  const GroupSpec& g = e.base.front().group();
  const std::size_t m = e.base.size();
  const double alpha = eta / static_cast<double>(m);
  const Coords z23{kZ2, kZ3}, w{kW};
  std::vector<std::size_t> identity(m);
  for (std::size_t i = 0; i < m; ++i) identity[i] = i;
  std::vector<Candidate> out;
  for (const auto& sl : slices(e.zjoint, z23, w)) {
    const SliceChoice choice = best_slice(sl.law, e.base, alpha);
    const std::int64_t mm = static_cast<std::int64_t>(m);
    out.push_back(Candidate{RVTuple(m, choice.u), Family::Endgame,
                            "endgame(w=" + code_list(g, {sl.value}) + ",z=" + code_list(g, {choice.z}) + ")",
                            identity, mm * mm * mm});
  }
  return out;
}

double decrement_gain(const RVTuple& base, const Candidate& cand, double eta) {
  if (cand.tuple.size() != base.size() || cand.sigma.size() != base.size()) {
    throw ShapeError("candidate and base tuples differ in size");
  }
  double dist = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) dist += rdist(base.at(cand.sigma[i]), cand.tuple[i]);
  return (1.0 - eta) * multidist(base) - eta * dist - multidist(cand.tuple);
}

// --- iteration ----------------------------------------------------------------

double default_eta(std::size_t m) {
  const double mm = static_cast<double>(m);
  return 1.0 / (100.0 * mm * mm * mm);
}

std::int64_t default_max_steps(std::size_t m, double k0) {
  const double mm = static_cast<double>(m);
  return static_cast<std::int64_t>(std::ceil(10.0 * mm * mm * mm * std::log(2.0 + k0)));
}

std::optional<StepResult> decrement_step(const RVTuple& t, double eta, const DecrementConfig& cfg) {
  std::vector<Candidate> all = candidates_fibres(t, cfg.fibre_cap, cfg.atom_cap);
  for (auto& c : candidates_sums(t)) all.push_back(std::move(c));
  if (is_torsion_for(tuple_group(t), t.size())) {
    for (auto& c : candidates_endgame(build_endgame(t, cfg.atom_cap), eta)) all.push_back(std::move(c));
  }

  std::optional<StepResult> best;
  for (auto& c : all) {
    const double gain = decrement_gain(t, c, eta);
    if (!best || gain > best->gain) best = StepResult{std::move(c), gain, 0};
  }
  if (!best || best->gain < 0.0) return std::nullopt;
  best->evaluated = all.size();
  return best;
}

ElementSet support_hull(const RVTuple& t) {
  const GroupSpec& g = tuple_group(t);
  std::vector<Code> codes{g.zero()};
  for (const auto& x : t) {
    for (Code c : x.support()) {
      codes.push_back(c);
      codes.push_back(g.neg(c));
    }
  }
  return make_set(std::move(codes));
}

std::int64_t least_dilate_containing(const GroupSpec& g, const ElementSet& s, const ElementSet& h) {
  const auto inside = [&](const ElementSet& big) { return std::includes(big.begin(), big.end(), h.begin(), h.end()); };
  ElementSet cur = s;
  for (std::int64_t l = 1;; ++l) {
    if (inside(cur)) return l;
    ElementSet next = sumset(g, cur, s);
    if (next == cur) return -1;
    cur = std::move(next);
  }
}

BaseCase base_case_subgroup(const RVTuple& t, const std::optional<ElementSet>& support_bound) {
  const GroupSpec& g = tuple_group(t);
  std::optional<BaseCase> best;
  // enumerate_subgroups lists by size, then lexicographically, so a strict
  // improvement test gives the required tie-breaking.
  for (const auto& h : enumerate_subgroups(g)) {
    if (support_bound && !h.is_subset_of(*support_bound)) continue;
    const Dist u = uniform_on(h);
    double s = 0.0;
    for (const auto& x : t) s += rdist(x, u);
    if (!best || s < best->sum_dist) best = BaseCase{h, s};
  }
  return *best;
}

MinimizeResult minimize(const RVTuple& t, const DecrementConfig& cfg) {
  const GroupSpec& g = require_grid_tuple(t);
  // The base case enumerates subgroups; fail before the decrement runs.
  if (g.size() > kDefaultSubgroupCap) {
    throw CapExceeded("subgroup-enumeration", "group too large for exhaustive subgroup search");
  }
  const std::size_t m = t.size();
  const double eta = cfg.eta == 0 ? default_eta(m) : cfg.eta.get_d();
  const double k0 = multidist(t);

  DecrementTrace trace;
  trace.eta = eta;
  trace.k0 = k0;
  trace.max_steps = cfg.max_steps > 0 ? cfg.max_steps : default_max_steps(m, k0);

  RVTuple cur = t;
  double d = k0;
  double steps_dist = 0.0;
  std::int64_t factor = 1;
  trace.stop_reason = "converged";
  for (std::int64_t step = 0; d >= cfg.tol; ++step) {
    if (step >= trace.max_steps) {
      trace.stop_reason = "max_steps";
      break;
    }
    auto res = decrement_step(cur, eta, cfg);
    if (!res) {
      trace.stop_reason = "stall";
      break;
    }
    double sd = 0.0;
    for (std::size_t i = 0; i < m; ++i) sd += rdist(cur[res->candidate.sigma[i]], res->candidate.tuple[i]);
    cur = std::move(res->candidate.tuple);
    d = multidist(cur);
    factor = saturating_mul(factor, res->candidate.support_factor);
    steps_dist += sd;
    trace.steps.push_back(
        TraceStep{step + 1, d, family_name(res->candidate.family), res->candidate.label, sd, factor});
  }

  const ElementSet hull = support_hull(t);
  const std::int64_t ell_bound = saturating_mul(6, factor);
  const BaseCase base = base_case_subgroup(cur, dilate(g, hull, ell_bound));
  double direct = 0.0;
  const Dist u = uniform_on(base.subgroup);
  for (const auto& x : t) direct += rdist(x, u);
  return MinimizeResult{cur,
                        trace,
                        base.subgroup,
                        steps_dist + base.sum_dist,
                        direct,
                        ell_bound,
                        least_dilate_containing(g, hull, base.subgroup.elements())};
}

EntropicPfr entropic_pfr(const Dist& x, const Dist& y, const DecrementConfig& cfg) {
  if (!(x.group() == y.group())) throw ShapeError("arguments live in different groups");
  const auto m = static_cast<std::size_t>(x.group().torsion());
  if (m < 2) throw ShapeError("the trivial group has no decrement");
  MinimizeResult run = minimize(RVTuple(m, x), cfg);
  const Dist u = uniform_on(run.subgroup);
  return EntropicPfr{run.subgroup, rdist(x, u), rdist(y, u), run.ell, std::move(run)};
}

}  // namespace tpfr
