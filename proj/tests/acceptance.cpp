// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every line passes. Seeds, sizes and tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracle/oracle.hpp"
#include "tpfr/calculus.hpp"
#include "tpfr/decrement.hpp"
#include "tpfr/fuzz.hpp"
#include "tpfr/pfr.hpp"
#include "tpfr/random.hpp"
#include "tpfr/ruzsa.hpp"

using namespace tpfr;

namespace {

constexpr double kSlackTol = 1e-8;
constexpr double kResidualTol = 1e-9;
constexpr double kObjectiveTol = 1e-9;
constexpr double kDilateTol = 1e-10;
constexpr double kZeroD = 1e-12;
constexpr double kBridgeTol = 1e-9;
constexpr std::uint64_t kSeed = 20240402;

struct Verdict {
  bool pass = true;
  std::string detail;
};

GroupSpec Z(std::vector<std::int64_t> o) { return GroupSpec(std::move(o)); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Every slack part >= -kSlackTol and every residual part <= kResidualTol.
bool holds(const SlackReport& r, double* worst_slack, double* worst_residual) {
  *worst_slack = std::min(*worst_slack, r.min_slack());
  *worst_residual = std::max(*worst_residual, r.max_residual());
  return r.min_slack() >= -kSlackTol && r.max_residual() <= kResidualTol;
}

// A random homomorphism from g onto one or two cyclic factors. The entry for
// a source factor of order m into Z/d is a multiple of d / gcd(d, m).
LinearMap random_hom(Rng& rng, const GroupSpec& g) {
  std::vector<std::int64_t> divisors;
  for (std::int64_t d = 2; d <= g.torsion(); ++d) {
    if (g.torsion() % d == 0) divisors.push_back(d);
  }
  const auto rank = rng.uniform(1, 2);
  std::vector<std::int64_t> orders;
  for (std::int64_t r = 0; r < rank; ++r) {
    orders.push_back(divisors[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(divisors.size()) - 1))]);
  }
  std::vector<std::vector<std::int64_t>> matrix;
  for (std::int64_t d : orders) {
    std::vector<std::int64_t> row;
    for (std::int64_t m : g.orders()) {
      const std::int64_t unit = d / std::gcd(d, m);
      row.push_back((unit * rng.uniform(0, d - 1)) % d);
    }
    matrix.push_back(std::move(row));
  }
  return LinearMap(g, GroupSpec(orders), matrix);
}

RVTuple random_tuple(Rng& rng, const GroupSpec& g, std::size_t m) {
  RVTuple t;
  for (std::size_t i = 0; i < m; ++i) t.push_back(random_dist(rng, g));
  return t;
}

const GroupSpec& pick(Rng& rng, const std::vector<GroupSpec>& pool) {
  return pool[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(pool.size()) - 1))];
}

Verdict inequality_fuzz() {
  FuzzConfig cfg;
  cfg.trials = 5000;
  cfg.seed = kSeed;
  cfg.tolerance = kSlackTol;
  const FuzzReport r = run_fuzz(cfg);
  double worst = std::numeric_limits<double>::infinity();
  double resid = 0.0;
  for (const auto& c : r.checks) {
    worst = std::min(worst, c.min_slack);
    resid = std::max(resid, c.max_residual);
  }
  std::string detail = std::to_string(cfg.trials) + " trials x " + std::to_string(r.checks.size()) +
                       " checks, min slack " + fmt(worst) + ", max residual " + fmt(resid) + ", " +
                       std::to_string(r.failures) + " failures";
  for (const auto& c : r.counterexamples) {
    detail += "; " + c.check + " at trial " + std::to_string(c.trial);
  }
  return {r.pass(), detail};
}

Verdict chain_rules() {
  const std::vector<GroupSpec> pool{Z({2}), Z({3}), Z({4}), Z({2, 2}), Z({5}), Z({6}),
                                    Z({7}), Z({8}), Z({2, 4}), Z({2, 2, 2}), Z({9}), Z({3, 3})};
  Rng rng(kSeed + 2);
  double slack = std::numeric_limits<double>::infinity(), resid = 0.0;
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const GroupSpec& g = pick(rng, pool);
    const auto m = static_cast<std::size_t>(rng.uniform(2, 3));
    const RVTuple t = random_tuple(rng, g, m);
    const LinearMap pi = random_hom(rng, g);
    bad += !holds(chain_rule_residual(t, pi), &slack, &resid);
    const GroupSpec side = rng.coin() ? Z({2}) : Z({3});
    std::vector<JointDist> pairs;
    for (std::size_t k = 0; k < m; ++k) pairs.push_back(random_joint(rng, {g, side}));
    bad += !holds(cond_chain_rule_residual(pairs, pi), &slack, &resid);
  }
  for (int i = 0; i < 200; ++i) {
    const GroupSpec& g = pick(rng, pool);
    const RVTuple t = random_tuple(rng, g, static_cast<std::size_t>(rng.uniform(2, 3)));
    const LinearMap first = random_hom(rng, g);
    const std::vector<LinearMap> steps{first, LinearMap::zero(first.target(), GroupSpec())};
    bad += !holds(iterated_chain_slack(t, steps), &slack, &resid);
  }
  return {bad == 0, "1000 single and 1000 conditional decompositions, 200 two-step chains; max residual " +
                        fmt(resid) + ", min slack " + fmt(slack) + ", " + std::to_string(bad) + " failures"};
}

// Criteria 3 and 4 share their instances.
struct GridRun {
  Verdict bounds;
  Verdict identity;
};

GridRun grid_bounds() {
  const std::vector<GroupSpec> pool{Z({2}), Z({3}), Z({2, 2}), Z({3, 3})};
  Rng rng(kSeed + 3);
  double slack = std::numeric_limits<double>::infinity(), resid = 0.0;
  int bad = 0;
  std::size_t violations = 0, atoms = 0;
  for (int i = 0; i < 200; ++i) {
    const GroupSpec& g = pick(rng, pool);
    const RVTuple t = random_tuple(rng, g, static_cast<std::size_t>(g.torsion()));
    const EndgameLaws e = build_endgame(t);
    bad += !holds(check_grid_bounds(e), &slack, &resid);
    violations += endgame_identity_violations(e);
    atoms += e.zjoint.pmf().size();
  }
  return {{bad == 0, "200 tuples x 3 grids, min slack " + fmt(slack) + ", " + std::to_string(bad) + " failures"},
          {violations == 0, std::to_string(violations) + " atoms with Z1 + Z2 + Z3 != 0 out of " +
                                std::to_string(atoms) + " (exact codes)"}};
}

// (T1, T2, -T1 - T2) from a random joint (T1, T2).
JointDist zero_sum_triple(Rng& rng, const GroupSpec& g) {
  const JointDist pair = random_joint(rng, {g, g});
  const JointDist shape({g, g, g}, Pmf::point(0));
  std::vector<Atom> atoms;
  for (const auto& a : pair.pmf().atoms()) {
    const Code t1 = pair.coordinate_code(a.code, 0), t2 = pair.coordinate_code(a.code, 1);
    const Code parts[] = {t1, t2, g.neg(g.add(t1, t2))};
    atoms.push_back({shape.join(parts), a.weight});
  }
  return JointDist({g, g, g}, Pmf::from_weights(std::move(atoms)));
}

Verdict slice_bound() {
  Rng rng(kSeed + 5);
  const auto pool = default_fuzz_pool();
  double slack = std::numeric_limits<double>::infinity(), resid = 0.0;
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const GroupSpec& g = pick(rng, pool);
    const JointDist t = zero_sum_triple(rng, g);
    const RVTuple ys = random_tuple(rng, g, static_cast<std::size_t>(rng.uniform(1, 3)));
    const double alpha = static_cast<double>(rng.uniform(1, 100)) / 100.0;
    bad += !holds(check_slice_bound(t, ys, alpha), &slack, &resid);
  }
  return {bad == 0, "200 triples, min slack " + fmt(slack) + ", " + std::to_string(bad) + " failures"};
}

std::vector<oracle::Law> laws(const RVTuple& t) {
  std::vector<oracle::Law> out;
  for (const auto& x : t) out.push_back(oracle::from(x));
  return out;
}

Verdict decrement_corpus() {
  const std::vector<GroupSpec> groups{Z({2}), Z({2, 2}), Z({4}), Z({3})};
  Rng rng(kSeed + 6);
  int bad = 0, stalls = 0, steps = 0;
  std::string first_bad;
  for (int i = 0; i < 50; ++i) {
    const GroupSpec& g = groups[static_cast<std::size_t>(i) % groups.size()];
    const auto m = static_cast<std::size_t>(g.torsion());
    RVTuple t = random_tuple(rng, g, m);
    // Every fifth tuple starts at a point mass or a subgroup-uniform law.
    if (i % 5 == 4) t[0] = uniform_on(enumerate_subgroups(g).back());
    const MinimizeResult r = minimize(t);
    double prev = multidist(t);
    bool ok = true;
    for (const auto& s : r.trace.steps) {
      ok &= s.d <= prev;
      prev = s.d;
    }
    const auto bound = static_cast<std::size_t>(default_max_steps(m, r.trace.k0));
    ok &= r.trace.steps.size() <= bound || r.trace.stop_reason == "stall";
    ok &= r.trace.stop_reason != "max_steps";
    double achieved = 0.0;
    const Dist u = uniform_on(r.subgroup);
    for (const auto& x : r.final_tuple) achieved += rdist(x, u);
    ok &= std::abs(achieved - oracle::best_subgroup_objective(laws(r.final_tuple))) <= kObjectiveTol;
    stalls += r.trace.stop_reason == "stall";
    steps += static_cast<int>(r.trace.steps.size());
    if (!ok && first_bad.empty()) first_bad = "; first failure at tuple " + std::to_string(i);
    bad += !ok;
  }
  return {bad == 0, "50 tuples, " + std::to_string(steps) + " accepted steps, " + std::to_string(stalls) +
                        " stalls, " + std::to_string(bad) + " failures" + first_bad};
}

Verdict degenerate_recovery() {
  int cases = 0, bad = 0;
  for (const auto& g : default_fuzz_pool()) {
    for (const auto& h : enumerate_subgroups(g)) {
      ++cases;
      const RVTuple t(static_cast<std::size_t>(g.torsion()), uniform_on(h));
      const MinimizeResult r = minimize(t);
      const bool ok = multidist(t) <= kZeroD && r.trace.steps.empty() && r.subgroup == h && r.sum_dist <= kResidualTol;
      bad += !ok;
    }
  }
  return {bad == 0, std::to_string(cases) + " subgroups, " + std::to_string(bad) + " failures"};
}

Verdict pfr_covers() {
  std::vector<std::pair<GroupSpec, ElementSet>> inputs;
  const GroupSpec f23 = Z({2, 2, 2});
  for (unsigned mask = 0; mask < 128; ++mask) {
    if (std::popcount(mask) > 4) continue;
    ElementSet a{0};
    for (Code c = 1; c < 8; ++c) {
      if (mask >> (c - 1) & 1) a.push_back(c);
    }
    inputs.emplace_back(f23, a);
  }
  const std::size_t exhaustive = inputs.size();
  Rng rng(kSeed + 8);
  for (const auto& g : {Z({2, 2, 2, 2}), Z({4, 4})}) {
    for (int i = 0; i < 250; ++i) {
      // Density between 1/8 and 7/8; the set need not contain 0.
      const auto num = rng.uniform(1, 7);
      ElementSet a;
      for (Code c = 0; c < g.size(); ++c) {
        if (rng.uniform(1, 8) <= num) a.push_back(c);
      }
      if (a.empty()) a.push_back(static_cast<Code>(rng.uniform(0, static_cast<std::int64_t>(g.size()) - 1)));
      inputs.emplace_back(g, a);
    }
  }
  int bad_cover = 0, bad_bridge = 0;
  double worst_ratio = 0.0, ratio_sum = 0.0;
  int ratios = 0, within = 0;
  for (const auto& [g, a] : inputs) {
    const PfrResult r = pfr_cover(g, a);
    const CoverReport rep = verify_cover(g, a, r.cover);
    bad_cover += !rep.pass();
    bad_bridge += !(r.bridge.distance <= r.bridge.log_k + kBridgeTol);
    within += r.count_within_bound;
    if (rep.optimal_count) {
      const double q = static_cast<double>(r.cover.translates.size()) / static_cast<double>(*rep.optimal_count);
      worst_ratio = std::max(worst_ratio, q);
      ratio_sum += q;
      ++ratios;
    }
  }
  return {bad_cover == 0 && bad_bridge == 0,
          std::to_string(exhaustive) + " exhaustive + " + std::to_string(inputs.size() - exhaustive) +
              " seeded sets; " + std::to_string(bad_cover) + " rejected covers, " + std::to_string(bad_bridge) +
              " bridge violations; count/optimal mean " + fmt(ratio_sum / ratios) + ", max " + fmt(worst_ratio) +
              " (reported); " + std::to_string(within) + " within (2K)^(12 m^3)"};
}

Verdict dilate_oracle() {
  Rng rng(kSeed + 9);
  const auto pool = default_fuzz_pool();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const GroupSpec& g = pick(rng, pool);
    const Dist x = random_dist(rng, g), y = random_dist(rng, g);
    const std::int64_t a = rng.uniform(-8, 8);
    const oracle::Law lx = oracle::from(x), ly = oracle::from(y);
    const double want = oracle::H_dilate(lx, ly, a) - oracle::H(lx);
    worst = std::max(worst, std::abs(check_dilate(x, y, a).parts[0].lhs - want));
  }
  return {worst <= kDilateTol, "100 pairs, |a| <= 8, max deviation " + fmt(worst)};
}

}  // namespace

int main() {
  struct Line {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  GridRun grid;
  const std::vector<Line> lines{
      {1, "inequality fuzz", inequality_fuzz},
      {2, "chain-rule identities", chain_rules},
      {3, "grid mutual-information bounds", [&] { return (grid = grid_bounds()).bounds; }},
      {4, "endgame zero-sum identity", [&] { return grid.identity; }},
      {5, "best-slice bound", slice_bound},
      {6, "decrement loop on the fixed corpus", decrement_corpus},
      {7, "recovery of subgroup-uniform tuples", degenerate_recovery},
      {8, "coset covers", pfr_covers},
      {9, "dilate increment against brute force", dilate_oracle},
  };
  bool all = true;
  for (const auto& l : lines) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = l.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all &= v.pass;
    std::printf("%s  %d  %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", l.id, l.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
