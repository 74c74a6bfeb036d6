#include "tpfr/fuzz.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "tpfr/calculus.hpp"
#include "tpfr/decrement.hpp"
#include "tpfr/errors.hpp"
#include "tpfr/random.hpp"

namespace tpfr {

namespace {

// Inputs of one check, recorded only when a dump is wanted.
class Recorder {
 public:
  explicit Recorder(json* out) : out_(out) {}
  const Dist& dist(const char* key, const Dist& d) {
    if (out_) (*out_)[key] = to_json(d);
    return d;
  }
  const JointDist& joint(const char* key, const JointDist& j) {
    if (out_) (*out_)[key] = to_json(j);
    return j;
  }
  const RVTuple& tuple(const char* key, const RVTuple& t) {
    if (out_) (*out_)[key] = tuple_to_json(t)["tuple"];
    return t;
  }
  template <class T>
  const T& value(const char* key, const T& v) {
    if (out_) (*out_)[key] = v;
    return v;
  }

 private:
  json* out_;
};

struct Trial {
  Rng& rng;
  const GroupSpec& g;
  const FuzzConfig& cfg;
  Recorder rec;

  Dist dist() { return random_dist(rng, g); }
  RVTuple tuple(std::size_t lo) {
    const auto n = static_cast<std::size_t>(rng.uniform(static_cast<std::int64_t>(lo),
                                                        static_cast<std::int64_t>(cfg.max_tuple)));
    RVTuple t;
    for (std::size_t i = 0; i < n; ++i) t.push_back(dist());
    return t;
  }
  JointDist joint(std::size_t arity) { return random_joint(rng, std::vector<GroupSpec>(arity, g)); }
};

using CheckFn = std::function<SlackReport(Trial&)>;

struct Entry {
  std::string name;
  CheckFn run;
  bool hidden = false;
};

FunctionTable random_table(Rng& rng, const GroupSpec& source) {
  static const std::vector<GroupSpec> targets{GroupSpec({2}), GroupSpec({3})};
  const auto pick = rng.uniform(0, 2);
  FunctionTable f{pick == 2 ? source : targets[static_cast<std::size_t>(pick)], {}};
  const auto top = static_cast<std::int64_t>(f.target.size()) - 1;
  for (Code c = 0; c < source.size(); ++c) f.values.push_back(static_cast<Code>(rng.uniform(0, top)));
  return f;
}

SlackReport endgame_item(Trial& t, int item) {
  // m = torsion so that the endgame is defined.
  RVTuple base;
  for (std::int64_t i = 0; i < t.g.torsion(); ++i) base.push_back(t.dist());
  return check_endgame_estimate(item, t.rec.tuple("tuple", base));
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back({"ruzsa.triangle", [](Trial& t) {
                   const Dist x = t.dist(), y = t.dist(), z = t.dist();
                   return check_triangle(t.rec.dist("x", x), t.rec.dist("y", y), t.rec.dist("z", z));
                 }});
    e.push_back({"ruzsa.sum_lower", [](Trial& t) { return check_sum_lower(t.rec.joint("xy", t.joint(2))); }});
    e.push_back({"ruzsa.bsg", [](Trial& t) { return check_bsg(t.rec.joint("xy", t.joint(2))); }});
    e.push_back({"ruzsa.diff_triangle", [](Trial& t) {
                   const JointDist xz = t.joint(2);
                   const Dist y = t.dist();
                   return check_difference_triangle(t.rec.joint("xz", xz), t.rec.dist("y", y));
                 }});
    e.push_back({"ruzsa.negation", [](Trial& t) {
                   const Dist x = t.dist(), y = t.dist();
                   return check_negation(t.rec.dist("x", x), t.rec.dist("y", y));
                 }});
    e.push_back({"ruzsa.conditioning", [](Trial& t) {
                   const Dist x = t.dist();
                   const JointDist yz = t.joint(2);
                   return check_conditioning(t.rec.dist("x", x), t.rec.joint("yz", yz));
                 }});
    e.push_back({"ruzsa.sum_conditioning", [](Trial& t) {
                   const Dist x = t.dist(), y = t.dist(), z = t.dist();
                   return check_sum_conditioning(t.rec.dist("x", x), t.rec.dist("y", y), t.rec.dist("z", z));
                 }});
    e.push_back({"ruzsa.kv", [](Trial& t) {
                   const Dist x = t.dist();
                   const RVTuple ys = t.tuple(1);
                   return check_kv(t.rec.dist("x", x), t.rec.tuple("ys", ys));
                 }});
    e.push_back({"ruzsa.kv_sharp", [](Trial& t) {
                   const Dist x = t.dist();
                   const RVTuple ys = t.tuple(1);
                   return check_kv_sharp(t.rec.dist("x", x), t.rec.tuple("ys", ys));
                 }});
    e.push_back({"multi.sum_vs_member", [](Trial& t) {
                   const RVTuple xs = t.tuple(2);
                   const Dist y = t.dist();
                   const auto i0 = static_cast<std::size_t>(t.rng.uniform(0, static_cast<std::int64_t>(xs.size()) - 1));
                   return check_sum_vs_member(t.rec.tuple("xs", xs), t.rec.dist("y", y), t.rec.value("i0", i0));
                 }});
    e.push_back({"multi.sum_domination", [](Trial& t) {
                   const RVTuple xs = t.tuple(2);
                   const RVTuple ys = t.tuple(1);
                   std::vector<std::size_t> f;
                   for (std::size_t j = 0; j < ys.size(); ++j) {
                     f.push_back(static_cast<std::size_t>(t.rng.uniform(0, static_cast<std::int64_t>(xs.size()) - 1)));
                   }
                   return check_sum_domination(t.rec.tuple("xs", xs), t.rec.tuple("ys", ys), t.rec.value("f", f));
                 }});
    e.push_back({"multi.sum_self_distance",
                 [](Trial& t) { return check_sum_self_distance(t.rec.tuple("xs", t.tuple(2))); }});
    e.push_back({"multi.pairwise", [](Trial& t) { return check_pairwise(t.rec.tuple("xs", t.tuple(2))); }});
    e.push_back({"multi.self", [](Trial& t) { return check_self_distances(t.rec.tuple("xs", t.tuple(2))); }});
    e.push_back({"multi.identical", [](Trial& t) {
                   const Dist x = t.dist();
                   const auto n = static_cast<std::size_t>(t.rng.uniform(2, static_cast<std::int64_t>(t.cfg.max_tuple)));
                   return check_identical(t.rec.tuple("xs", RVTuple(n, x)));
                 }});
    e.push_back({"dilate", [](Trial& t) {
                   const Dist x = t.dist(), y = t.dist();
                   const std::int64_t a = t.rng.uniform(-8, 8);
                   return check_dilate(t.rec.dist("x", x), t.rec.dist("y", y), t.rec.value("a", a));
                 }});
    e.push_back({"data_processing", [](Trial& t) {
                   const JointDist j = t.joint(3);
                   const FunctionTable f = random_table(t.rng, t.g), h = random_table(t.rng, t.g);
                   std::vector<std::size_t> given;
                   if (t.rng.coin()) given.push_back(2);
                   t.rec.joint("xyz", j);
                   t.rec.value("given", given);
                   t.rec.value("f", f.values);
                   t.rec.value("g", h.values);
                   return check_data_processing(j, 0, 1, given, f, h);
                 }});
    e.push_back({"endgame.entropy_w", [](Trial& t) { return endgame_item(t, 1); }});
    e.push_back({"endgame.entropy_z2", [](Trial& t) { return endgame_item(t, 2); }});
    e.push_back({"endgame.info_wz2", [](Trial& t) { return endgame_item(t, 3); }});
    e.push_back({"endgame.dist_z2", [](Trial& t) { return endgame_item(t, 4); }});
    // Harness self-test: the triangle report with every slack reversed.
    e.push_back({"negated",
                 [](Trial& t) {
                   const Dist x = t.dist(), y = t.dist(), z = t.dist();
                   SlackReport r = check_triangle(t.rec.dist("x", x), t.rec.dist("y", y), t.rec.dist("z", z));
                   r.name = "negated";
                   for (auto& p : r.parts) {
                     if (p.kind == PartKind::Slack) std::swap(p.lhs, p.rhs);
                   }
                   return r;
                 },
                 true});
    return e;
  }();
  return entries;
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool selected(const Entry& e, const std::vector<std::string>& filter) {
  if (filter.empty()) return !e.hidden;
  return std::any_of(filter.begin(), filter.end(), [&](const std::string& f) {
    if (f == e.name) return true;
    return !e.hidden && !f.empty() && f.back() == '.' && e.name.starts_with(f);
  });
}

void validate(const FuzzConfig& cfg) {
  if (cfg.trials < 1) throw ShapeError("trials must be at least 1");
  if (!(cfg.tolerance > 0)) throw ShapeError("tolerance must be positive");
  if (cfg.pool.empty()) throw ShapeError("the group pool is empty");
  if (cfg.max_tuple < 2) throw ShapeError("max tuple size must be at least 2");
  for (const auto& f : cfg.checks) {
    const bool known = std::any_of(registry().begin(), registry().end(), [&](const Entry& e) {
      return f == e.name || (!f.empty() && f.back() == '.' && e.name.starts_with(f));
    });
    if (!known) throw ShapeError("unknown check '" + f + "'");
  }
}

SlackReport run_entry(const Entry& e, std::uint64_t seed, const GroupSpec& g, const FuzzConfig& cfg,
                      json* inputs) {
  Rng rng(seed);
  Trial t{rng, g, cfg, Recorder(inputs)};
  return e.run(t);
}

}  // namespace

std::vector<GroupSpec> default_fuzz_pool() {
  return {GroupSpec({2}), GroupSpec({3}), GroupSpec({4}),   GroupSpec({2, 2}),
          GroupSpec({5}), GroupSpec({2, 4}), GroupSpec({3, 3})};
}

std::vector<std::string> fuzz_check_names(bool include_hidden) {
  std::vector<std::string> out;
  for (const auto& e : registry()) {
    if (include_hidden || !e.hidden) out.push_back(e.name);
  }
  return out;
}

FuzzReport run_fuzz(const FuzzConfig& cfg) {
  validate(cfg);
  std::vector<const Entry*> active;
  for (const auto& e : registry()) {
    if (selected(e, cfg.checks)) active.push_back(&e);
  }
  FuzzReport rep;
  for (const auto* e : active) rep.checks.push_back(CheckSummary{e->name});

  const auto pool_top = static_cast<std::int64_t>(cfg.pool.size()) - 1;
  for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed = trial_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    Rng pick(tseed);
    const GroupSpec& g = cfg.pool[static_cast<std::size_t>(pick.uniform(0, pool_top))];
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Entry& e = *active[k];
      const std::uint64_t cseed = trial_seed(tseed, name_hash(e.name));
      const SlackReport r = run_entry(e, cseed, g, cfg, nullptr);
      CheckSummary& s = rep.checks[k];
      ++s.runs;
      s.min_slack = std::min(s.min_slack, r.min_slack());
      s.max_residual = std::max(s.max_residual, r.max_residual());
      if (r.pass(cfg.tolerance)) continue;
      ++s.failures;
      ++rep.failures;
      if (rep.counterexamples.size() < cfg.max_dumps) {
        json inputs = json::object();
        run_entry(e, cseed, g, cfg, &inputs);
        rep.counterexamples.push_back(Counterexample{trial, cseed, g, e.name, std::move(inputs), r});
      }
    }
  }
  return rep;
}

json to_json(const FuzzConfig& cfg, const FuzzReport& r) {
  json pool = json::array();
  for (const auto& g : cfg.pool) pool.push_back(to_json(g));
  json checks = json::array();
  for (const auto& s : r.checks) {
    checks.push_back({{"name", s.name},
                      {"runs", s.runs},
                      {"failures", s.failures},
                      {"min_slack", s.min_slack == std::numeric_limits<double>::infinity() ? json() : json(s.min_slack)},
                      {"max_residual", s.max_residual}});
  }
  json dumps = json::array();
  for (const auto& c : r.counterexamples) {
    dumps.push_back({{"trial", c.trial},
                     {"seed", c.trial_seed},
                     {"group", to_json(c.group)},
                     {"check", c.check},
                     {"inputs", c.inputs},
                     {"report", to_json(c.report)}});
  }
  return json{{"seed", cfg.seed},       {"trials", cfg.trials}, {"tolerance", cfg.tolerance},
              {"max_tuple", cfg.max_tuple}, {"pool", pool},      {"checks", checks},
              {"failures", r.failures}, {"counterexamples", dumps}, {"pass", r.pass()}};
}

}  // namespace tpfr
