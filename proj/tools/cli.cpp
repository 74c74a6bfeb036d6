#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "tpfr/decrement.hpp"
#include "tpfr/entropy.hpp"
#include "tpfr/errors.hpp"
#include "tpfr/fuzz.hpp"
#include "tpfr/json_io.hpp"
#include "tpfr/pfr.hpp"
#include "tpfr/rational.hpp"
#include "tpfr/ruzsa.hpp"

namespace tpfr {

namespace {

struct DecrementFlags {
  std::string eta;
  double tol = 1e-9;
  std::int64_t max_steps = 0;
  std::uint64_t cap_atoms = kDefaultAtomCap;
  std::size_t fibre_cap = kDefaultFibreCap;

  void attach(CLI::App* app) {
    app->add_option("--eta", eta, "Decrement weight as num/den (default 1/(100 m^3))");
    app->add_option("--tol", tol, "Stop once D falls below this")->check(CLI::NonNegativeNumber);
    app->add_option("--max-steps", max_steps, "Step limit (default ceil(10 m^3 log(2 + D0)))")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--cap-atoms", cap_atoms, "Largest intermediate law, in atoms")->check(CLI::PositiveNumber);
    app->add_option("--fibre-cap", fibre_cap, "Fibre candidates kept per grid column")->check(CLI::PositiveNumber);
  }

  DecrementConfig config() const {
    DecrementConfig c;
    if (!eta.empty()) {
      c.eta = parse_rational(eta);
      if (c.eta <= 0 || c.eta >= 1) throw ShapeError("--eta must lie strictly between 0 and 1");
    }
    c.tol = tol;
    c.max_steps = max_steps;
    c.atom_cap = cap_atoms;
    c.fibre_cap = fibre_cap;
    return c;
  }
};

// Writes to --out when given, else to the command's stdout.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& out) : out_(&out) {
    if (path.empty()) return;
    file_.open(path, std::ios::binary);
    if (!file_) throw FormatError("cannot write " + path);
    out_ = &file_;
  }
  std::ostream& stream() { return *out_; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

json subgroup_json(const Subgroup& h) {
  json a = json::array();
  for (Code c : h.elements()) a.push_back(element_to_json(h.parent(), c));
  return a;
}

int cmd_fuzz(FuzzConfig cfg, const std::string& out_path, bool list, std::ostream& out) {
  if (list) {
    for (const auto& n : fuzz_check_names()) out << n << '\n';
    return kExitPass;
  }
  const FuzzReport r = run_fuzz(cfg);
  Sink sink(out_path, out);
  sink.stream() << to_json(cfg, r).dump(2) << '\n';
  if (sink.to_file()) {
    out << "fuzz: " << cfg.trials << " trials, " << r.checks.size() << " checks, " << r.failures << " failures\n";
  }
  return r.pass() ? kExitPass : kExitViolation;
}

int cmd_decrement(const std::string& input, const DecrementFlags& flags, const std::string& out_path,
                  std::ostream& out) {
  const RVTuple t = tuple_from_json(read_json_file(input));
  const DecrementConfig cfg = flags.config();
  const MinimizeResult r = minimize(t, cfg);
  Sink sink(out_path, out);
  std::ostream& s = sink.stream();
  for (const auto& st : r.trace.steps) {
    s << json{{"t", st.t},
              {"D", st.d},
              {"family", st.family},
              {"sum_dist_step", st.sum_dist_step},
              {"support_factor", st.support_factor},
              {"candidate", st.label}}
             .dump()
      << '\n';
  }
  const double d_final = r.trace.steps.empty() ? r.trace.k0 : r.trace.steps.back().d;
  s << json{{"summary",
             {{"stop_reason", r.trace.stop_reason},
              {"steps", r.trace.steps.size()},
              {"eta", r.trace.eta},
              {"D0", r.trace.k0},
              {"D", d_final},
              {"max_steps", r.trace.max_steps},
              {"subgroup", subgroup_json(r.subgroup)},
              {"sum_dist", r.sum_dist},
              {"sum_dist_direct", r.sum_dist_direct},
              {"ell_bound", r.ell_bound},
              {"ell", r.ell},
              {"final_tuple", tuple_to_json(r.final_tuple)["tuple"]}}}}
           .dump()
    << '\n';
  return kExitPass;
}

void print_report(const CoverReport& rep, std::ostream& s) {
  for (const auto& c : rep.checks) {
    s << (c.pass ? "PASS" : (c.hard ? "FAIL" : "WARN")) << "  " << c.name;
    if (!c.detail.empty()) s << "  " << c.detail;
    s << '\n';
  }
  s << (rep.pass() ? "cover verified" : "cover rejected") << '\n';
}

int cmd_pfr(const std::string& input, const DecrementFlags& flags, double count_exponent,
            const std::string& out_path, std::ostream& out, std::ostream& err) {
  const auto [g, a] = set_from_json(read_json_file(input));
  PfrConfig cfg;
  cfg.decrement = flags.config();
  cfg.count_exponent = count_exponent;
  const PfrResult r = pfr_cover(g, a, cfg);
  const CoverReport rep = verify_cover(g, a, r.cover);
  Sink sink(out_path, out);
  sink.stream() << to_json(g, r.cover).dump() << '\n';
  std::ostream& summary = sink.to_file() ? out : err;
  summary << "K = " << format_rational(r.cover.k) << ", d[U_A; -U_A] = " << r.bridge.distance
          << ", log K = " << r.bridge.log_k << '\n';
  summary << "found |H| = " << r.found.size() << " after " << r.run.trace.steps.size() << " steps ("
          << r.run.trace.stop_reason << "), subdivided to |H| = " << r.cover.subgroup.size() << '\n';
  summary << "count = " << r.cover.translates.size() << ", log count bound = " << r.log_count_bound
          << (r.count_within_bound ? " (within)" : " (exceeded)") << '\n';
  print_report(rep, summary);
  return rep.pass() ? kExitPass : kExitViolation;
}

int cmd_verify(const std::string& set_path, const std::string& cover_path, std::ostream& out) {
  const auto [g, a] = set_from_json(read_json_file(set_path));
  const json cj = read_json_file(cover_path);
  std::optional<CosetCover> cover;
  try {
    cover = cover_from_json(g, cj);
  } catch (const FormatError&) {
    throw;
  } catch (const ShapeError& e) {
    out << "FAIL  subgroup  " << e.what() << "\ncover rejected\n";
    return kExitViolation;
  }
  const CoverReport rep = verify_cover(g, a, *cover);
  print_report(rep, out);
  return rep.pass() ? kExitPass : kExitViolation;
}

int cmd_entropy(const std::string& input, std::ostream& out) {
  const json j = read_json_file(input);
  const double h = j.is_object() && j.contains("groups") ? entropy(joint_from_json(j)) : entropy(dist_from_json(j));
  out << json{{"entropy", h}}.dump() << '\n';
  return kExitPass;
}

int cmd_rdist(const std::string& x, const std::string& y, std::ostream& out) {
  const Dist a = dist_from_json(read_json_file(x));
  const Dist b = dist_from_json(read_json_file(y));
  if (!(a.group() == b.group())) throw ShapeError("the two laws live in different groups");
  out << json{{"rdist", rdist(a, b)}}.dump() << '\n';
  return kExitPass;
}

int cmd_multidist(const std::string& input, std::ostream& out) {
  const RVTuple t = tuple_from_json(read_json_file(input));
  out << json{{"multidist", multidist(t)}}.dump() << '\n';
  return kExitPass;
}

std::vector<GroupSpec> parse_pool(const std::vector<std::string>& specs) {
  std::vector<GroupSpec> pool;
  for (const auto& s : specs) {
    std::vector<std::int64_t> orders;
    std::size_t pos = 0;
    while (pos <= s.size()) {
      const std::size_t next = s.find('x', pos);
      const std::string part = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      try {
        std::size_t used = 0;
        orders.push_back(std::stoll(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::logic_error&) {
        throw ShapeError("bad group '" + s + "'; write orders like 2x4");
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    pool.emplace_back(std::move(orders));
  }
  return pool;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy inequalities, the multidistance decrement and coset covers over finite abelian groups"};
  app.name("tpfr");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every command");

  std::function<int()> action;

  FuzzConfig fuzz;
  std::string fuzz_out;
  std::vector<std::string> pool;
  bool list = false;
  auto* f = app.add_subcommand("fuzz", "Check every registered inequality on seeded random laws");
  f->add_option("--seed", fuzz.seed, "Master seed");
  f->add_option("--trials", fuzz.trials, "Number of trials")->check(CLI::PositiveNumber);
  f->add_option("--tolerance", fuzz.tolerance, "Largest negative slack tolerated")->check(CLI::PositiveNumber);
  f->add_option("--checks", fuzz.checks, "Check names or prefixes ending in '.' (comma separated)")->delimiter(',');
  f->add_option("--groups", pool, "Group pool, e.g. 2,2x2,3x3 (default: the standard pool)")->delimiter(',');
  f->add_option("--max-tuple", fuzz.max_tuple, "Largest tuple for multi-member checks")->check(CLI::Range(2, 8));
  f->add_option("--max-dumps", fuzz.max_dumps, "Counterexamples kept in the report");
  f->add_option("--out", fuzz_out, "Write the report here instead of stdout");
  f->add_flag("--list", list, "List the registered checks");
  f->callback([&] {
    action = [&] {
      if (!pool.empty()) fuzz.pool = parse_pool(pool);
      return cmd_fuzz(fuzz, fuzz_out, list, out);
    };
  });

  DecrementFlags dflags;
  std::string dec_in, dec_out;
  auto* d = app.add_subcommand("decrement", "Run the multidistance decrement on a tuple");
  d->add_option("input", dec_in, "Tuple file")->required();
  dflags.attach(d);
  d->add_option("--out", dec_out, "Write the trace here instead of stdout");
  d->callback([&] { action = [&] { return cmd_decrement(dec_in, dflags, dec_out, out); }; });

  DecrementFlags pflags;
  std::string pfr_in, pfr_out;
  double count_exponent = 12.0;
  auto* p = app.add_subcommand("pfr", "Cover a set by cosets of a subgroup and verify the cover");
  p->add_option("input", pfr_in, "Set file")->required();
  pflags.attach(p);
  p->add_option("--count-exponent", count_exponent, "C in the reported bound count <= (2K)^(C m^3)");
  p->add_option("--out", pfr_out, "Write the cover here instead of stdout");
  p->callback([&] { action = [&] { return cmd_pfr(pfr_in, pflags, count_exponent, pfr_out, out, err); }; });

  std::string v_set, v_cover;
  auto* v = app.add_subcommand("verify-cover", "Check a coset cover of a set");
  v->add_option("set", v_set, "Set file")->required();
  v->add_option("cover", v_cover, "Cover file")->required();
  v->callback([&] { action = [&] { return cmd_verify(v_set, v_cover, out); }; });

  std::string e_in;
  auto* e = app.add_subcommand("entropy", "Entropy of a law or joint law, in nats");
  e->add_option("input", e_in, "Distribution or joint file")->required();
  e->callback([&] { action = [&] { return cmd_entropy(e_in, out); }; });

  std::string r_x, r_y;
  auto* r = app.add_subcommand("rdist", "Ruzsa distance between two laws");
  r->add_option("x", r_x, "First distribution file")->required();
  r->add_option("y", r_y, "Second distribution file")->required();
  r->callback([&] { action = [&] { return cmd_rdist(r_x, r_y, out); }; });

  std::string m_in;
  auto* m = app.add_subcommand("multidist", "Multidistance of a tuple");
  m->add_option("input", m_in, "Tuple file")->required();
  m->callback([&] { action = [&] { return cmd_multidist(m_in, out); }; });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    return action();
  } catch (const CapExceeded& ex) {
    err << "cap exceeded: " << ex.cap() << ": " << ex.what() << '\n';
    return kExitCap;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::bad_alloc&) {
    err << "cap exceeded: memory\n";
    return kExitCap;
  }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace tpfr
