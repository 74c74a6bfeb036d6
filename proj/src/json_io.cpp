#include "tpfr/json_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "tpfr/rational.hpp"

namespace tpfr {

namespace {

[[noreturn]] void bad(const std::string& what) { throw FormatError(what); }

const json& member(const json& j, const char* key) {
  if (!j.is_object()) bad(std::string("expected an object with \"") + key + "\"");
  const auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing \"") + key + "\"");
  return *it;
}

const json& array_member(const json& j, const char* key) {
  const json& a = member(j, key);
  if (!a.is_array()) bad(std::string("\"") + key + "\" must be an array");
  return a;
}

std::int64_t integer(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

mpq_class probability(const json& j) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return mpq_class(j.get<long>());
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    bad(std::string("bad probability: ") + e.what());
  }
  bad("probabilities must be \"num/den\" strings or integers");
}

std::string rational_text(const mpz_class& num, const mpz_class& den) {
  mpq_class q(num, den);
  q.canonicalize();
  return format_rational(q);
}

}  // namespace

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    bad("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_json(buf.str());
  } catch (const FormatError& e) {
    bad(path + ": " + e.what());
  }
}

json to_json(const GroupSpec& g) { return json{{"orders", g.orders()}}; }

GroupSpec group_from_json(const json& j) {
  std::vector<std::int64_t> orders;
  for (const auto& o : array_member(j, "orders")) orders.push_back(integer(o, "group order"));
  try {
    return GroupSpec(std::move(orders));
  } catch (const CapExceeded&) {
    throw;
  } catch (const Error& e) {
    bad(std::string("bad group: ") + e.what());
  }
}

json element_to_json(const GroupSpec& g, Code c) { return g.decode(c).residues; }

Code element_from_json(const GroupSpec& g, const json& j) {
  if (!j.is_array() || j.size() != g.rank()) {
    bad("element " + j.dump() + " must be an array of " + std::to_string(g.rank()) + " residues");
  }
  Element x;
  for (const auto& r : j) x.residues.push_back(integer(r, "residue"));
  if (!g.contains(x)) bad("element " + j.dump() + " is not in " + g.to_string());
  return g.encode(x);
}

json to_json(const Dist& d) {
  json pmf = json::array();
  for (const auto& a : d.pmf().atoms()) {
    pmf.push_back({{"x", element_to_json(d.group(), a.code)}, {"p", rational_text(a.weight, d.pmf().total())}});
  }
  return json{{"group", to_json(d.group())}, {"pmf", pmf}};
}

Dist dist_from_json(const json& j, const GroupSpec* fallback) {
  if (!j.is_object()) bad("a distribution must be an object");
  GroupSpec g;
  if (j.contains("group")) {
    g = group_from_json(j["group"]);
  } else if (fallback) {
    g = *fallback;
  } else {
    bad("missing \"group\"");
  }
  std::vector<std::pair<Code, mpq_class>> probs;
  for (const auto& at : array_member(j, "pmf")) {
    probs.emplace_back(element_from_json(g, member(at, "x")), probability(member(at, "p")));
  }
  try {
    return Dist::from_probabilities(g, probs);
  } catch (const CapExceeded&) {
    throw;
  } catch (const Error& e) {
    bad(std::string("bad distribution: ") + e.what());
  }
}

json to_json(const JointDist& j) {
  json groups = json::array();
  for (const auto& g : j.coordinate_groups()) groups.push_back(to_json(g));
  json pmf = json::array();
  for (const auto& a : j.pmf().atoms()) {
    json x = json::array();
    for (std::size_t i = 0; i < j.arity(); ++i) {
      x.push_back(element_to_json(j.coordinate_groups()[i], j.coordinate_code(a.code, i)));
    }
    pmf.push_back({{"x", x}, {"p", rational_text(a.weight, j.pmf().total())}});
  }
  return json{{"groups", groups}, {"pmf", pmf}};
}

JointDist joint_from_json(const json& j) {
  std::vector<GroupSpec> groups;
  for (const auto& g : array_member(j, "groups")) groups.push_back(group_from_json(g));
  if (groups.empty()) bad("a joint law needs at least one coordinate");
  const JointDist shape(groups, Pmf::point(0));
  std::vector<std::pair<Code, mpq_class>> probs;
  mpq_class sum = 0;
  mpz_class den = 1;
  for (const auto& at : array_member(j, "pmf")) {
    const json& x = member(at, "x");
    if (!x.is_array() || x.size() != groups.size()) bad("joint atom " + x.dump() + " has the wrong arity");
    std::vector<Code> parts;
    for (std::size_t i = 0; i < groups.size(); ++i) parts.push_back(element_from_json(groups[i], x[i]));
    const mpq_class p = probability(member(at, "p"));
    if (p <= 0) bad("probabilities must be positive");
    sum += p;
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), p.get_den_mpz_t());
    probs.emplace_back(shape.join(parts), p);
  }
  if (sum != 1) bad("probabilities sum to " + format_rational(sum) + ", not 1");
  std::vector<Atom> atoms;
  for (const auto& [c, p] : probs) atoms.push_back({c, p.get_num() * (den / p.get_den())});
  return JointDist(groups, Pmf::from_weights(std::move(atoms)));
}

json tuple_to_json(const RVTuple& t) {
  json members = json::array();
  for (const auto& d : t) members.push_back(to_json(d));
  return json{{"tuple", members}};
}

RVTuple tuple_from_json(const json& j) {
  std::optional<GroupSpec> common;
  if (j.is_object() && j.contains("group")) common = group_from_json(j["group"]);
  RVTuple t;
  for (const auto& d : array_member(j, "tuple")) t.push_back(dist_from_json(d, common ? &*common : nullptr));
  if (t.empty()) bad("\"tuple\" must be nonempty");
  for (const auto& d : t) {
    if (!(d.group() == t.front().group())) bad("tuple members live in different groups");
  }
  return t;
}

json set_to_json(const GroupSpec& g, const ElementSet& a) {
  json elems = json::array();
  for (Code c : a) elems.push_back(element_to_json(g, c));
  return json{{"group", to_json(g)}, {"elements", elems}};
}

std::pair<GroupSpec, ElementSet> set_from_json(const json& j) {
  GroupSpec g = group_from_json(member(j, "group"));
  std::vector<Code> codes;
  for (const auto& x : array_member(j, "elements")) codes.push_back(element_from_json(g, x));
  if (codes.empty()) bad("\"elements\" must be nonempty");
  return {std::move(g), make_set(std::move(codes))};
}

json to_json(const GroupSpec& g, const CosetCover& c) {
  json sub = json::array(), tr = json::array();
  for (Code x : c.subgroup.elements()) sub.push_back(element_to_json(g, x));
  for (Code x : c.translates) tr.push_back(element_to_json(g, x));
  return json{{"group", to_json(g)},  {"subgroup", sub}, {"translates", tr},
              {"K", format_rational(c.k)}, {"ell", c.ell},   {"count", c.translates.size()}};
}

CosetCover cover_from_json(const GroupSpec& g, const json& j) {
  if (j.is_object() && j.contains("group") && !(group_from_json(j["group"]) == g)) {
    bad("the cover and the set live in different groups");
  }
  std::vector<Code> sub, tr;
  for (const auto& x : array_member(j, "subgroup")) sub.push_back(element_from_json(g, x));
  for (const auto& x : array_member(j, "translates")) tr.push_back(element_from_json(g, x));
  const json& k = member(j, "K");
  if (!k.is_string() && !k.is_number_integer()) bad("\"K\" must be a \"num/den\" string");
  const mpq_class kq = probability(k);
  const std::int64_t ell = integer(member(j, "ell"), "\"ell\"");
  // Subgroup validates closure and throws ShapeError otherwise.
  return CosetCover{Subgroup(g, make_set(std::move(sub))), std::move(tr), kq, ell};
}

json to_json(const SlackReport& r) {
  json parts = json::array();
  for (const auto& p : r.parts) {
    parts.push_back({{"label", p.label},
                     {"kind", p.kind == PartKind::Slack ? "slack" : "residual"},
                     {"lhs", p.lhs},
                     {"rhs", p.rhs}});
  }
  return json{{"name", r.name}, {"parts", parts}, {"inputs_digest", r.inputs_digest}};
}

}  // namespace tpfr
