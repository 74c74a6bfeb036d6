#pragma once

// JSON forms of groups, laws, sets, covers and reports. Elements are arrays
// of residues; probabilities are "num/den" strings (integers are accepted on
// input).
//
//   group  {"orders":[2,4]}
//   dist   {"group":G,"pmf":[{"x":[0,1],"p":"1/2"},...]}
//   joint  {"groups":[G,...],"pmf":[{"x":[[..],[..]],"p":"1/4"},...]}
//   tuple  {"tuple":[dist,...]}; members may omit "group" when the tuple
//          has a top-level "group"
//   set    {"group":G,"elements":[[..],...]}
//   cover  {"group":G,"subgroup":[[..]],"translates":[[..]],"K":"3/2","ell":1,"count":2}

#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "tpfr/calculus.hpp"
#include "tpfr/dist.hpp"
#include "tpfr/errors.hpp"
#include "tpfr/group.hpp"
#include "tpfr/pfr.hpp"

namespace tpfr {

using json = nlohmann::ordered_json;

/// Malformed input text or a document of the wrong shape.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Parses JSON text; syntax errors report the 1-based byte position.
json parse_json(std::string_view text);
/// Reads and parses a file; the message names the path.
json read_json_file(const std::string& path);

json to_json(const GroupSpec& g);
GroupSpec group_from_json(const json& j);

json element_to_json(const GroupSpec& g, Code c);
Code element_from_json(const GroupSpec& g, const json& j);

json to_json(const Dist& d);
/// `fallback` supplies the group when the object has no "group" member.
Dist dist_from_json(const json& j, const GroupSpec* fallback = nullptr);

json to_json(const JointDist& j);
JointDist joint_from_json(const json& j);

json tuple_to_json(const RVTuple& t);
RVTuple tuple_from_json(const json& j);

json set_to_json(const GroupSpec& g, const ElementSet& a);
std::pair<GroupSpec, ElementSet> set_from_json(const json& j);

json to_json(const GroupSpec& g, const CosetCover& c);
/// Throws ShapeError when the listed subgroup is not closed.
CosetCover cover_from_json(const GroupSpec& g, const json& j);

json to_json(const SlackReport& r);

}  // namespace tpfr
