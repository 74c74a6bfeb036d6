#pragma once

// Seeded inequality fuzzing. Every trial draws a group from the pool and
// runs each selected check on fresh random laws. A check's inputs come from
// a stream seeded by (master seed, trial index, check name), so selecting a
// subset of checks does not change what the others see.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tpfr/group.hpp"
#include "tpfr/json_io.hpp"

namespace tpfr {

/// Z/2, Z/3, Z/4, Z/2 x Z/2, Z/5, Z/2 x Z/4, Z/3 x Z/3.
std::vector<GroupSpec> default_fuzz_pool();

struct FuzzConfig {
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
  std::vector<GroupSpec> pool = default_fuzz_pool();
  /// Largest tuple drawn for the multi-member checks (at least 2).
  std::size_t max_tuple = 3;
  double tolerance = 1e-8;
  /// Check names, or prefixes ending in '.'; empty selects every visible
  /// check. The harness self-test "negated" runs only when named.
  std::vector<std::string> checks;
  /// Counterexamples kept in the report; failures past this are counted.
  std::size_t max_dumps = 20;
};

/// Registered check names in run order.
std::vector<std::string> fuzz_check_names(bool include_hidden = false);

struct CheckSummary {
  std::string name;
  std::int64_t runs = 0;
  std::int64_t failures = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
};

struct Counterexample {
  std::int64_t trial = 0;
  std::uint64_t trial_seed = 0;
  GroupSpec group;
  std::string check;
  json inputs;
  SlackReport report;
};

struct FuzzReport {
  std::vector<CheckSummary> checks;
  std::int64_t failures = 0;
  std::vector<Counterexample> counterexamples;
  bool pass() const { return failures == 0; }
};

/// Throws ShapeError for an invalid configuration or an unknown check name.
FuzzReport run_fuzz(const FuzzConfig& cfg);

json to_json(const FuzzConfig& cfg, const FuzzReport& r);

}  // namespace tpfr
