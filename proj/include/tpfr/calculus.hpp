#pragma once

// Entropy inequalities and identities as numeric reports. A slack part is
// rhs - lhs and passes when >= -tol; a residual part is |lhs - rhs| and
// passes when <= tol. Where an inequality needs independence, the check
// builds the joint law itself from the supplied marginals.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tpfr/dist.hpp"

namespace tpfr {

enum class PartKind { Slack, Residual };

struct ReportPart {
  std::string label;
  PartKind kind;
  double lhs;
  double rhs;

  double slack() const { return rhs - lhs; }
  double residual() const;
  bool pass(double tol) const;
};

struct SlackReport {
  std::string name;
  std::vector<ReportPart> parts;
  /// FNV-1a hash of a canonical serialization of the inputs.
  std::string inputs_digest;

  bool pass(double tol) const;
  /// Smallest slack over slack parts (+inf if none).
  double min_slack() const;
  /// Largest residual over residual parts (0 if none).
  double max_residual() const;
};

/// Incremental FNV-1a over laws and integers.
class Digest {
 public:
  Digest& add(std::string_view tag);
  Digest& add(std::int64_t v);
  Digest& add(const GroupSpec& g);
  Digest& add(const Pmf& p);
  Digest& add(const Dist& d);
  Digest& add(const JointDist& j);
  Digest& add(std::span<const Dist> t);
  std::string hex() const;

 private:
  void bytes(const void* p, std::size_t n);
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

// --- Ruzsa distance calculus ----------------------------------------------

/// Symmetry, nonnegativity and the triangle inequality for d[.;.].
SlackReport check_triangle(const Dist& x, const Dist& y, const Dist& z);
/// max(H(X), H(Y)) - I(X:Y) <= H(X +- Y) for a joint (X, Y) on G x G.
SlackReport check_sum_lower(const JointDist& xy);
/// Entropic Balog-Szemeredi-Gowers for a joint (X, Y) on G x G.
SlackReport check_bsg(const JointDist& xy);
/// H(X - Z) <= H(X - Y) + H(Y - Z) - H(Y) with (X, Z) independent of Y.
SlackReport check_difference_triangle(const JointDist& xz, const Dist& y);
/// d[X; -Y] <= 3 d[X; Y].
SlackReport check_negation(const Dist& x, const Dist& y);
/// d[X; Y | Z] <= d[X; Y] + I(Y : Z) / 2 for a pair (Y, Z) independent of X.
SlackReport check_conditioning(const Dist& x, const JointDist& yz);
/// d[X; Y | Y + Z] <= d[X; Y] + (H(Y + Z) - H(Z)) / 2, all independent.
SlackReport check_sum_conditioning(const Dist& x, const Dist& y, const Dist& z);
/// Kaimanovich-Vershik type bounds for independent X, Y_1..Y_n: the
/// entropy increment bound and d[X; sum Y] <= 2 sum d[X; Y_i].
SlackReport check_kv(const Dist& x, std::span<const Dist> ys);
/// d[X; sum Y] <= ((2n - 1) / n) sum d[X; Y_i].
SlackReport check_kv_sharp(const Dist& x, std::span<const Dist> ys);

// --- Multidistance --------------------------------------------------------

/// d[Y; sum X] <= d[Y; X_i0] + (H(sum X) - H(X_i0)) / 2.
SlackReport check_sum_vs_member(std::span<const Dist> t, const Dist& y, std::size_t i0);
/// H(sum Y) <= H(sum X) + sum_j (H(Y_j - X_f(j)) - H(X_f(j))).
SlackReport check_sum_domination(std::span<const Dist> t, std::span<const Dist> ys,
                                 std::span<const std::size_t> f);
/// d[W; -W] <= 2 D[X_I] with W = sum X.
SlackReport check_sum_self_distance(std::span<const Dist> t);
/// sum_{j != k} d[X_j; -X_k] <= m (m - 1) D[X_I].
SlackReport check_pairwise(std::span<const Dist> t);
/// sum_j d[X_j; X_j] <= 2 m D[X_I].
SlackReport check_self_distances(std::span<const Dist> t);
/// D[X_I] <= m d[X_1; X_1] for identically distributed members.
SlackReport check_identical(std::span<const Dist> t);

// --- Dilates and data processing ------------------------------------------

/// LHS H(X - aY) - H(X) against 4|a| d[X;Y] and (4 + 10 floor(log2 |a|)) d[X;Y].
SlackReport check_dilate(const Dist& x, const Dist& y, std::int64_t a);
/// The left-hand side of check_dilate on its own.
double dilate_increment(const Dist& x, const Dist& y, std::int64_t a);

/// A total function from the codes of one group to another group.
struct FunctionTable {
  GroupSpec target;
  std::vector<Code> values;
};

/// I(X : Y | Z) - I(f(X) : g(Y) | Z) >= 0 for coordinates x, y and the
/// (possibly empty) list `given` of a joint.
SlackReport check_data_processing(const JointDist& j, std::size_t x, std::size_t y,
                                  std::span<const std::size_t> given, const FunctionTable& f,
                                  const FunctionTable& g);

// --- Chain rules ------------------------------------------------------------

/// D[X] = D[X | pi X] + D[pi X] + I(sum X : pi(X_I) | pi(sum X)).
SlackReport chain_rule_residual(std::span<const Dist> t, const LinearMap& pi,
                                std::uint64_t atom_cap = kDefaultAtomCap);
/// The same decomposition conditioned on Y_I, for pairs (X_i, Y_i).
SlackReport cond_chain_rule_residual(std::span<const JointDist> pairs, const LinearMap& pi,
                                     std::uint64_t atom_cap = kDefaultAtomCap);
/// Telescoped chain rule along G_n -> ... -> G_1 -> {0}; `steps[k]` maps
/// G_{n-k} to G_{n-k-1}. Reports the identity residual and the slack of the
/// inequality that drops all but the first mutual information.
SlackReport iterated_chain_slack(std::span<const Dist> t, std::span<const LinearMap> steps,
                                 std::uint64_t atom_cap = kDefaultAtomCap);

/// Terms of the grid inequality for an m x m grid of independent variables:
/// I((column sums) : (row sums) | total) <= sum_{j<m} A_j + B.
struct GridTerms {
  std::vector<double> a;
  double b = 0.0;
  double mutual_info = 0.0;
};

using Grid = std::vector<std::vector<Dist>>;

GridTerms grid_decomposition(const Grid& grid, std::uint64_t atom_cap = kDefaultAtomCap);
SlackReport grid_chain_slack(const Grid& grid, std::uint64_t atom_cap = kDefaultAtomCap);

}  // namespace tpfr
