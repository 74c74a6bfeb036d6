#pragma once

// The multidistance decrement: an m x m grid of copies of the tuple, the
// endgame variables built from it, three candidate families that try to beat
// (1 - eta) D, and the iteration down to a subgroup.
//
// Grid convention: Y_{i,j} is a copy of X_i for i, j in Z/m. Grid entries are
// indexed (row i, column j), both 0-based.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "tpfr/calculus.hpp"
#include "tpfr/dist.hpp"
#include "tpfr/group.hpp"

namespace tpfr {

/// Most fibre tuples kept per grid column (highest probability first).
inline constexpr std::size_t kDefaultFibreCap = 256;

/// One of the three ways of laying the Y_{i,j} out as a grid whose columns
/// are permutations of the base tuple.
struct GridInstance {
  std::string name;
  Grid grid;
  /// base_index[i][j]: which X the entry (i, j) is a copy of.
  std::vector<std::vector<std::size_t>> base_index;
};

/// Y_{i,j}, Y_{i-j,j} and Y_{i,j-i} for i, j in Z/m.
std::vector<GridInstance> grid_instances(const RVTuple& base);

struct EndgameLaws {
  RVTuple base;
  /// Joint law of (Z1, Z2, Z3, W) over G^4; Z3 is computed from its own
  /// coefficients, not derived from Z1 and Z2.
  JointDist zjoint;
  std::vector<GridInstance> grids;
};

/// Requires m = |T| >= 2 with m g = 0 for every g. The other grid
/// operations accept any m >= 2; the decrement skips the endgame family when
/// the group is not m-torsion.
EndgameLaws build_endgame(const RVTuple& t, std::uint64_t atom_cap = kDefaultAtomCap);

/// Number of atoms of zjoint where Z1 + Z2 + Z3 != 0.
std::size_t endgame_identity_violations(const EndgameLaws& e);

struct InfoTriple {
  double z1_z2 = 0.0;
  double z2_z3 = 0.0;
  double z1_z3 = 0.0;
};

/// Pairwise mutual informations of Z1, Z2, Z3 conditioned on W.
InfoTriple mutual_info_triple(const EndgameLaws& e);

/// Grid terms for one instance after checking its column certificate: the
/// entry (i, j) must equal base[base_index[i][j]] and every column must use
/// each base index once.
GridTerms grid_bound(const RVTuple& base, const GridInstance& g,
                     std::uint64_t atom_cap = kDefaultAtomCap);

/// Each pairwise endgame information against the bound from the grid that
/// controls it: (Z1:Z2) by the first, (Z3:Z2) by the second, (Z1:Z3) by the
/// third.
SlackReport check_grid_bounds(const EndgameLaws& e, std::uint64_t atom_cap = kDefaultAtomCap);

/// The four estimates on W and Z2 with k = D[T]: H(W), H(Z2), I(W:Z2) and
/// sum_i d[X_i; Z2 | W]. `item` is 1..4.
SlackReport check_endgame_estimate(int item, const EndgameLaws& e);
SlackReport check_endgame_estimate(int item, const RVTuple& t);

/// Best slice U = (T2 | T3 = z) for the objective d[U;U] + alpha sum d[Y_i;U].
struct SliceChoice {
  Code z = 0;
  Dist u;
  double objective = 0.0;
  /// p_T3-weighted mean objective over all slices.
  double average = 0.0;
};

/// `t23` is the joint (T2, T3). Ties go to the smallest z.
SliceChoice best_slice(const JointDist& t23, std::span<const Dist> ys, double alpha);

/// The slice bound for a joint (T1, T2, T3) on G^3 with T1 + T2 + T3 = 0:
/// d[U;U] + alpha sum d[Y_i;U] <= (2 + alpha n / 2) delta + alpha sum d[Y_i;T2].
/// Throws ShapeError if the coordinates do not sum to zero.
SlackReport check_slice_bound(const JointDist& t123, std::span<const Dist> ys, double alpha);

enum class Family { Fibre, Sums, Endgame };

std::string family_name(Family f);

struct Candidate {
  RVTuple tuple;
  Family family;
  std::string label;
  /// The replacement of X_{sigma[i]} is tuple[i].
  std::vector<std::size_t> sigma;
  std::int64_t support_factor = 1;
};

/// Columns 0..m-2 of the first two grids, each conditioned on its suffix row
/// sums; one candidate per value tuple, at most `cap` per column.
std::vector<Candidate> candidates_fibres(const RVTuple& t, std::size_t cap = kDefaultFibreCap,
                                         std::uint64_t atom_cap = kDefaultAtomCap);
/// Row sums of the first two grids.
std::vector<Candidate> candidates_sums(const RVTuple& t);
/// One candidate per value w of W: m copies of the best slice of Z2 given
/// Z3 inside W = w, with alpha = eta / m.
std::vector<Candidate> candidates_endgame(const EndgameLaws& e, double eta);

/// (1 - eta) D[base] - eta sum_i d[X_sigma(i); X'_i] - D[cand].
double decrement_gain(const RVTuple& base, const Candidate& cand, double eta);

struct StepResult {
  Candidate candidate;
  double gain = 0.0;
  std::size_t evaluated = 0;
};

struct DecrementConfig {
  mpq_class eta = 0;  // 0 means 1 / (100 m^3)
  double tol = 1e-9;
  std::int64_t max_steps = 0;  // 0 means ceil(10 m^3 log(2 + k0))
  std::size_t fibre_cap = kDefaultFibreCap;
  std::uint64_t atom_cap = kDefaultAtomCap;
};

double default_eta(std::size_t m);
std::int64_t default_max_steps(std::size_t m, double k0);

/// Best candidate over all families if its gain is >= 0. Ties prefer the
/// earlier family, then the earlier candidate.
std::optional<StepResult> decrement_step(const RVTuple& t, double eta,
                                         const DecrementConfig& cfg = {});

struct TraceStep {
  std::int64_t t = 0;
  double d = 0.0;
  std::string family;
  std::string label;
  double sum_dist_step = 0.0;
  std::int64_t support_factor = 1;
};

struct DecrementTrace {
  std::vector<TraceStep> steps;
  double eta = 0.0;
  double k0 = 0.0;
  std::int64_t max_steps = 0;
  /// "converged", "stall" or "max_steps".
  std::string stop_reason;
};

struct BaseCase {
  Subgroup subgroup;
  double sum_dist = 0.0;
};

/// argmin over subgroups H (with H inside `support_bound` when given) of
/// sum_i d[X_i; U_H]; ties prefer smaller |H|, then the lexicographically
/// smaller element list.
BaseCase base_case_subgroup(const RVTuple& t, const std::optional<ElementSet>& support_bound = {});

struct MinimizeResult {
  RVTuple final_tuple;
  DecrementTrace trace;
  Subgroup subgroup;
  /// Triangle-inequality bound on sum_i d[X_i; U_H] for the original tuple.
  double sum_dist = 0.0;
  /// The same sum evaluated directly.
  double sum_dist_direct = 0.0;
  /// 6 times the cumulative support factor (saturating).
  std::int64_t ell_bound = 0;
  /// Least l with H inside l S, S the symmetric support hull with 0.
  std::int64_t ell = 0;
};

MinimizeResult minimize(const RVTuple& t, const DecrementConfig& cfg = {});

/// Symmetric hull of the supports, with 0 added.
ElementSet support_hull(const RVTuple& t);

/// Least l >= 1 with h inside l s, or -1 if none.
std::int64_t least_dilate_containing(const GroupSpec& g, const ElementSet& s, const ElementSet& h);

struct EntropicPfr {
  Subgroup subgroup;
  double dist_x = 0.0;
  double dist_y = 0.0;
  std::int64_t ell = 0;
  MinimizeResult run;
};

/// Reduces to m copies of X and runs minimize; reports d[X;U_H], d[Y;U_H].
EntropicPfr entropic_pfr(const Dist& x, const Dist& y, const DecrementConfig& cfg = {});

}  // namespace tpfr
