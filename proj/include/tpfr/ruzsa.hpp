#pragma once

// Entropic Ruzsa distance d[X;Y] = H(X' - Y') - H(X)/2 - H(Y)/2 for
// independent copies, and the multidistance of a tuple. With the difference
// form, D[X1, X2] = d[X1; -X2] and d[U_A; -U_A] = H(U_A + U_A') - log |A|. Conditional
// variants take a two-coordinate JointDist: coordinate 0 is the group-valued
// variable, coordinate 1 the variable conditioned on.

#include <span>

#include "tpfr/dist.hpp"

namespace tpfr {

double rdist(const Dist& x, const Dist& y);

/// d[X; Y | W] = sum_w P(W = w) d[X; (Y | W = w)] with X independent of (Y, W).
double cond_rdist(const Dist& x, const JointDist& yw);

/// D[X_I] = H(sum of independent copies) - mean of H(X_i).
double multidist(std::span<const Dist> t);

/// D[X_I | Y_I] for independent pairs (X_i, Y_i), computed from the joint law
/// of (sum X_i, Y_1, ..., Y_m).
double cond_multidist(std::span<const JointDist> pairs, std::uint64_t atom_cap = kDefaultAtomCap);

/// The same quantity as the P(Y_I = y_I)-weighted average of D[(X_i | Y_i = y_i)_i].
double cond_multidist_averaged(std::span<const JointDist> pairs);

/// Checks that `pair` has two coordinates with the first on `g`.
void require_cond_pair(const JointDist& pair, const GroupSpec& g);

}  // namespace tpfr
