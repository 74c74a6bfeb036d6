#pragma once

// Shannon entropy in nats. Sums run over atoms in increasing code order, so
// results are reproducible bit for bit.

#include <span>

#include "tpfr/dist.hpp"

namespace tpfr {

double entropy(const Pmf& p);
double entropy(const Dist& d);
double entropy(const JointDist& j);
/// Entropy of the listed coordinates.
double entropy(const JointDist& j, std::span<const std::size_t> coords);

/// sum_y P(given = y) H(target | given = y). Throws ShapeError when the
/// coordinate lists overlap.
double cond_entropy(const JointDist& j, std::span<const std::size_t> target,
                    std::span<const std::size_t> given);

/// I(A : B | given) = H(A|given) + H(B|given) - H(A,B|given).
double mutual_info(const JointDist& j, std::span<const std::size_t> a,
                   std::span<const std::size_t> b, std::span<const std::size_t> given = {});

}  // namespace tpfr
