#pragma once

#include "ppmix/mixture.hpp"

namespace ppmix {

/// Adjusted Rand index between two labelings of the same n items (Hubert and
/// Arabie correction). Label values are arbitrary integers; only the induced
/// partitions matter. Returns 1 when both partitions are identical and the
/// adjustment denominator vanishes (both trivial). Throws ContractViolation
/// on size mismatch or empty input.
double adjusted_rand_index(const VectorXi& a, const VectorXi& b);

}  // namespace ppmix
