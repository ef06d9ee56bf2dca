#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ppmix/mixture.hpp"

namespace ppmix {

/// Genotype bound: every Givens angle lives in [-kHalfPi, kHalfPi].
inline constexpr double kHalfPi = 1.5707963267948966192;

/// Number of free angles for a d-dimensional subspace of R^p:
/// d*p - d*(d+1)/2, the dimension of the Stiefel manifold quotient.
int n_angles(int dim_in, int dim_out);

/// Pair schedule for the Givens parameterization: (i, j) for i = 0..d-1,
/// j = i+1..p-1, in that order. Angle k rotates coordinates pair_schedule[k].
std::vector<std::pair<int, int>> pair_schedule(int dim_in, int dim_out);

/// Maps angles in [-pi/2, pi/2]^(d*p - d(d+1)/2) to a p x d column-orthonormal
/// basis: B = G(sched[0]) * ... * G(sched[m-1]) * E_d where E_d holds the
/// first d columns of the identity and G(i, j, theta_k) sends row i to
/// cos(t)*row_i + sin(t)*row_j and row j to -sin(t)*row_i + cos(t)*row_j.
/// Schedule entry 0 is the outermost factor.
ProjectionBasis basis_from_angles(const VectorXd& angles, int dim_in, int dim_out);

/// Inverse of basis_from_angles up to column signs: eliminates below-diagonal
/// entries in forward schedule order and folds each angle into
/// [-pi/2, pi/2]. basis_from_angles(angles_from_basis(b)) spans the same
/// subspace as b, with each column equal to the original up to sign.
VectorXd angles_from_basis(const ProjectionBasis& basis);

/// Sign canonicalization: flips each column so its largest-magnitude entry is
/// positive (ties toward the lowest row index). Projection pursuit scores are
/// invariant to column signs, so reported bases are canonicalized.
ProjectionBasis canonicalize_basis(const ProjectionBasis& basis);

}  // namespace ppmix
