#include "ppmix/basis.hpp"

#include <cmath>

namespace ppmix {

int n_angles(int dim_in, int dim_out) {
    if (dim_out < 1 || dim_out >= dim_in) {
        throw ContractViolation("angle count needs 1 <= dim_out < dim_in");
    }
    return dim_out * dim_in - dim_out * (dim_out + 1) / 2;
}

std::vector<std::pair<int, int>> pair_schedule(int dim_in, int dim_out) {
    const int count = n_angles(dim_in, dim_out);
    std::vector<std::pair<int, int>> schedule;
    schedule.reserve(count);
    for (int i = 0; i < dim_out; ++i) {
        for (int j = i + 1; j < dim_in; ++j) {
            schedule.emplace_back(i, j);
        }
    }
    return schedule;
}

ProjectionBasis basis_from_angles(const VectorXd& angles, int dim_in, int dim_out) {
    const auto schedule = pair_schedule(dim_in, dim_out);
    if (angles.size() != static_cast<int>(schedule.size())) {
        throw ContractViolation("angle vector length does not match the schedule");
    }
    // Rotations are applied in reverse schedule order, so schedule entry 0 is
    // the outermost factor. This makes the map invertible by eliminating
    // below-diagonal entries in forward schedule order (angles_from_basis).
    MatrixXd b = MatrixXd::Identity(dim_in, dim_out);
    for (std::size_t k = schedule.size(); k-- > 0;) {
        const auto [i, j] = schedule[k];
        const double c = std::cos(angles[static_cast<int>(k)]);
        const double s = std::sin(angles[static_cast<int>(k)]);
        for (int col = 0; col < dim_out; ++col) {
            const double bi = b(i, col);
            const double bj = b(j, col);
            b(i, col) = c * bi + s * bj;
            b(j, col) = -s * bi + c * bj;
        }
    }
    ProjectionBasis basis;
    basis.rows = dim_in;
    basis.cols = dim_out;
    basis.matrix = std::move(b);
    return basis;
}

VectorXd angles_from_basis(const ProjectionBasis& basis) {
    basis.validate();
    const auto schedule = pair_schedule(basis.rows, basis.cols);
    MatrixXd u = basis.matrix;
    VectorXd angles(static_cast<int>(schedule.size()));
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto [i, j] = schedule[k];
        double theta = std::atan2(-u(j, i), u(i, i));
        // Fold into the genotype bounds; the fold flips both rows' signs,
        // which changes column signs only, never the spanned subspace.
        if (theta > kHalfPi) theta -= 2.0 * kHalfPi;
        if (theta < -kHalfPi) theta += 2.0 * kHalfPi;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (int col = 0; col < basis.cols; ++col) {
            const double ui = u(i, col);
            const double uj = u(j, col);
            u(i, col) = c * ui - s * uj;
            u(j, col) = s * ui + c * uj;
        }
        angles[static_cast<int>(k)] = theta;
    }
    return angles;
}

ProjectionBasis canonicalize_basis(const ProjectionBasis& basis) {
    ProjectionBasis out = basis;
    for (int col = 0; col < out.cols; ++col) {
        int arg = 0;
        double best = std::abs(out.matrix(0, col));
        for (int row = 1; row < out.rows; ++row) {
            const double mag = std::abs(out.matrix(row, col));
            if (mag > best) {
                best = mag;
                arg = row;
            }
        }
        if (out.matrix(arg, col) < 0.0) out.matrix.col(col) *= -1.0;
    }
    return out;
}

}  // namespace ppmix
