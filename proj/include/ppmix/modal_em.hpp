#pragma once

#include <vector>

#include "ppmix/kernels.hpp"
#include "ppmix/mixture.hpp"

namespace ppmix {

struct MemConfig {
    double step_rate = 0.1;   // omega_t = 1 - exp(-step_rate * t)
    double tol = 1e-8;        // per-point stop: |exp(delta log f) - 1| < tol
    int max_iter = 1000;
    double merge_eps = 1e-3;  // mode merge radius, relative to the bounding
                              // box diagonal of the start points
    bool record_paths = false;
};

/// Modal EM state for a batch of ascent paths.
struct AscentResult {
    MatrixXd points;            // final locations, one row per start
    VectorXd log_density;       // log f at the final locations
    VectorXi n_iterations;      // per-row iterations actually taken
    std::vector<bool> converged;
    // Populated only when record_paths is set: paths[r] lists row r's
    // iterates, starting with the initial point.
    std::vector<MatrixXd> paths;
};

/// The fixed-point proposal maximizing the MEM surrogate, batched over rows:
/// with responsibilities zeta_k(z) at row z, solves
///   (sum_k zeta_k Gamma_k^{-1}) z* = sum_k zeta_k Gamma_k^{-1} eta_k.
MatrixXd mem_proposal(const MixtureModel& model, const MatrixXd& points);

/// Batch damped modal EM ascent from each row of `starts`: the update is
/// z <- (1 - omega_t) z + omega_t z* with omega_t = 1 - exp(-c t), t = 1, 2...
/// and c = config.step_rate. Every step increases log f; a decrease beyond
/// 1e-12 raises AlgorithmFault. Converged rows are frozen while the batch
/// step counter keeps running. Row-parallel, bit-identical across thread
/// counts.
AscentResult mem_ascend(const MixtureModel& model, const MatrixXd& starts,
                        const MemConfig& config);

/// One located mode after merging.
struct Mode {
    VectorXd location;     // highest-density member of the merged group
    double log_density = 0.0;
    int count = 0;         // ascent paths that ended here
};

/// Single-linkage merge of ascent endpoints at radius
/// merge_eps * bbox_diagonal, where the diagonal is measured on the ascent
/// START points (callers pass it since the endpoints alone no longer carry
/// it). Modes are ordered by first occurrence over the rows; assignments are
/// 1-based mode indices per row.
struct MergeResult {
    std::vector<Mode> modes;
    VectorXi assignments;
};
MergeResult merge_modes(const MatrixXd& endpoints, const VectorXd& log_density,
                        double merge_eps, double bbox_diagonal);

/// Full modal clustering of `points`: ascend from every row, then merge.
struct ModalResult {
    std::vector<Mode> modes;
    VectorXi assignments;      // 1-based mode index per input row
    AscentResult ascent;

    int n_modes() const { return static_cast<int>(modes.size()); }
};
ModalResult modal_cluster(const MixtureModel& model, const MatrixXd& points,
                          const MemConfig& config);

/// MAP baseline: argmax_g posterior per row, 1-based, ties toward smaller g.
VectorXi map_assign(const MixtureModel& model, const MatrixXd& points);

}  // namespace ppmix
