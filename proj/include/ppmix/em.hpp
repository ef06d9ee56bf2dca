#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ppmix/mixture.hpp"

namespace ppmix {

struct EmConfig {
    double tol = 1e-8;          // relative log-likelihood change
    int max_iter = 1000;
    int n_starts = 10;          // independent k-means++ style restarts
    double reg_scale = 1e-8;    // ridge = reg_scale * mean diag of data covariance
    // Smallest admissible eigenvalue of an M-step covariance estimate,
    // checked before the ridge is added: a rank-deficient estimate (more
    // dimensions than points in a component) is a collapse that the ridge
    // must not paper over, because its spuriously huge likelihood would win
    // every BIC comparison.
    double collapse_eps = 1e-12;
};

/// Fits a G-component mixture of the given family by EM. Restarts n_starts
/// times from k-means++ style seedings derived from `seed` and keeps the fit
/// with the best final log-likelihood. Throws DegenerateFitError if every
/// restart collapses, ContractViolation on invalid arguments (G < 1, n <= G,
/// non-finite data).
FitReport em_fit(const MatrixXd& data, int n_components, CovarianceFamily family,
                 const EmConfig& config, std::uint64_t seed);

/// One cell of the BIC model selection grid.
struct GridCell {
    int n_components = 0;
    CovarianceFamily family = CovarianceFamily::EII;
    double log_likelihood = 0.0;
    int n_parameters = 0;
    double bic = 0.0;
    bool converged = false;
    bool degenerate = false;  // fit collapsed; bic is -inf
};

struct SelectionReport {
    FitReport best;
    std::vector<GridCell> grid;  // row-major: components outer, families inner
    // Index of the winning cell in `grid`.
    int best_index = -1;
};

/// Fits every (G, family) combination and keeps the fit maximizing BIC.
/// Ties break toward fewer parameters, then lexicographic family name.
/// Cells whose every restart collapses are recorded as degenerate and
/// skipped; throws NoModelError if every cell collapses.
SelectionReport select_model(const MatrixXd& data,
                             const std::vector<int>& component_grid,
                             const std::vector<CovarianceFamily>& families,
                             const EmConfig& config, std::uint64_t seed);

/// Serializes the grid as CSV with header "G,family,logL,nu,BIC,converged".
std::string grid_to_csv(const SelectionReport& report);

}  // namespace ppmix
