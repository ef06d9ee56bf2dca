#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ppmix/dataset.hpp"
#include "ppmix/em.hpp"
#include "ppmix/ga.hpp"
#include "ppmix/modal_em.hpp"

namespace ppmix {

/// Settings for the full fit -> project -> cluster -> evaluate chain. The CLI
/// subcommands and the acceptance harness both drive these stage functions,
/// so standalone and composed runs cannot drift apart.
struct PipelineConfig {
    std::vector<int> component_grid = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::vector<CovarianceFamily> families{std::begin(kAllFamilies),
                                           std::end(kAllFamilies)};
    int dim_out = 2;
    bool standardize = true;
    EmConfig em;
    GaConfig ga;
    MemConfig mem;
    std::uint64_t seed = 0;
};

/// Stage seeds, derived from the run seed so that running a stage standalone
/// on intermediate files reproduces its in-pipeline behavior exactly.
std::uint64_t fit_stage_seed(std::uint64_t seed);
std::uint64_t project_stage_seed(std::uint64_t seed);
std::uint64_t cluster_stage_seed(std::uint64_t seed);

/// Fit stage: BIC model selection on (optionally standardized) data.
SelectionReport stage_fit(const MatrixXd& standardized, const PipelineConfig& config);

/// Projection stage: negentropy pursuit on the fitted model; returns the
/// basis diagnostics. Projected coordinates are `standardized * basis`.
PpResult stage_project(const MixtureModel& model, const PipelineConfig& config);

/// Cluster stage: fits a fresh parsimonious mixture on the projected
/// coordinates by BIC (the projection step only guides the subspace choice),
/// then runs the modal ascent from every projected point.
struct ClusterStageResult {
    SelectionReport selection;
    ModalResult modal;
};
ClusterStageResult stage_cluster(const MatrixXd& projected, const PipelineConfig& config);

struct PipelineResult {
    Standardization standardization;  // identity when standardize = false
    SelectionReport selection;        // fit on the full-dimensional data
    PpResult projection;
    MatrixXd projected_points;        // standardized data times basis
    SelectionReport cluster_selection;  // fit on the projected data
    ModalResult modal;
    VectorXi assignments;             // 1-based modal cluster per input row
    std::optional<double> ari;        // against input labels when present
};

/// Runs the full chain on `data`. Stage sub-seeds are derived from
/// config.seed, so one seed pins the whole run.
PipelineResult run_pipeline(const LabeledDataset& data, const PipelineConfig& config);

}  // namespace ppmix
