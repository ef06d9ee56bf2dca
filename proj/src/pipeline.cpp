#include "ppmix/pipeline.hpp"

#include "ppmix/metrics.hpp"
#include "ppmix/rng.hpp"

namespace ppmix {

std::uint64_t fit_stage_seed(std::uint64_t seed) { return derive_seed(seed, {1}); }
std::uint64_t project_stage_seed(std::uint64_t seed) { return derive_seed(seed, {2}); }
std::uint64_t cluster_stage_seed(std::uint64_t seed) { return derive_seed(seed, {3}); }

SelectionReport stage_fit(const MatrixXd& standardized, const PipelineConfig& config) {
    return select_model(standardized, config.component_grid, config.families,
                        config.em, fit_stage_seed(config.seed));
}

PpResult stage_project(const MixtureModel& model, const PipelineConfig& config) {
    return projection_pursuit(model, config.dim_out, config.ga,
                              project_stage_seed(config.seed));
}

ClusterStageResult stage_cluster(const MatrixXd& projected, const PipelineConfig& config) {
    ClusterStageResult result;
    result.selection = select_model(projected, config.component_grid, config.families,
                                    config.em, cluster_stage_seed(config.seed));
    result.modal = modal_cluster(result.selection.best.model, projected, config.mem);
    return result;
}

PipelineResult run_pipeline(const LabeledDataset& data, const PipelineConfig& config) {
    if (data.points.rows() < 2) throw ContractViolation("pipeline needs data rows");
    if (config.dim_out < 1 || config.dim_out >= data.points.cols()) {
        throw ContractViolation("pipeline needs 1 <= dim <= input dimension - 1");
    }

    PipelineResult result;
    if (config.standardize) {
        result.standardization = fit_standardization(data.points);
    } else {
        result.standardization.mean = VectorXd::Zero(data.points.cols());
        result.standardization.scale = VectorXd::Ones(data.points.cols());
    }
    const MatrixXd x = result.standardization.transform(data.points);

    result.selection = stage_fit(x, config);
    result.projection = stage_project(result.selection.best.model, config);
    result.projected_points = x * result.projection.basis.matrix;

    ClusterStageResult cluster = stage_cluster(result.projected_points, config);
    result.cluster_selection = std::move(cluster.selection);
    result.modal = std::move(cluster.modal);
    result.assignments = result.modal.assignments;
    if (data.has_labels()) {
        result.ari = adjusted_rand_index(data.labels, result.assignments);
    }
    return result;
}

}  // namespace ppmix
