#include "ppmix/modal_em.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace ppmix {
namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void merge(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

void solve_proposal(const std::vector<MatrixXd>& inv_cov,
                    const std::vector<VectorXd>& inv_mean, const VectorXd& zeta,
                    VectorXd& out) {
    const int p = static_cast<int>(inv_cov.front().rows());
    const int g_count = static_cast<int>(inv_cov.size());
    MatrixXd a = MatrixXd::Zero(p, p);
    VectorXd b = VectorXd::Zero(p);
    for (int g = 0; g < g_count; ++g) {
        a += zeta[g] * inv_cov[g];
        b += zeta[g] * inv_mean[g];
    }
    Eigen::LLT<MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw AlgorithmFault("modal ascent system failed to factor");
    }
    out = llt.solve(b);
}

void precompute_inverses(const MixtureModel& model, std::vector<MatrixXd>& inv_cov,
                         std::vector<VectorXd>& inv_mean) {
    const int p = model.dim;
    inv_cov.resize(model.n_components);
    inv_mean.resize(model.n_components);
    const MatrixXd eye = MatrixXd::Identity(p, p);
    for (int g = 0; g < model.n_components; ++g) {
        Eigen::LLT<MatrixXd> llt(model.covariances[g]);
        if (llt.info() != Eigen::Success) {
            throw DegenerateModelError("component covariance failed to factor");
        }
        inv_cov[g] = llt.solve(eye);
        inv_cov[g] = 0.5 * (inv_cov[g] + inv_cov[g].transpose()).eval();
        inv_mean[g] = inv_cov[g] * model.means[g];
    }
}

}  // namespace

MatrixXd mem_proposal(const MixtureModel& model, const MatrixXd& points) {
    if (points.cols() != model.dim) {
        throw ContractViolation("points dimension does not match model");
    }
    MixtureEvaluator ev(model);
    std::vector<MatrixXd> inv_cov;
    std::vector<VectorXd> inv_mean;
    precompute_inverses(model, inv_cov, inv_mean);
    const int n = static_cast<int>(points.rows());
    MatrixXd out(n, model.dim);
    std::vector<char> fault(n, 0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        VectorXd zeta;
        ev.responsibilities_one(points.row(i).transpose(), zeta);
        VectorXd proposal;
        try {
            solve_proposal(inv_cov, inv_mean, zeta, proposal);
        } catch (const AlgorithmFault&) {
            fault[i] = 1;
            continue;
        }
        out.row(i) = proposal.transpose();
    }
    for (int i = 0; i < n; ++i) {
        if (fault[i]) {
            throw AlgorithmFault("proposal system failed to factor for row " +
                                 std::to_string(i + 1));
        }
    }
    return out;
}

AscentResult mem_ascend(const MixtureModel& model, const MatrixXd& starts,
                        const MemConfig& config) {
    if (starts.cols() != model.dim) {
        throw ContractViolation("start points dimension does not match model");
    }
    if (starts.rows() < 1) throw ContractViolation("no start points");
    if (!starts.allFinite()) throw ContractViolation("start points must be finite");
    if (!(config.step_rate > 0.0) || !(config.tol > 0.0) || config.max_iter < 1) {
        throw ContractViolation("invalid modal ascent configuration");
    }

    const int n = static_cast<int>(starts.rows());
    MixtureEvaluator ev(model);
    std::vector<MatrixXd> inv_cov;
    std::vector<VectorXd> inv_mean;
    precompute_inverses(model, inv_cov, inv_mean);

    AscentResult result;
    result.points = starts;
    result.log_density = kernels::log_density(ev, starts);
    result.n_iterations = VectorXi::Zero(n);
    result.converged.assign(n, false);

    std::vector<std::vector<VectorXd>> path_steps;
    if (config.record_paths) {
        path_steps.resize(n);
        for (int i = 0; i < n; ++i) {
            path_steps[i].push_back(starts.row(i).transpose());
        }
    }

    std::vector<char> active(n, 1);
    std::vector<char> fault(n, 0);
    int n_active = n;
    for (int t = 1; t <= config.max_iter && n_active > 0; ++t) {
        const double omega = 1.0 - std::exp(-config.step_rate * t);
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            if (!active[i]) continue;
            VectorXd z = result.points.row(i).transpose();
            VectorXd zeta;
            ev.responsibilities_one(z, zeta);
            VectorXd proposal;
            try {
                solve_proposal(inv_cov, inv_mean, zeta, proposal);
            } catch (const AlgorithmFault&) {
                fault[i] = 1;
                active[i] = 0;
                continue;
            }
            VectorXd z_new = (1.0 - omega) * z + omega * proposal;
            const double lf_new = ev.log_density_one(z_new);
            const double lf_old = result.log_density[i];
            if (lf_new < lf_old - 1e-12) {
                fault[i] = 1;
                active[i] = 0;
                continue;
            }
            if (std::abs(std::exp(lf_new - lf_old) - 1.0) < config.tol) {
                result.converged[i] = true;
                active[i] = 0;
            }
            result.points.row(i) = z_new.transpose();
            result.log_density[i] = lf_new;
            result.n_iterations[i] = t;
            if (config.record_paths) path_steps[i].push_back(std::move(z_new));
        }
        n_active = 0;
        for (int i = 0; i < n; ++i) {
            if (fault[i]) {
                throw AlgorithmFault("modal ascent decreased the density for row " +
                                     std::to_string(i + 1) + " at step " +
                                     std::to_string(t));
            }
            if (active[i]) ++n_active;
        }
    }

    if (config.record_paths) {
        result.paths.resize(n);
        for (int i = 0; i < n; ++i) {
            MatrixXd path(static_cast<int>(path_steps[i].size()), model.dim);
            for (std::size_t s = 0; s < path_steps[i].size(); ++s) {
                path.row(static_cast<int>(s)) = path_steps[i][s].transpose();
            }
            result.paths[i] = std::move(path);
        }
    }
    return result;
}

MergeResult merge_modes(const MatrixXd& endpoints, const VectorXd& log_density,
                        double merge_eps, double bbox_diagonal) {
    const int n = static_cast<int>(endpoints.rows());
    if (n < 1) throw ContractViolation("no endpoints to merge");
    if (log_density.size() != n) {
        throw ContractViolation("log density size does not match endpoints");
    }
    if (!(merge_eps >= 0.0) || !(bbox_diagonal >= 0.0)) {
        throw ContractViolation("merge radius inputs must be nonnegative");
    }
    const double threshold = merge_eps * bbox_diagonal;

    UnionFind uf(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if ((endpoints.row(i) - endpoints.row(j)).norm() <= threshold) {
                uf.merge(i, j);
            }
        }
    }

    MergeResult result;
    result.assignments.resize(n);
    std::vector<int> mode_of_root(n, -1);
    std::vector<int> best_row;
    for (int i = 0; i < n; ++i) {
        const int root = uf.find(i);
        if (mode_of_root[root] < 0) {
            mode_of_root[root] = static_cast<int>(result.modes.size());
            result.modes.push_back(Mode{});
            best_row.push_back(i);
        }
        const int m = mode_of_root[root];
        result.assignments[i] = m + 1;
        result.modes[m].count += 1;
        if (log_density[i] > log_density[best_row[m]]) best_row[m] = i;
    }
    for (std::size_t m = 0; m < result.modes.size(); ++m) {
        result.modes[m].location = endpoints.row(best_row[m]).transpose();
        result.modes[m].log_density = log_density[best_row[m]];
    }
    return result;
}

ModalResult modal_cluster(const MixtureModel& model, const MatrixXd& points,
                          const MemConfig& config) {
    if (points.rows() < 1) throw ContractViolation("no points to cluster");
    ModalResult result;
    result.ascent = mem_ascend(model, points, config);
    const double bbox_diagonal =
        (points.colwise().maxCoeff() - points.colwise().minCoeff()).norm();
    MergeResult merged = merge_modes(result.ascent.points, result.ascent.log_density,
                                     config.merge_eps, bbox_diagonal);
    result.modes = std::move(merged.modes);
    result.assignments = std::move(merged.assignments);
    return result;
}

VectorXi map_assign(const MixtureModel& model, const MatrixXd& points) {
    MixtureEvaluator ev(model);
    if (points.cols() != model.dim) {
        throw ContractViolation("points dimension does not match model");
    }
    const int n = static_cast<int>(points.rows());
    VectorXi out(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        VectorXd zeta;
        ev.responsibilities_one(points.row(i).transpose(), zeta);
        int best = 0;
        for (int g = 1; g < zeta.size(); ++g) {
            if (zeta[g] > zeta[best]) best = g;
        }
        out[i] = best + 1;
    }
    return out;
}

}  // namespace ppmix
