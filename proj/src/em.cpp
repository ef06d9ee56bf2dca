#include "ppmix/em.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>

#include "ppmix/kernels.hpp"
#include "ppmix/rng.hpp"

namespace ppmix {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Greedy k-means++ seeding (5 candidates per center, best potential wins)
// followed by at most 20 Lloyd iterations. Empty clusters are reseeded on
// the point farthest from its current center. Returns hard labels in 0..G-1.
std::vector<int> kmeans_labels(const MatrixXd& x, int g_count, std::mt19937_64& rng) {
    const int n = static_cast<int>(x.rows());
    std::uniform_int_distribution<int> pick_row(0, n - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    MatrixXd centers(g_count, x.cols());
    centers.row(0) = x.row(pick_row(rng));
    VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < g_count; ++c) {
        const double total = d2.sum();
        int best_row = -1;
        double best_potential = kInf;
        for (int trial = 0; trial < 5; ++trial) {
            int row;
            if (total <= 0.0) {
                row = pick_row(rng);
            } else {
                double target = unif(rng) * total;
                row = 0;
                double acc = d2[0];
                while (row < n - 1 && acc < target) acc += d2[++row];
            }
            const double potential =
                d2.cwiseMin((x.rowwise() - x.row(row)).rowwise().squaredNorm()).sum();
            if (potential < best_potential) {
                best_potential = potential;
                best_row = row;
            }
        }
        centers.row(c) = x.row(best_row);
        d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> labels(n, 0);
    for (int sweep = 0; sweep < 20; ++sweep) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = (x.row(i) - centers.row(0)).squaredNorm();
            for (int c = 1; c < g_count; ++c) {
                const double d = (x.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (labels[i] != best) {
                labels[i] = best;
                changed = true;
            }
        }
        if (!changed && sweep > 0) break;

        MatrixXd sums = MatrixXd::Zero(g_count, x.cols());
        std::vector<int> counts(g_count, 0);
        for (int i = 0; i < n; ++i) {
            sums.row(labels[i]) += x.row(i);
            ++counts[labels[i]];
        }
        for (int c = 0; c < g_count; ++c) {
            if (counts[c] > 0) {
                centers.row(c) = sums.row(c) / counts[c];
            } else {
                int far_row = 0;
                double far_d = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double d = (x.row(i) - centers.row(labels[i])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far_row = i;
                    }
                }
                centers.row(c) = x.row(far_row);
            }
        }
    }
    return labels;
}

struct MStepParams {
    VectorXd weights;
    std::vector<VectorXd> means;
    std::vector<MatrixXd> covariances;
};

double min_eigenvalue(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) return -kInf;
    return eig.eigenvalues().minCoeff();
}

// Closed-form M-step for all six families; `resp` is n x G with rows summing
// to 1. Throws DegenerateFitError when a component loses its mass or its
// covariance falls below `collapse_eps` after regularization.
MStepParams m_step(const MatrixXd& x, const MatrixXd& resp, CovarianceFamily family,
                   double ridge, double collapse_eps) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    const int g_count = static_cast<int>(resp.cols());

    MStepParams out;
    out.weights.resize(g_count);
    out.means.resize(g_count);
    out.covariances.resize(g_count);

    VectorXd n_g = resp.colwise().sum();
    std::vector<MatrixXd> scatter(g_count);
    for (int g = 0; g < g_count; ++g) {
        if (!(n_g[g] > 1e-100)) {
            throw DegenerateFitError(
                "component " + std::to_string(g + 1) + " lost all responsibility mass",
                g);
        }
        out.weights[g] = n_g[g] / n;
        out.means[g] = (resp.col(g).transpose() * x).transpose() / n_g[g];
        MatrixXd centered = x.rowwise() - out.means[g].transpose();
        centered.array().colwise() *= resp.col(g).array().sqrt();
        scatter[g] = centered.transpose() * centered;
        scatter[g] = 0.5 * (scatter[g] + scatter[g].transpose()).eval();
    }

    switch (family) {
        case CovarianceFamily::EII: {
            double trace = 0.0;
            for (int g = 0; g < g_count; ++g) trace += scatter[g].trace();
            const double lambda = trace / (static_cast<double>(n) * p);
            for (int g = 0; g < g_count; ++g) {
                out.covariances[g] = lambda * MatrixXd::Identity(p, p);
            }
            break;
        }
        case CovarianceFamily::VII: {
            for (int g = 0; g < g_count; ++g) {
                const double lambda = scatter[g].trace() / (n_g[g] * p);
                out.covariances[g] = lambda * MatrixXd::Identity(p, p);
            }
            break;
        }
        case CovarianceFamily::EEI: {
            VectorXd diag = VectorXd::Zero(p);
            for (int g = 0; g < g_count; ++g) diag += scatter[g].diagonal();
            diag /= static_cast<double>(n);
            for (int g = 0; g < g_count; ++g) {
                out.covariances[g] = diag.asDiagonal();
            }
            break;
        }
        case CovarianceFamily::VVI: {
            for (int g = 0; g < g_count; ++g) {
                out.covariances[g] = (scatter[g].diagonal() / n_g[g]).asDiagonal();
            }
            break;
        }
        case CovarianceFamily::EEE: {
            MatrixXd pooled = MatrixXd::Zero(p, p);
            for (int g = 0; g < g_count; ++g) pooled += scatter[g];
            pooled /= static_cast<double>(n);
            for (int g = 0; g < g_count; ++g) out.covariances[g] = pooled;
            break;
        }
        case CovarianceFamily::VVV: {
            for (int g = 0; g < g_count; ++g) {
                out.covariances[g] = scatter[g] / n_g[g];
            }
            break;
        }
    }

    const bool diagonal_family = family == CovarianceFamily::EII ||
                                 family == CovarianceFamily::VII ||
                                 family == CovarianceFamily::EEI ||
                                 family == CovarianceFamily::VVI;
    for (int g = 0; g < g_count; ++g) {
        // Collapse is judged on the raw estimate: the ridge only adds
        // numerical headroom and must not rescue a rank-deficient component.
        const double min_eig = diagonal_family
                                   ? out.covariances[g].diagonal().minCoeff()
                                   : min_eigenvalue(out.covariances[g]);
        if (!(min_eig >= collapse_eps)) {
            throw DegenerateFitError("component " + std::to_string(g + 1) +
                                         " covariance collapsed (family " +
                                         family_name(family) + ")",
                                     g);
        }
        out.covariances[g].diagonal().array() += ridge;
    }
    return out;
}

MixtureModel to_model(MStepParams params, int p, CovarianceFamily family) {
    MixtureModel model;
    model.n_components = static_cast<int>(params.weights.size());
    model.dim = p;
    model.weights = std::move(params.weights);
    model.means = std::move(params.means);
    model.covariances = std::move(params.covariances);
    model.family = family;
    return model;
}

// One EM run from a k-means style seeding. Returns the report without BIC.
FitReport em_single(const MatrixXd& x, int g_count, CovarianceFamily family,
                    const EmConfig& config, double ridge, std::uint64_t seed) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());

    auto rng = make_rng(seed);
    MatrixXd resp = MatrixXd::Zero(n, g_count);
    if (g_count == 1) {
        resp.col(0).setOnes();
    } else {
        std::vector<int> labels = kmeans_labels(x, g_count, rng);
        for (int i = 0; i < n; ++i) resp(i, labels[i]) = 1.0;
    }

    FitReport report;
    MixtureModel model = to_model(m_step(x, resp, family, ridge, config.collapse_eps),
                                  p, family);
    double prev_ll = -kInf;
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        MixtureEvaluator ev(model);
        VectorXd log_f;
        resp = kernels::responsibilities(ev, x, &log_f);
        double ll = 0.0;
        for (int i = 0; i < n; ++i) ll += log_f[i];
        report.log_likelihood_history.push_back(ll);
        report.n_iterations = iter;
        const bool done = std::abs(ll - prev_ll) / std::max(1.0, std::abs(ll)) < config.tol;
        prev_ll = ll;
        if (done) {
            report.converged = true;
            break;
        }
        // Skip the trailing M-step so the returned model is the one the
        // recorded log-likelihood was computed under.
        if (iter == config.max_iter) break;
        model = to_model(m_step(x, resp, family, ridge, config.collapse_eps), p, family);
    }
    report.model = std::move(model);
    report.log_likelihood = prev_ll;
    return report;
}

double ridge_for(const MatrixXd& x, double reg_scale) {
    const int n = static_cast<int>(x.rows());
    VectorXd mean = x.colwise().mean();
    VectorXd var = (x.rowwise() - mean.transpose()).colwise().squaredNorm() /
                   static_cast<double>(n);
    return reg_scale * var.mean();
}

void check_data(const MatrixXd& x, int g_count) {
    if (g_count < 1) throw ContractViolation("n_components must be at least 1");
    if (x.rows() == 0 || x.cols() == 0) throw ContractViolation("data matrix is empty");
    if (x.rows() <= g_count) {
        throw ContractViolation("need more data rows than components");
    }
    if (!x.allFinite()) throw ContractViolation("data contains non-finite values");
}

}  // namespace

FitReport em_fit(const MatrixXd& data, int n_components, CovarianceFamily family,
                 const EmConfig& config, std::uint64_t seed) {
    check_data(data, n_components);
    if (config.n_starts < 1) throw ContractViolation("n_starts must be at least 1");
    if (!(config.tol > 0.0)) throw ContractViolation("tol must be positive");

    const double ridge = ridge_for(data, config.reg_scale);
    FitReport best;
    bool have_fit = false;
    int first_failure_component = -1;
    std::string first_failure_message;
    for (int start = 0; start < config.n_starts; ++start) {
        try {
            FitReport fit = em_single(data, n_components, family, config, ridge,
                                      derive_seed(seed, {static_cast<std::uint64_t>(start)}));
            if (!have_fit || fit.log_likelihood > best.log_likelihood) {
                best = std::move(fit);
                have_fit = true;
            }
        } catch (const DegenerateFitError& err) {
            if (first_failure_component < 0) {
                first_failure_component = err.component();
                first_failure_message = err.what();
            }
        } catch (const DegenerateModelError& err) {
            if (first_failure_component < 0) {
                first_failure_component = 0;
                first_failure_message = err.what();
            }
        }
    }
    if (!have_fit) {
        throw DegenerateFitError("every restart collapsed: " + first_failure_message,
                                 first_failure_component);
    }
    const int n = static_cast<int>(data.rows());
    best.n_parameters = mixture_parameter_count(family, n_components,
                                                static_cast<int>(data.cols()));
    best.bic = 2.0 * best.log_likelihood - best.n_parameters * std::log(n);
    return best;
}

SelectionReport select_model(const MatrixXd& data,
                             const std::vector<int>& component_grid,
                             const std::vector<CovarianceFamily>& families,
                             const EmConfig& config, std::uint64_t seed) {
    if (component_grid.empty() || families.empty()) {
        throw ContractViolation("model selection grid is empty");
    }
    SelectionReport report;
    report.grid.reserve(component_grid.size() * families.size());
    for (int g : component_grid) {
        for (CovarianceFamily family : families) {
            GridCell cell;
            cell.n_components = g;
            cell.family = family;
            const std::uint64_t cell_seed = derive_seed(
                seed, {static_cast<std::uint64_t>(g),
                       static_cast<std::uint64_t>(family)});
            try {
                FitReport fit = em_fit(data, g, family, config, cell_seed);
                cell.log_likelihood = fit.log_likelihood;
                cell.n_parameters = fit.n_parameters;
                cell.bic = fit.bic;
                cell.converged = fit.converged;
                const int idx = static_cast<int>(report.grid.size());
                const bool better =
                    report.best_index < 0 || cell.bic > report.best.bic ||
                    (cell.bic == report.best.bic &&
                     (cell.n_parameters < report.best.n_parameters ||
                      (cell.n_parameters == report.best.n_parameters &&
                       family_name(family) < family_name(report.best.model.family))));
                if (better) {
                    report.best = std::move(fit);
                    report.best_index = idx;
                }
            } catch (const DegenerateFitError&) {
                cell.degenerate = true;
                cell.log_likelihood = std::numeric_limits<double>::quiet_NaN();
                cell.n_parameters =
                    mixture_parameter_count(family, g, static_cast<int>(data.cols()));
                cell.bic = -kInf;
            }
            report.grid.push_back(cell);
        }
    }
    if (report.best_index < 0) {
        throw NoModelError("every model selection cell collapsed");
    }
    return report;
}

std::string grid_to_csv(const SelectionReport& report) {
    std::string out = "G,family,logL,nu,BIC,converged\n";
    char buf[64];
    auto append_double = [&](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        out.append(buf, ptr);
    };
    for (const GridCell& cell : report.grid) {
        out += std::to_string(cell.n_components);
        out += ',';
        out += family_name(cell.family);
        out += ',';
        append_double(cell.log_likelihood);
        out += ',';
        out += std::to_string(cell.n_parameters);
        out += ',';
        append_double(cell.bic);
        out += ',';
        out += cell.converged ? '1' : '0';
        out += '\n';
    }
    return out;
}

}  // namespace ppmix
