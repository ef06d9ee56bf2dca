#include "ppmix/kernels.hpp"

#include <cmath>
#include <limits>

namespace ppmix {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

}  // namespace

MixtureEvaluator::MixtureEvaluator(const MixtureModel& model) : dim_(model.dim) {
    const int g_count = model.n_components;
    if (g_count < 1 || dim_ < 1) {
        throw ContractViolation("evaluator needs a non-empty model");
    }
    if (model.weights.size() != g_count ||
        static_cast<int>(model.means.size()) != g_count ||
        static_cast<int>(model.covariances.size()) != g_count) {
        throw ContractViolation("model arrays do not match n_components");
    }
    if (!(model.weights.array() > 0.0).all() ||
        std::abs(model.weights.sum() - 1.0) > 1e-10) {
        throw ContractViolation("model weights must be positive and sum to 1");
    }
    log_weight_.resize(g_count);
    log_norm_.resize(g_count);
    mean_.resize(g_count);
    chol_.resize(g_count);
    for (int g = 0; g < g_count; ++g) {
        if (model.means[g].size() != dim_ || model.covariances[g].rows() != dim_ ||
            model.covariances[g].cols() != dim_) {
            throw ContractViolation("model component has inconsistent dimension");
        }
        Eigen::LLT<MatrixXd> llt(model.covariances[g]);
        if (llt.info() != Eigen::Success) {
            throw DegenerateModelError("component " + std::to_string(g + 1) +
                                       " covariance failed to factor");
        }
        chol_[g] = llt.matrixL();
        mean_[g] = model.means[g];
        log_weight_[g] = std::log(model.weights[g]);
        log_norm_[g] = -0.5 * dim_ * kLogTwoPi -
                       chol_[g].diagonal().array().log().sum();
    }
}

double MixtureEvaluator::component_log_density(int g, const VectorXd& x) const {
    VectorXd u = x - mean_[g];
    chol_[g].triangularView<Eigen::Lower>().solveInPlace(u);
    return log_weight_[g] + log_norm_[g] - 0.5 * u.squaredNorm();
}

double MixtureEvaluator::log_density_one(const VectorXd& x) const {
    const int g_count = n_components();
    double best = -std::numeric_limits<double>::infinity();
    VectorXd logs(g_count);
    for (int g = 0; g < g_count; ++g) {
        logs[g] = component_log_density(g, x);
        if (logs[g] > best) best = logs[g];
    }
    double acc = 0.0;
    for (int g = 0; g < g_count; ++g) acc += std::exp(logs[g] - best);
    return best + std::log(acc);
}

double MixtureEvaluator::responsibilities_one(const VectorXd& x, VectorXd& out) const {
    const int g_count = n_components();
    out.resize(g_count);
    double best = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < g_count; ++g) {
        out[g] = component_log_density(g, x);
        if (out[g] > best) best = out[g];
    }
    double acc = 0.0;
    for (int g = 0; g < g_count; ++g) acc += std::exp(out[g] - best);
    const double log_f = best + std::log(acc);
    for (int g = 0; g < g_count; ++g) out[g] = std::exp(out[g] - log_f);
    return log_f;
}

namespace kernels {

VectorXd log_density(const MixtureEvaluator& ev, const MatrixXd& points) {
    if (points.cols() != ev.dim()) {
        throw ContractViolation("points dimension does not match evaluator");
    }
    const int n = static_cast<int>(points.rows());
    VectorXd out(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        out[i] = ev.log_density_one(points.row(i).transpose());
    }
    return out;
}

MatrixXd responsibilities(const MixtureEvaluator& ev, const MatrixXd& points,
                          VectorXd* log_f) {
    if (points.cols() != ev.dim()) {
        throw ContractViolation("points dimension does not match evaluator");
    }
    const int n = static_cast<int>(points.rows());
    MatrixXd out(n, ev.n_components());
    if (log_f != nullptr) log_f->resize(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        VectorXd row;
        const double lf = ev.responsibilities_one(points.row(i).transpose(), row);
        out.row(i) = row.transpose();
        if (log_f != nullptr) (*log_f)[i] = lf;
    }
    return out;
}

double total_log_likelihood(const MixtureEvaluator& ev, const MatrixXd& points) {
    // Per-row terms are computed in parallel; the reduction runs serially in
    // row order so the sum is identical for any thread count.
    VectorXd per_row = log_density(ev, points);
    double acc = 0.0;
    for (int i = 0; i < per_row.size(); ++i) acc += per_row[i];
    return acc;
}

}  // namespace kernels

namespace reference {
namespace {

// Forward substitution for L y = u, L lower triangular.
void solve_lower(const MatrixXd& chol, const double* u, double* y, int p) {
    for (int i = 0; i < p; ++i) {
        double acc = u[i];
        for (int j = 0; j < i; ++j) acc -= chol(i, j) * y[j];
        y[i] = acc / chol(i, i);
    }
}

double component_log_density(const MixtureEvaluator& ev, int g,
                             const double* x, double* u, double* y, int p) {
    for (int k = 0; k < p; ++k) u[k] = x[k] - ev.mean(g)[k];
    solve_lower(ev.chol_lower(g), u, y, p);
    double quad = 0.0;
    for (int k = 0; k < p; ++k) quad += y[k] * y[k];
    return ev.log_weight(g) + ev.log_normalizer(g) - 0.5 * quad;
}

}  // namespace

VectorXd log_density(const MixtureEvaluator& ev, const MatrixXd& points) {
    if (points.cols() != ev.dim()) {
        throw ContractViolation("points dimension does not match evaluator");
    }
    const int n = static_cast<int>(points.rows());
    const int p = ev.dim();
    const int g_count = ev.n_components();
    VectorXd out(n);
    std::vector<double> x(p), u(p), y(p), logs(g_count);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < p; ++k) x[k] = points(i, k);
        double best = -std::numeric_limits<double>::infinity();
        for (int g = 0; g < g_count; ++g) {
            logs[g] = component_log_density(ev, g, x.data(), u.data(), y.data(), p);
            if (logs[g] > best) best = logs[g];
        }
        double acc = 0.0;
        for (int g = 0; g < g_count; ++g) acc += std::exp(logs[g] - best);
        out[i] = best + std::log(acc);
    }
    return out;
}

MatrixXd responsibilities(const MixtureEvaluator& ev, const MatrixXd& points,
                          VectorXd* log_f) {
    if (points.cols() != ev.dim()) {
        throw ContractViolation("points dimension does not match evaluator");
    }
    const int n = static_cast<int>(points.rows());
    const int p = ev.dim();
    const int g_count = ev.n_components();
    MatrixXd out(n, g_count);
    if (log_f != nullptr) log_f->resize(n);
    std::vector<double> x(p), u(p), y(p), logs(g_count);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < p; ++k) x[k] = points(i, k);
        double best = -std::numeric_limits<double>::infinity();
        for (int g = 0; g < g_count; ++g) {
            logs[g] = component_log_density(ev, g, x.data(), u.data(), y.data(), p);
            if (logs[g] > best) best = logs[g];
        }
        double acc = 0.0;
        for (int g = 0; g < g_count; ++g) acc += std::exp(logs[g] - best);
        const double lf = best + std::log(acc);
        for (int g = 0; g < g_count; ++g) out(i, g) = std::exp(logs[g] - lf);
        if (log_f != nullptr) (*log_f)[i] = lf;
    }
    return out;
}

double total_log_likelihood(const MixtureEvaluator& ev, const MatrixXd& points) {
    VectorXd per_row = log_density(ev, points);
    double acc = 0.0;
    for (int i = 0; i < per_row.size(); ++i) acc += per_row[i];
    return acc;
}

}  // namespace reference

}  // namespace ppmix
