#include "ppmix/entropy.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ppmix/kernels.hpp"

namespace ppmix {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

}  // namespace

double gaussian_entropy(const MatrixXd& covariance) {
    if (covariance.rows() != covariance.cols() || covariance.rows() < 1) {
        throw ContractViolation("gaussian entropy needs a square covariance");
    }
    Eigen::LLT<MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
        throw DegenerateModelError("covariance failed to factor in entropy");
    }
    const double log_det =
        2.0 * MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    const double d = static_cast<double>(covariance.rows());
    return 0.5 * (d * (kLogTwoPi + 1.0) + log_det);
}

MixtureMoments mixture_moments(const MixtureModel& model) {
    const int p = model.dim;
    MixtureMoments out;
    out.mean = VectorXd::Zero(p);
    for (int g = 0; g < model.n_components; ++g) {
        out.mean += model.weights[g] * model.means[g];
    }
    out.covariance = MatrixXd::Zero(p, p);
    for (int g = 0; g < model.n_components; ++g) {
        out.covariance += model.weights[g] *
                          (model.covariances[g] +
                           model.means[g] * model.means[g].transpose());
    }
    out.covariance -= out.mean * out.mean.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    return out;
}

double entropy_ut(const MixtureModel& model) {
    const int p = model.dim;
    const double scale = std::sqrt(static_cast<double>(p));
    MixtureEvaluator ev(model);
    double h = 0.0;
    VectorXd point(p);
    for (int g = 0; g < model.n_components; ++g) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(model.covariances[g]);
        if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
            throw DegenerateModelError("sigma point construction failed");
        }
        const MatrixXd sqrt_cov = eig.operatorSqrt();
        double mean_log = 0.0;
        for (int s = 0; s < p; ++s) {
            point = model.means[g] + scale * sqrt_cov.col(s);
            mean_log += ev.log_density_one(point);
            point = model.means[g] - scale * sqrt_cov.col(s);
            mean_log += ev.log_density_one(point);
        }
        mean_log /= 2.0 * p;
        h -= model.weights[g] * mean_log;
    }
    return h;
}

double entropy_mc(const MixtureModel& model, int n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw ContractViolation("sample count must be positive");
    SampleResult draws = sample(model, n_samples, seed);
    MixtureEvaluator ev(model);
    VectorXd log_f = kernels::log_density(ev, draws.points);
    double acc = 0.0;
    for (int i = 0; i < n_samples; ++i) acc += log_f[i];
    return -acc / n_samples;
}

double negentropy_ut(const MixtureModel& model) {
    MixtureMoments moments = mixture_moments(model);
    return gaussian_entropy(moments.covariance) - entropy_ut(model);
}

double negentropy_ut(const MixtureModel& model, const ProjectionBasis& basis) {
    return negentropy_ut(project_model(model, basis));
}

double negentropy_mc(const MixtureModel& model, const ProjectionBasis& basis,
                     int n_samples, std::uint64_t seed) {
    MixtureModel projected = project_model(model, basis);
    MixtureMoments moments = mixture_moments(projected);
    return gaussian_entropy(moments.covariance) -
           entropy_mc(projected, n_samples, seed);
}

}  // namespace ppmix
