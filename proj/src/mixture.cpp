#include "ppmix/mixture.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "ppmix/kernels.hpp"
#include "ppmix/rng.hpp"

namespace ppmix {

std::string family_name(CovarianceFamily family) {
    switch (family) {
        case CovarianceFamily::EII: return "EII";
        case CovarianceFamily::VII: return "VII";
        case CovarianceFamily::EEI: return "EEI";
        case CovarianceFamily::VVI: return "VVI";
        case CovarianceFamily::EEE: return "EEE";
        case CovarianceFamily::VVV: return "VVV";
    }
    throw ContractViolation("unknown covariance family value");
}

CovarianceFamily family_from_name(const std::string& name) {
    for (CovarianceFamily f : kAllFamilies) {
        if (family_name(f) == name) return f;
    }
    throw ContractViolation("unknown covariance family name: " + name);
}

int covariance_parameter_count(CovarianceFamily family, int n_components, int dim) {
    if (n_components < 1 || dim < 1) {
        throw ContractViolation("parameter count needs n_components >= 1 and dim >= 1");
    }
    const int g = n_components;
    const int p = dim;
    switch (family) {
        case CovarianceFamily::EII: return 1;
        case CovarianceFamily::VII: return g;
        case CovarianceFamily::EEI: return p;
        case CovarianceFamily::VVI: return g * p;
        case CovarianceFamily::EEE: return p * (p + 1) / 2;
        case CovarianceFamily::VVV: return g * p * (p + 1) / 2;
    }
    throw ContractViolation("unknown covariance family value");
}

int mixture_parameter_count(CovarianceFamily family, int n_components, int dim) {
    return (n_components - 1) + n_components * dim +
           covariance_parameter_count(family, n_components, dim);
}

void MixtureModel::validate() const {
    if (n_components < 1) throw ContractViolation("mixture needs at least one component");
    if (dim < 1) throw ContractViolation("mixture dimension must be positive");
    if (weights.size() != n_components) {
        throw ContractViolation("weight vector size does not match n_components");
    }
    if (static_cast<int>(means.size()) != n_components ||
        static_cast<int>(covariances.size()) != n_components) {
        throw ContractViolation("means/covariances count does not match n_components");
    }
    if (!(weights.array() > 0.0).all()) {
        throw ContractViolation("mixture weights must be strictly positive");
    }
    if (std::abs(weights.sum() - 1.0) > 1e-12) {
        throw ContractViolation("mixture weights must sum to 1");
    }
    for (int g = 0; g < n_components; ++g) {
        if (means[g].size() != dim) {
            throw ContractViolation("mean vector has wrong dimension");
        }
        if (!means[g].allFinite()) {
            throw ContractViolation("mean vector has non-finite entries");
        }
        const MatrixXd& cov = covariances[g];
        if (cov.rows() != dim || cov.cols() != dim) {
            throw ContractViolation("covariance matrix has wrong shape");
        }
        if (!cov.allFinite()) {
            throw ContractViolation("covariance matrix has non-finite entries");
        }
        const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
        if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw ContractViolation("covariance matrix is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
        if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
            throw ContractViolation("covariance matrix is not positive definite");
        }
    }
}

MixtureModel make_mixture(VectorXd weights, std::vector<VectorXd> means,
                          std::vector<MatrixXd> covariances, CovarianceFamily family) {
    MixtureModel model;
    model.n_components = static_cast<int>(weights.size());
    model.dim = means.empty() ? 0 : static_cast<int>(means.front().size());
    model.weights = std::move(weights);
    model.means = std::move(means);
    model.covariances = std::move(covariances);
    model.family = family;
    model.validate();
    return model;
}

EigenDecomposedCovariance decompose_covariance(const MatrixXd& covariance) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(covariance);
    if (eig.info() != Eigen::Success) {
        throw ContractViolation("eigendecomposition failed");
    }
    const int p = static_cast<int>(covariance.rows());
    VectorXd values = eig.eigenvalues().reverse();
    MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
    if (values.minCoeff() <= 0.0) {
        throw ContractViolation("covariance is not positive definite");
    }
    EigenDecomposedCovariance dec;
    dec.volume = std::exp(values.array().log().mean());
    dec.shape = values / dec.volume;
    dec.orientation = std::move(vectors);
    (void)p;
    return dec;
}

MatrixXd reconstruct_covariance(const EigenDecomposedCovariance& dec) {
    return dec.volume *
           (dec.orientation * dec.shape.asDiagonal() * dec.orientation.transpose());
}

void ProjectionBasis::validate() const {
    if (rows < 1 || cols < 1 || cols > rows) {
        throw ContractViolation("projection basis needs 1 <= cols <= rows");
    }
    if (matrix.rows() != rows || matrix.cols() != cols) {
        throw ContractViolation("projection basis shape mismatch");
    }
    MatrixXd gram = matrix.transpose() * matrix;
    gram -= MatrixXd::Identity(cols, cols);
    if (gram.norm() > 1e-10) {
        throw ContractViolation("projection basis columns are not orthonormal");
    }
}

ProjectionBasis make_basis(MatrixXd matrix) {
    ProjectionBasis basis;
    basis.rows = static_cast<int>(matrix.rows());
    basis.cols = static_cast<int>(matrix.cols());
    basis.matrix = std::move(matrix);
    basis.validate();
    return basis;
}

VectorXd log_density(const MixtureModel& model, const MatrixXd& points) {
    MixtureEvaluator ev(model);
    if (points.cols() != model.dim) {
        throw ContractViolation("points dimension does not match model");
    }
    return kernels::log_density(ev, points);
}

MatrixXd responsibilities(const MixtureModel& model, const MatrixXd& points) {
    MixtureEvaluator ev(model);
    if (points.cols() != model.dim) {
        throw ContractViolation("points dimension does not match model");
    }
    return kernels::responsibilities(ev, points);
}

SampleResult sample(const MixtureModel& model, int n, std::uint64_t seed) {
    model.validate();
    if (n < 1) throw ContractViolation("sample size must be positive");
    const int p = model.dim;
    const int g_count = model.n_components;

    VectorXd cum(g_count);
    double acc = 0.0;
    for (int g = 0; g < g_count; ++g) {
        acc += model.weights[g];
        cum[g] = acc;
    }
    cum[g_count - 1] = 1.0;

    std::vector<MatrixXd> chol(g_count);
    for (int g = 0; g < g_count; ++g) {
        Eigen::LLT<MatrixXd> llt(model.covariances[g]);
        if (llt.info() != Eigen::Success) {
            throw DegenerateModelError("covariance failed to factor while sampling");
        }
        chol[g] = llt.matrixL();
    }

    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    SampleResult out;
    out.points.resize(n, p);
    out.labels.resize(n);
    VectorXd z(p);
    for (int i = 0; i < n; ++i) {
        const double u = unif(rng);
        int g = 0;
        while (g < g_count - 1 && u >= cum[g]) ++g;
        for (int k = 0; k < p; ++k) z[k] = normal(rng);
        out.points.row(i) = (model.means[g] + chol[g] * z).transpose();
        out.labels[i] = g + 1;
    }
    return out;
}

MixtureModel project_model(const MixtureModel& model, const ProjectionBasis& basis) {
    if (basis.rows != model.dim) {
        throw ContractViolation("projection basis rows do not match model dimension");
    }
    const MatrixXd& b = basis.matrix;
    MixtureModel out;
    out.n_components = model.n_components;
    out.dim = basis.cols;
    out.weights = model.weights;
    out.family = CovarianceFamily::VVV;
    out.means.resize(model.n_components);
    out.covariances.resize(model.n_components);
    for (int g = 0; g < model.n_components; ++g) {
        out.means[g] = b.transpose() * model.means[g];
        MatrixXd cov = b.transpose() * model.covariances[g] * b;
        out.covariances[g] = 0.5 * (cov + cov.transpose());
    }
    return out;
}

}  // namespace ppmix
