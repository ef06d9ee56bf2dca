#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ppmix/errors.hpp"

namespace ppmix {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

/// Parsimonious covariance structures with closed-form M-steps, named by the
/// volume/shape/orientation convention: E = equal across components,
/// V = varying, I = identity (spherical / axis-aligned).
enum class CovarianceFamily { EII, VII, EEI, VVI, EEE, VVV };

inline constexpr CovarianceFamily kAllFamilies[] = {
    CovarianceFamily::EII, CovarianceFamily::VII, CovarianceFamily::EEI,
    CovarianceFamily::VVI, CovarianceFamily::EEE, CovarianceFamily::VVV};

std::string family_name(CovarianceFamily family);
CovarianceFamily family_from_name(const std::string& name);

/// Free covariance parameters for a family with G components in p dimensions.
int covariance_parameter_count(CovarianceFamily family, int n_components, int dim);

/// Total free parameters: (G-1) weights + G*p means + covariance parameters.
int mixture_parameter_count(CovarianceFamily family, int n_components, int dim);

/// A finite Gaussian mixture: weights, means and covariances of each
/// component, plus the covariance family it was fitted under. Treated as
/// immutable after construction; all evaluation routines are pure.
struct MixtureModel {
    int n_components = 0;
    int dim = 0;
    VectorXd weights;                  // positive, sums to 1
    std::vector<VectorXd> means;       // n_components vectors of length dim
    std::vector<MatrixXd> covariances; // n_components SPD dim x dim matrices
    CovarianceFamily family = CovarianceFamily::VVV;

    /// Throws ContractViolation if any structural invariant is broken:
    /// weight positivity/normalization, symmetry, positive definiteness,
    /// conforming shapes.
    void validate() const;
};

/// Convenience constructor that validates.
MixtureModel make_mixture(VectorXd weights, std::vector<VectorXd> means,
                          std::vector<MatrixXd> covariances,
                          CovarianceFamily family = CovarianceFamily::VVV);

/// Volume/shape/orientation split of an SPD matrix:
/// Sigma = volume * U * diag(shape) * U^T with prod(shape) = 1.
struct EigenDecomposedCovariance {
    double volume = 1.0;   // |Sigma|^(1/p)
    VectorXd shape;        // normalized eigenvalues, det = 1
    MatrixXd orientation;  // orthogonal eigenvector matrix
};

EigenDecomposedCovariance decompose_covariance(const MatrixXd& covariance);
MatrixXd reconstruct_covariance(const EigenDecomposedCovariance& dec);

/// Column-orthonormal basis of a d-dimensional subspace of R^p.
struct ProjectionBasis {
    int rows = 0;  // p
    int cols = 0;  // d
    MatrixXd matrix;

    /// Throws ContractViolation unless B^T B = I within 1e-10 Frobenius.
    void validate() const;
};

ProjectionBasis make_basis(MatrixXd matrix);

/// Result of one EM fit.
struct FitReport {
    MixtureModel model;
    double log_likelihood = 0.0;
    double bic = 0.0;      // 2*logL - nu*log(n); larger is better
    int n_parameters = 0;  // nu
    int n_iterations = 0;
    bool converged = false;
    // Per-iteration log-likelihoods, kept for monotonicity diagnostics.
    std::vector<double> log_likelihood_history;
};

// ---- Evaluation operations -------------------------------------------------

/// log f(x) per row of `points` via log-sum-exp over component log densities.
VectorXd log_density(const MixtureModel& model, const MatrixXd& points);

/// Posterior component probabilities per row; rows sum to 1, computed in log
/// space so that far-out points never produce NaN.
MatrixXd responsibilities(const MixtureModel& model, const MatrixXd& points);

/// Ancestral sampling: component index from the weights, then a Gaussian
/// draw. Deterministic for a fixed seed. Labels are 1-based.
struct SampleResult {
    MatrixXd points;
    VectorXi labels;
};
SampleResult sample(const MixtureModel& model, int n, std::uint64_t seed);

/// Pushes the mixture through z = B^T x: same weights, means B^T mu,
/// covariances B^T Sigma B. The result is tagged VVV since a projection does
/// not preserve constrained families in general.
MixtureModel project_model(const MixtureModel& model, const ProjectionBasis& basis);

}  // namespace ppmix
