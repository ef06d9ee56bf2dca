#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ppmix/mixture.hpp"

namespace ppmix {

/// Precomputed per-component Cholesky factors and log normalizers for
/// repeated density evaluation of one fixed mixture. Construction throws
/// DegenerateModelError if any covariance fails to factor.
class MixtureEvaluator {
  public:
    explicit MixtureEvaluator(const MixtureModel& model);

    int n_components() const { return static_cast<int>(log_weight_.size()); }
    int dim() const { return dim_; }

    /// log of w_g * N(x | mu_g, Sigma_g). Serial, one point.
    double component_log_density(int g, const VectorXd& x) const;

    /// log f(x) for one point (log-sum-exp over components). Serial.
    double log_density_one(const VectorXd& x) const;

    /// Posterior probabilities for one point, written into `out` (resized).
    /// Returns log f(x).
    double responsibilities_one(const VectorXd& x, VectorXd& out) const;

    const MatrixXd& chol_lower(int g) const { return chol_[g]; }
    const VectorXd& mean(int g) const { return mean_[g]; }
    double log_weight(int g) const { return log_weight_[g]; }
    double log_normalizer(int g) const { return log_norm_[g]; }

  private:
    int dim_ = 0;
    std::vector<double> log_weight_;
    std::vector<double> log_norm_;  // -(p/2) log(2 pi) - sum(log diag L)
    std::vector<VectorXd> mean_;
    std::vector<MatrixXd> chol_;    // lower triangular L, Sigma = L L^T
};

/// Optimized batch kernels. Row-parallel with OpenMP; every per-row result is
/// computed independently and reductions run serially afterwards, so results
/// are bit-identical for any thread count.
namespace kernels {

/// log f per row.
VectorXd log_density(const MixtureEvaluator& ev, const MatrixXd& points);

/// Per-row posteriors (n x G) and, if `log_f` is non-null, log f per row.
MatrixXd responsibilities(const MixtureEvaluator& ev, const MatrixXd& points,
                          VectorXd* log_f = nullptr);

/// Sum of log f over rows (serial summation over the per-row vector).
double total_log_likelihood(const MixtureEvaluator& ev, const MatrixXd& points);

}  // namespace kernels

/// Naive serial implementations kept as a test oracle and benchmark baseline.
/// No Eigen solve calls: triangular systems are solved by hand-rolled forward
/// substitution so the two paths share no code.
namespace reference {

VectorXd log_density(const MixtureEvaluator& ev, const MatrixXd& points);
MatrixXd responsibilities(const MixtureEvaluator& ev, const MatrixXd& points,
                          VectorXd* log_f = nullptr);
double total_log_likelihood(const MixtureEvaluator& ev, const MatrixXd& points);

}  // namespace reference

}  // namespace ppmix
