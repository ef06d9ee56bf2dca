#pragma once

#include <cmath>
#include <random>

#include "ppmix/mixture.hpp"
#include "ppmix/rng.hpp"

namespace ppmix::testutil {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

/// Random rotation from the QR factorization of a Gaussian matrix, with the
/// diagonal sign fixed so the distribution is Haar.
inline MatrixXd random_rotation(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> normal(0.0, 1.0);
    MatrixXd a(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) a(r, c) = normal(rng);
    }
    Eigen::HouseholderQR<MatrixXd> qr(a);
    MatrixXd q = qr.householderQ();
    MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < d; ++c) {
        if (r(c, c) < 0.0) q.col(c) *= -1.0;
    }
    return q;
}

/// Random SPD matrix with eigenvalues uniform in [lo, hi].
inline MatrixXd random_spd(std::mt19937_64& rng, int d, double lo = 0.3, double hi = 3.0) {
    std::uniform_real_distribution<double> unif(lo, hi);
    const MatrixXd q = random_rotation(rng, d);
    VectorXd eigs(d);
    for (int k = 0; k < d; ++k) eigs[k] = unif(rng);
    MatrixXd sigma = q * eigs.asDiagonal() * q.transpose();
    return 0.5 * (sigma + sigma.transpose());
}

/// Random mixture: K components in d dimensions, means in a +-spread box,
/// weights bounded away from zero.
inline MixtureModel random_mixture(std::mt19937_64& rng, int d, int k_components,
                                   double spread = 4.0, double lo = 0.3, double hi = 3.0) {
    std::uniform_real_distribution<double> unif01(0.0, 1.0);
    std::uniform_real_distribution<double> unif_mean(-spread, spread);
    VectorXd weights(k_components);
    for (int g = 0; g < k_components; ++g) weights[g] = 0.2 + unif01(rng);
    weights /= weights.sum();
    std::vector<VectorXd> means;
    std::vector<MatrixXd> covs;
    for (int g = 0; g < k_components; ++g) {
        VectorXd mu(d);
        for (int j = 0; j < d; ++j) mu[j] = unif_mean(rng);
        means.push_back(mu);
        covs.push_back(random_spd(rng, d, lo, hi));
    }
    return make_mixture(weights, means, covs);
}

/// Largest violation of the covariance structure promised by the family.
inline double family_constraint_violation(const MixtureModel& model) {
    const int p = model.dim;
    double worst = 0.0;
    auto offdiag = [&](const MatrixXd& s) {
        double v = 0.0;
        for (int r = 0; r < p; ++r) {
            for (int c = 0; c < p; ++c) {
                if (r != c) v = std::max(v, std::abs(s(r, c)));
            }
        }
        return v;
    };
    switch (model.family) {
        case CovarianceFamily::EII:
        case CovarianceFamily::VII: {
            for (const MatrixXd& s : model.covariances) {
                worst = std::max(worst, offdiag(s));
                for (int r = 1; r < p; ++r) {
                    worst = std::max(worst, std::abs(s(r, r) - s(0, 0)));
                }
            }
            if (model.family == CovarianceFamily::EII) {
                for (const MatrixXd& s : model.covariances) {
                    worst = std::max(worst,
                                     std::abs(s(0, 0) - model.covariances[0](0, 0)));
                }
            }
            break;
        }
        case CovarianceFamily::EEI:
        case CovarianceFamily::VVI: {
            for (const MatrixXd& s : model.covariances) worst = std::max(worst, offdiag(s));
            if (model.family == CovarianceFamily::EEI) {
                for (const MatrixXd& s : model.covariances) {
                    worst = std::max(
                        worst, (s.diagonal() - model.covariances[0].diagonal())
                                   .cwiseAbs()
                                   .maxCoeff());
                }
            }
            break;
        }
        case CovarianceFamily::EEE: {
            for (const MatrixXd& s : model.covariances) {
                worst = std::max(worst, (s - model.covariances[0]).cwiseAbs().maxCoeff());
            }
            break;
        }
        case CovarianceFamily::VVV:
            break;
    }
    for (const MatrixXd& s : model.covariances) {
        worst = std::max(worst, (s - s.transpose()).cwiseAbs().maxCoeff());
    }
    return worst;
}

/// True when the log-likelihood history never drops by more than
/// slack * max(1, |value|).
inline bool history_nondecreasing(const std::vector<double>& history, double slack) {
    for (std::size_t t = 1; t < history.size(); ++t) {
        const double floor = history[t - 1] - slack * std::max(1.0, std::abs(history[t - 1]));
        if (history[t] < floor) return false;
    }
    return true;
}

}  // namespace ppmix::testutil
