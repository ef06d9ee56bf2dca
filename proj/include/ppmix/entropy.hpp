#pragma once

#include <cstdint>

#include "ppmix/mixture.hpp"

namespace ppmix {

/// Entropy of a d-dimensional Gaussian with the given covariance:
/// (d/2) (log(2 pi) + 1) + (1/2) log|Sigma|.
double gaussian_entropy(const MatrixXd& covariance);

/// Mean and covariance of the mixture as a whole:
/// mu = sum w_g mu_g, Sigma = sum w_g (Sigma_g + mu_g mu_g^T) - mu mu^T.
struct MixtureMoments {
    VectorXd mean;
    MatrixXd covariance;
};
MixtureMoments mixture_moments(const MixtureModel& model);

/// Deterministic entropy approximation by the unscented transform: per
/// component, 2d sigma points mu_g +/- sqrt(d) * S_g[:,s] with S_g the
/// symmetric square root of Sigma_g, each weighted 1/(2d); entropy is the
/// weight-averaged negative mean log density over those points. Exact for a
/// single Gaussian component.
double entropy_ut(const MixtureModel& model);

/// Monte Carlo entropy estimate from n_samples ancestral draws; the seeded
/// RNG makes it reproducible. Used to validate entropy_ut in tests.
double entropy_mc(const MixtureModel& model, int n_samples, std::uint64_t seed);

/// Negentropy of the mixture: entropy of a Gaussian with the mixture's
/// covariance minus the mixture entropy (unscented approximation).
/// Nonnegative up to approximation error; zero when the mixture is Gaussian.
double negentropy_ut(const MixtureModel& model);

/// Negentropy of B^T X for X ~ model: pushes the model through the basis and
/// scores the projected mixture. The projection pursuit fitness.
double negentropy_ut(const MixtureModel& model, const ProjectionBasis& basis);

/// Monte Carlo counterpart, used as the oracle in tests.
double negentropy_mc(const MixtureModel& model, const ProjectionBasis& basis,
                     int n_samples, std::uint64_t seed);

}  // namespace ppmix
