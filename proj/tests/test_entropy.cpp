#include <doctest.h>

#include <cmath>

#include "ppmix/entropy.hpp"
#include "ppmix/kernels.hpp"
#include "test_util.hpp"

using namespace ppmix;
using testutil::near;

namespace {

MixtureModel frozen_mixture_1d() {
    VectorXd w(2);
    w << 0.3, 0.7;
    std::vector<VectorXd> means{VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 2.0)};
    std::vector<MatrixXd> covs{MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, 4.0)};
    return make_mixture(w, means, covs);
}

// Simpson quadrature of -f log f over a wide bracket; exact per panel for
// smooth f, grid fine enough for 1e-6 accuracy on these mixtures.
double entropy_quadrature_1d(const MixtureModel& model) {
    const MixtureEvaluator ev(model);
    double lo = 1e300;
    double hi = -1e300;
    for (int g = 0; g < model.n_components; ++g) {
        const double s = std::sqrt(model.covariances[g](0, 0));
        lo = std::min(lo, model.means[g][0] - 10.0 * s);
        hi = std::max(hi, model.means[g][0] + 10.0 * s);
    }
    const int panels = 4000;
    const double h = (hi - lo) / panels;
    auto integrand = [&](double z) {
        const double lf = ev.log_density_one(VectorXd::Constant(1, z));
        return -std::exp(lf) * lf;
    };
    double acc = integrand(lo) + integrand(hi);
    for (int k = 1; k < panels; ++k) {
        acc += integrand(lo + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

}  // namespace

TEST_SUITE("entropy") {

TEST_CASE("gaussian entropy oracles") {
    CHECK(near(gaussian_entropy(MatrixXd::Identity(1, 1)), 1.4189385332046727, 1e-15));
    CHECK(near(gaussian_entropy(MatrixXd::Identity(2, 2)), 2.8378770664093453, 1e-15));
    MatrixXd diag41 = MatrixXd::Zero(2, 2);
    diag41(0, 0) = 4.0;
    diag41(1, 1) = 1.0;
    CHECK(near(gaussian_entropy(diag41), 3.5310242469692907, 1e-15));
}

TEST_CASE("mixture moments follow the law of total covariance") {
    const MixtureModel model = frozen_mixture_1d();
    const MixtureMoments mom = mixture_moments(model);
    // mu = 0.3 * (-1) + 0.7 * 2 = 1.1
    CHECK(near(mom.mean[0], 1.1, 1e-14));
    // var = 0.3 * (1 + 1) + 0.7 * (4 + 4) - 1.21
    CHECK(near(mom.covariance(0, 0), 0.3 * 2.0 + 0.7 * 8.0 - 1.21, 1e-14));
}

TEST_CASE("unscented entropy is exact for one Gaussian") {
    auto rng = make_rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + trial % 3;
        VectorXd w(1);
        w << 1.0;
        VectorXd mu(d);
        for (int j = 0; j < d; ++j) mu[j] = 0.5 * j - 1.0;
        const MixtureModel g = make_mixture(w, {mu}, {testutil::random_spd(rng, d)});
        CHECK(near(entropy_ut(g), gaussian_entropy(g.covariances[0]), 1e-12));
        CHECK(std::abs(negentropy_ut(g)) <= 1e-8);
    }
}

TEST_CASE("far-separated halves add one bit of mixing entropy") {
    VectorXd w(2);
    w << 0.5, 0.5;
    std::vector<VectorXd> means{VectorXd::Constant(1, 0.0), VectorXd::Constant(1, 50.0)};
    std::vector<MatrixXd> covs{MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1)};
    const MixtureModel model = make_mixture(w, means, covs);
    CHECK(near(entropy_ut(model), 2.1120857137646181, 1e-9));
}

TEST_CASE("unscented entropy tracks quadrature on the pinned mixture") {
    const MixtureModel model = frozen_mixture_1d();
    const double exact = entropy_quadrature_1d(model);
    CHECK(near(entropy_ut(model), exact, 0.05));
    CHECK(near(entropy_mc(model, 200000, 77), exact, 0.02));
}

TEST_CASE("monte carlo entropy is deterministic in the seed") {
    const MixtureModel model = frozen_mixture_1d();
    CHECK(entropy_mc(model, 10000, 5) == entropy_mc(model, 10000, 5));
    CHECK(entropy_mc(model, 10000, 5) != entropy_mc(model, 10000, 6));
}

TEST_CASE("negentropy through a basis matches the projected model") {
    auto rng = make_rng(59);
    const MixtureModel model = testutil::random_mixture(rng, 5, 3);
    const MatrixXd q = testutil::random_rotation(rng, 5).leftCols(2);
    const ProjectionBasis basis = make_basis(q);
    CHECK(near(negentropy_ut(model, basis), negentropy_ut(project_model(model, basis)),
               1e-14));
    const double mc = negentropy_mc(model, basis, 200000, 11);
    CHECK(near(negentropy_ut(model, basis), mc, 0.05));
}

}  // TEST_SUITE
