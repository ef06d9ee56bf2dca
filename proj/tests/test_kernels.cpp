#include <doctest.h>

#include <cmath>

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

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("evaluator matches the pinned mixture density") {
    const MixtureModel model = frozen_mixture_1d();
    const MixtureEvaluator ev(model);
    CHECK(ev.n_components() == 2);
    CHECK(ev.dim() == 1);
    CHECK(near(ev.log_density_one(VectorXd::Zero(1)), -1.849721449297127, 1e-14));
    // Component joint density: log(0.3) - 0.5 log(2 pi) - 0.5.
    const double expected =
        std::log(0.3) - 0.5 * std::log(2.0 * M_PI) - 0.5;
    CHECK(near(ev.component_log_density(0, VectorXd::Zero(1)), expected, 1e-14));
    // Far in the tail the result stays finite instead of underflowing to -inf
    // before the log.
    CHECK(std::isfinite(ev.log_density_one(VectorXd::Constant(1, -60.0))));
}

TEST_CASE("evaluator rejects a singular covariance") {
    VectorXd w(1);
    w << 1.0;
    VectorXd v(2);
    v << 1.0, 2.0;
    MixtureModel model;
    model.n_components = 1;
    model.dim = 2;
    model.weights = w;
    model.means = {VectorXd::Zero(2)};
    model.covariances = {v * v.transpose()};  // rank 1
    CHECK_THROWS_AS(MixtureEvaluator{model}, DegenerateModelError);
}

TEST_CASE("parallel kernels agree with the serial reference") {
    auto rng = make_rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + trial % 4;
        const int k = 1 + trial % 5;
        const MixtureModel model = testutil::random_mixture(rng, d, k);
        const MatrixXd points = sample(model, 50, 100 + trial).points;
        const MixtureEvaluator ev(model);

        const VectorXd lf_fast = kernels::log_density(ev, points);
        const VectorXd lf_ref = reference::log_density(ev, points);
        CHECK((lf_fast - lf_ref).cwiseAbs().maxCoeff() <= 1e-12);

        VectorXd logf_fast;
        VectorXd logf_ref;
        const MatrixXd resp_fast = kernels::responsibilities(ev, points, &logf_fast);
        const MatrixXd resp_ref = reference::responsibilities(ev, points, &logf_ref);
        CHECK((resp_fast - resp_ref).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((logf_fast - logf_ref).cwiseAbs().maxCoeff() <= 1e-12);
        for (int r = 0; r < resp_fast.rows(); ++r) {
            CHECK(near(resp_fast.row(r).sum(), 1.0, 1e-12));
        }

        CHECK(near(kernels::total_log_likelihood(ev, points),
                   reference::total_log_likelihood(ev, points), 1e-10));
    }
}

TEST_CASE("batch kernels match the one-point entry points") {
    auto rng = make_rng(23);
    const MixtureModel model = testutil::random_mixture(rng, 3, 4);
    const MatrixXd points = sample(model, 20, 9).points;
    const MixtureEvaluator ev(model);
    const VectorXd lf = kernels::log_density(ev, points);
    for (int r = 0; r < points.rows(); ++r) {
        CHECK(near(lf[r], ev.log_density_one(points.row(r).transpose()), 1e-13));
    }
    const double total = kernels::total_log_likelihood(ev, points);
    CHECK(near(total, lf.sum(), 1e-12));
}

}  // TEST_SUITE
