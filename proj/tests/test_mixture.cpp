#include <doctest.h>

#include <cmath>

#include "ppmix/mixture.hpp"
#include "test_util.hpp"

using namespace ppmix;
using testutil::near;

namespace {

MixtureModel frozen_mixture_1d() {
    // w = (0.3, 0.7), mu = (-1, 2), var = (1, 4); log f(0) is pinned below.
    VectorXd w(2);
    w << 0.3, 0.7;
    std::vector<VectorXd> means{VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 2.0)};
    std::vector<MatrixXd> covs{MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, 4.0)};
    return make_mixture(w, means, covs);
}

}  // namespace

TEST_SUITE("mixture") {

TEST_CASE("family names round trip") {
    for (CovarianceFamily family : kAllFamilies) {
        CHECK(family_from_name(family_name(family)) == family);
    }
    CHECK(family_name(CovarianceFamily::EII) == "EII");
    CHECK(family_name(CovarianceFamily::VVV) == "VVV");
    CHECK_THROWS_AS(family_from_name("XYZ"), ContractViolation);
}

TEST_CASE("parameter counts") {
    const int g = 3;
    const int p = 4;
    CHECK(covariance_parameter_count(CovarianceFamily::EII, g, p) == 1);
    CHECK(covariance_parameter_count(CovarianceFamily::VII, g, p) == 3);
    CHECK(covariance_parameter_count(CovarianceFamily::EEI, g, p) == 4);
    CHECK(covariance_parameter_count(CovarianceFamily::VVI, g, p) == 12);
    CHECK(covariance_parameter_count(CovarianceFamily::EEE, g, p) == 10);
    CHECK(covariance_parameter_count(CovarianceFamily::VVV, g, p) == 30);
    // (G - 1) + G * p = 2 + 12 = 14 on top of the covariance count.
    CHECK(mixture_parameter_count(CovarianceFamily::EII, g, p) == 15);
    CHECK(mixture_parameter_count(CovarianceFamily::VVV, g, p) == 44);
}

TEST_CASE("validate rejects structural breakage") {
    MixtureModel good = frozen_mixture_1d();
    CHECK_NOTHROW(good.validate());

    MixtureModel bad = good;
    bad.weights[0] = 0.5;  // sum 1.2
    CHECK_THROWS_AS(bad.validate(), ContractViolation);

    bad = good;
    bad.weights[0] = -0.3;
    bad.weights[1] = 1.3;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);

    bad = good;
    bad.covariances[0](0, 0) = -1.0;
    CHECK_THROWS_AS(bad.validate(), ContractViolation);

    bad = good;
    bad.means[0] = VectorXd::Zero(3);
    CHECK_THROWS_AS(bad.validate(), ContractViolation);

    auto rng = make_rng(11);
    MixtureModel asym = testutil::random_mixture(rng, 3, 2);
    asym.covariances[0](0, 1) += 1e-3;
    CHECK_THROWS_AS(asym.validate(), ContractViolation);
}

TEST_CASE("covariance decomposition round trips") {
    auto rng = make_rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + static_cast<int>(trial % 4);
        const MatrixXd sigma = testutil::random_spd(rng, d);
        const EigenDecomposedCovariance dec = decompose_covariance(sigma);
        CHECK(near(dec.shape.prod(), 1.0, 1e-10));
        CHECK(near(dec.volume, std::pow(sigma.determinant(), 1.0 / d), 1e-8));
        CHECK((dec.orientation * dec.orientation.transpose() - MatrixXd::Identity(d, d))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-10);
        const MatrixXd back = reconstruct_covariance(dec);
        CHECK((back - sigma).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("make_basis requires orthonormal columns") {
    MatrixXd ok(3, 2);
    ok << 1, 0, 0, 1, 0, 0;
    CHECK_NOTHROW(make_basis(ok));
    MatrixXd skew = ok;
    skew(2, 0) = 0.1;
    CHECK_THROWS_AS(make_basis(skew), ContractViolation);
}

TEST_CASE("log_density matches the pinned value") {
    const MixtureModel model = frozen_mixture_1d();
    MatrixXd x(1, 1);
    x(0, 0) = 0.0;
    const VectorXd lf = log_density(model, x);
    CHECK(near(lf[0], -1.849721449297127, 1e-14));
}

TEST_CASE("responsibilities are a proper posterior") {
    const MixtureModel model = frozen_mixture_1d();
    MatrixXd x(3, 1);
    x << 0.0, -1.0, 1e8;  // the far point must not produce NaN
    const MatrixXd resp = responsibilities(model, x);
    REQUIRE(resp.rows() == 3);
    REQUIRE(resp.cols() == 2);
    for (int r = 0; r < 3; ++r) {
        CHECK(near(resp.row(r).sum(), 1.0, 1e-12));
        CHECK(std::isfinite(resp(r, 0)));
        CHECK(resp(r, 0) >= 0.0);
    }
    // At x = 0 the posterior follows from the two joint densities directly.
    const double j0 = 0.3 * std::exp(-0.5) / std::sqrt(2.0 * M_PI);
    const double j1 = 0.7 * std::exp(-0.5) / std::sqrt(8.0 * M_PI);
    CHECK(near(resp(0, 0), j0 / (j0 + j1), 1e-13));
    // The far point is closer to component 2 in Mahalanobis terms.
    CHECK(near(resp(2, 1), 1.0, 1e-12));
}

TEST_CASE("sampling is deterministic and calibrated") {
    const MixtureModel model = frozen_mixture_1d();
    const SampleResult a = sample(model, 20000, 42);
    const SampleResult b = sample(model, 20000, 42);
    CHECK(a.points == b.points);
    CHECK(a.labels == b.labels);
    REQUIRE(a.points.rows() == 20000);
    REQUIRE(a.labels.size() == 20000);

    int n1 = 0;
    double sum1 = 0.0;
    for (int r = 0; r < 20000; ++r) {
        REQUIRE(a.labels[r] >= 1);
        REQUIRE(a.labels[r] <= 2);
        if (a.labels[r] == 1) {
            ++n1;
            sum1 += a.points(r, 0);
        }
    }
    // Component share and conditional mean inside generous CLT bands.
    CHECK(near(n1 / 20000.0, 0.3, 0.02));
    CHECK(near(sum1 / n1, -1.0, 0.05));

    const SampleResult c = sample(model, 20000, 43);
    CHECK(a.points != c.points);
}

TEST_CASE("project_model pushes moments through the basis") {
    auto rng = make_rng(7);
    const MixtureModel model = testutil::random_mixture(rng, 4, 3);
    MatrixXd m(4, 2);
    m << 1, 0, 0, 1, 0, 0, 0, 0;
    const ProjectionBasis basis = make_basis(m);
    const MixtureModel low = project_model(model, basis);
    REQUIRE(low.dim == 2);
    REQUIRE(low.n_components == 3);
    CHECK(low.family == CovarianceFamily::VVV);
    for (int g = 0; g < 3; ++g) {
        CHECK((low.means[g] - m.transpose() * model.means[g]).cwiseAbs().maxCoeff() <=
              1e-14);
        CHECK((low.covariances[g] - m.transpose() * model.covariances[g] * m)
                  .cwiseAbs()
                  .maxCoeff() <= 1e-14);
    }

    // 2-d to 1-d along (1,1)/sqrt(2) by hand.
    VectorXd w(1);
    w << 1.0;
    VectorXd mu(2);
    mu << 1.0, 3.0;
    const MixtureModel g2 =
        make_mixture(w, {mu}, {MatrixXd::Identity(2, 2)});
    MatrixXd diag(2, 1);
    const double r = 0.70710678118654746;
    diag << r, r;
    const MixtureModel g1 = project_model(g2, make_basis(diag));
    CHECK(near(g1.means[0][0], 4.0 * r, 1e-14));
    CHECK(near(g1.covariances[0](0, 0), 1.0, 1e-14));
}

}  // TEST_SUITE
