#include <doctest.h>

#include <cmath>

#include "ppmix/entropy.hpp"
#include "ppmix/ga.hpp"
#include "test_util.hpp"

using namespace ppmix;
using testutil::near;

namespace {

// Two spherical components split along the first axis; the best 1-d
// projection of this model is the axis itself.
MixtureModel split_pair_2d() {
    VectorXd w(2);
    w << 0.5, 0.5;
    VectorXd m1 = VectorXd::Zero(2);
    VectorXd m2(2);
    m2 << 4.0, 0.0;
    return make_mixture(w, {m1, m2},
                        {MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2)});
}

}  // namespace

TEST_SUITE("ga") {

TEST_CASE("config and dimension contracts") {
    const MixtureModel model = split_pair_2d();
    GaConfig config;
    CHECK_THROWS_AS(projection_pursuit(model, 0, config, 1), ContractViolation);
    CHECK_THROWS_AS(projection_pursuit(model, 2, config, 1), ContractViolation);

    config.population_size = 1;
    CHECK_THROWS_AS(projection_pursuit(model, 1, config, 1), ContractViolation);
    config = GaConfig{};
    config.elitism_count = config.population_size;
    CHECK_THROWS_AS(projection_pursuit(model, 1, config, 1), ContractViolation);
    config = GaConfig{};
    config.mutation_rate = 1.5;
    CHECK_THROWS_AS(projection_pursuit(model, 1, config, 1), ContractViolation);
}

TEST_CASE("single Gaussian landscape is flat at zero") {
    auto rng = make_rng(61);
    VectorXd w(1);
    w << 1.0;
    const MixtureModel model =
        make_mixture(w, {VectorXd::Zero(4)}, {testutil::random_spd(rng, 4)});
    const GaConfig config;
    const PpResult pp = projection_pursuit(model, 2, config, 8);
    CHECK(std::abs(pp.negentropy) <= 1e-8);
    for (double h : pp.history) CHECK(std::abs(h) <= 1e-8);
    // No improvement can beat the stagnation tolerance, so the search stops
    // after exactly the stagnation window.
    CHECK(pp.generations_run == 1 + config.stagnation_generations);
}

TEST_CASE("history is the running best and bounded by the budget") {
    const MixtureModel model = split_pair_2d();
    const GaConfig config;
    const PpResult pp = projection_pursuit(model, 1, config, 3);
    REQUIRE(!pp.history.empty());
    CHECK(static_cast<int>(pp.history.size()) == pp.generations_run);
    CHECK(pp.generations_run <= config.max_generations);
    for (std::size_t t = 1; t < pp.history.size(); ++t) {
        CHECK(pp.history[t] >= pp.history[t - 1]);
    }
    CHECK(near(pp.history.back(), pp.negentropy, 1e-12));
    CHECK(near(pp.negentropy, pp.gaussian_entropy - pp.entropy, 1e-12));
    const MatrixXd gram = pp.basis.matrix.transpose() * pp.basis.matrix;
    CHECK((gram - MatrixXd::Identity(1, 1)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("search is deterministic in the seed") {
    const MixtureModel model = split_pair_2d();
    const GaConfig config;
    const PpResult a = projection_pursuit(model, 1, config, 17);
    const PpResult b = projection_pursuit(model, 1, config, 17);
    CHECK(a.basis.matrix == b.basis.matrix);
    CHECK(a.history == b.history);
    CHECK(a.negentropy == b.negentropy);
}

TEST_CASE("plane search lands on the separating axis") {
    const MixtureModel model = split_pair_2d();

    // Dense grid oracle over the one free angle, 0.1 degree steps.
    double best_grid = -1e300;
    double best_theta = 0.0;
    const int steps = 1800;
    for (int k = 0; k <= steps; ++k) {
        const double theta = -kHalfPi + k * (2.0 * kHalfPi / steps);
        const ProjectionBasis basis =
            basis_from_angles(VectorXd::Constant(1, theta), 2, 1);
        const double j = negentropy_ut(project_model(model, basis));
        if (j > best_grid) {
            best_grid = j;
            best_theta = theta;
        }
    }

    const GaConfig config;
    const PpResult pp = projection_pursuit(model, 1, config, 29);
    CHECK(pp.negentropy >= best_grid - 1e-4);

    const ProjectionBasis grid_basis =
        basis_from_angles(VectorXd::Constant(1, best_theta), 2, 1);
    const double dot = std::abs(pp.basis.matrix.col(0).dot(grid_basis.matrix.col(0)));
    const double angle_off = std::acos(std::min(1.0, dot));
    CHECK(angle_off <= 5.0 * M_PI / 180.0);
}

TEST_CASE("model-informed seeding reaches a needle-and-separation optimum") {
    // Separation along u plus a low-variance needle along v: the optimum
    // contains both directions, and uniform restarts alone tend to find only
    // the needle. The warm-started search must match the constructed basis.
    const int p = 6;
    VectorXd u = VectorXd::Ones(p).normalized();
    VectorXd v = VectorXd::Zero(p);
    v[0] = 1.0;
    v[1] = -1.0;
    v.normalize();

    VectorXd w(2);
    w << 0.5, 0.5;
    MatrixXd needle = MatrixXd::Identity(p, p);
    needle -= 0.95 * v * v.transpose();
    const MixtureModel model =
        make_mixture(w, {VectorXd::Zero(p), (4.0 * u).eval()},
                     {MatrixXd::Identity(p, p), needle});

    MatrixXd target(p, 2);
    target.col(0) = u;
    target.col(1) = v;
    const double j_target = negentropy_ut(model, make_basis(target));

    const GaConfig config;
    const PpResult pp = projection_pursuit(model, 2, config, 7);
    CHECK(pp.negentropy >= j_target - 1e-6);
}

}  // TEST_SUITE
