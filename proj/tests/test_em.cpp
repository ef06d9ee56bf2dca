#include <doctest.h>

#include <cmath>
#include <limits>

#include "ppmix/em.hpp"
#include "ppmix/kernels.hpp"
#include "test_util.hpp"

using namespace ppmix;
using testutil::near;

namespace {

// Three well-separated blobs in 3-d so that every family fits cleanly.
MatrixXd blob_data(int n_per, std::uint64_t seed) {
    VectorXd w = VectorXd::Constant(3, 1.0 / 3.0);
    std::vector<VectorXd> means;
    std::vector<MatrixXd> covs;
    VectorXd m1(3), m2(3), m3(3);
    m1 << 0, 0, 0;
    m2 << 8, 0, 0;
    m3 << 0, 8, 4;
    means = {m1, m2, m3};
    auto rng = make_rng(seed);
    for (int g = 0; g < 3; ++g) covs.push_back(testutil::random_spd(rng, 3, 0.5, 2.0));
    const MixtureModel truth = make_mixture(w, means, covs);
    return sample(truth, 3 * n_per, seed).points;
}

double ml_ridge(const MatrixXd& x, double reg_scale) {
    const VectorXd mean = x.colwise().mean();
    const VectorXd var = (x.rowwise() - mean.transpose()).colwise().squaredNorm() /
                         static_cast<double>(x.rows());
    return reg_scale * var.mean();
}

}  // namespace

TEST_SUITE("em") {

TEST_CASE("single component has the closed-form solution") {
    const MatrixXd x = blob_data(40, 3);
    const EmConfig config;
    const FitReport fit = em_fit(x, 1, CovarianceFamily::VVV, config, 1);
    REQUIRE(fit.model.n_components == 1);
    CHECK(fit.converged);

    const VectorXd mean = x.colwise().mean();
    CHECK((fit.model.means[0] - mean).cwiseAbs().maxCoeff() <= 1e-10);

    const MatrixXd centered = x.rowwise() - mean.transpose();
    MatrixXd ml = centered.transpose() * centered / static_cast<double>(x.rows());
    ml.diagonal().array() += ml_ridge(x, config.reg_scale);
    CHECK((fit.model.covariances[0] - ml).cwiseAbs().maxCoeff() <= 1e-10);

    // Reported likelihood matches an independent evaluation of the model.
    const MixtureEvaluator ev(fit.model);
    CHECK(near(fit.log_likelihood, kernels::total_log_likelihood(ev, x), 1e-8));
}

TEST_CASE("log-likelihood is monotone and BIC follows its formula") {
    const MatrixXd x = blob_data(50, 7);
    const EmConfig config;
    for (CovarianceFamily family : kAllFamilies) {
        CAPTURE(family_name(family));
        const FitReport fit = em_fit(x, 3, family, config, 5);
        CHECK(testutil::history_nondecreasing(fit.log_likelihood_history, 1e-10));
        CHECK(fit.n_parameters == mixture_parameter_count(family, 3, 3));
        CHECK(near(fit.bic,
                   2.0 * fit.log_likelihood - fit.n_parameters * std::log(150.0),
                   1e-9 * std::abs(fit.bic)));
        CHECK(near(fit.log_likelihood, fit.log_likelihood_history.back(),
                   1e-9 * std::abs(fit.log_likelihood)));
        CHECK(testutil::family_constraint_violation(fit.model) <= 1e-8);
    }
}

TEST_CASE("fits are deterministic in the seed") {
    const MatrixXd x = blob_data(30, 11);
    const EmConfig config;
    const FitReport a = em_fit(x, 2, CovarianceFamily::VVI, config, 21);
    const FitReport b = em_fit(x, 2, CovarianceFamily::VVI, config, 21);
    CHECK(a.log_likelihood == b.log_likelihood);
    CHECK(a.model.means[0] == b.model.means[0]);
    CHECK(a.model.covariances[1] == b.model.covariances[1]);
    CHECK(a.n_iterations == b.n_iterations);
}

TEST_CASE("argument contract") {
    const MatrixXd x = blob_data(10, 13);
    const EmConfig config;
    CHECK_THROWS_AS(em_fit(x, 0, CovarianceFamily::VVV, config, 1), ContractViolation);
    CHECK_THROWS_AS(em_fit(x.topRows(2), 2, CovarianceFamily::VVV, config, 1),
                    ContractViolation);
    MatrixXd bad = x;
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(em_fit(bad, 2, CovarianceFamily::VVV, config, 1), ContractViolation);
}

TEST_CASE("identical points collapse every restart") {
    const MatrixXd x = MatrixXd::Zero(12, 2);
    const EmConfig config;
    CHECK_THROWS_AS(em_fit(x, 2, CovarianceFamily::VVV, config, 1), DegenerateFitError);
    try {
        em_fit(x, 2, CovarianceFamily::VVV, config, 1);
    } catch (const DegenerateFitError& err) {
        CHECK(err.component() >= 0);
        CHECK(err.component() < 2);
    }
}

TEST_CASE("selection marks degenerate cells and breaks ties toward EII") {
    // Two distinct support points: the ML covariance is rank one, so only the
    // spherical families survive at G = 1 and nothing survives at G = 2.
    MatrixXd x(20, 2);
    for (int r = 0; r < 20; ++r) {
        x(r, 0) = r < 10 ? 0.0 : 1.0;
        x(r, 1) = 0.0;
    }
    const EmConfig config;
    const std::vector<CovarianceFamily> families(std::begin(kAllFamilies),
                                                 std::end(kAllFamilies));
    const SelectionReport report = select_model(x, {1, 2}, families, config, 3);

    REQUIRE(report.grid.size() == 12);
    REQUIRE(report.best_index >= 0);
    // EII and VII coincide at G = 1; the tie breaks lexicographically.
    CHECK(report.best.model.n_components == 1);
    CHECK(report.best.model.family == CovarianceFamily::EII);

    int degenerate = 0;
    for (const GridCell& cell : report.grid) {
        if (cell.degenerate) {
            ++degenerate;
            CHECK(cell.bic == -std::numeric_limits<double>::infinity());
            CHECK(std::isnan(cell.log_likelihood));
        } else {
            CHECK(cell.n_components == 1);
            CHECK((cell.family == CovarianceFamily::EII ||
                   cell.family == CovarianceFamily::VII));
        }
    }
    CHECK(degenerate == 10);
}

TEST_CASE("selection prefers the true component count") {
    const MatrixXd x = blob_data(50, 17);
    const EmConfig config;
    const std::vector<CovarianceFamily> families(std::begin(kAllFamilies),
                                                 std::end(kAllFamilies));
    const SelectionReport report = select_model(x, {1, 2, 3, 4}, families, config, 9);
    CHECK(report.best.model.n_components == 3);
    const GridCell& winner = report.grid[report.best_index];
    CHECK(winner.n_components == report.best.model.n_components);
    CHECK(winner.family == report.best.model.family);
    for (const GridCell& cell : report.grid) {
        if (!cell.degenerate) CHECK(cell.bic <= winner.bic);
    }
}

TEST_CASE("every cell collapsing raises NoModelError") {
    const MatrixXd x = MatrixXd::Zero(12, 2);
    const EmConfig config;
    const std::vector<CovarianceFamily> families(std::begin(kAllFamilies),
                                                 std::end(kAllFamilies));
    CHECK_THROWS_AS(select_model(x, {1, 2}, families, config, 3), NoModelError);
}

TEST_CASE("grid CSV has the documented header") {
    const MatrixXd x = blob_data(20, 19);
    const EmConfig config;
    const SelectionReport report =
        select_model(x, {1}, {CovarianceFamily::EEE, CovarianceFamily::VVV}, config, 2);
    const std::string csv = grid_to_csv(report);
    CHECK(csv.rfind("G,family,logL,nu,BIC,converged\n", 0) == 0);
    int lines = 0;
    for (char c : csv) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 3);  // header plus one row per cell
}

}  // TEST_SUITE
