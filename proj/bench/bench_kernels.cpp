// Compares the OpenMP row-parallel density kernels against the serial
// reference implementation they are tested against.

#include <benchmark/benchmark.h>

#include <random>

#include "ppmix/kernels.hpp"
#include "ppmix/mixture.hpp"
#include "ppmix/rng.hpp"

namespace {

using namespace ppmix;

MixtureModel bench_model(int n_components, int dim) {
    auto rng = make_rng(derive_seed(91, {static_cast<std::uint64_t>(n_components),
                                         static_cast<std::uint64_t>(dim)}));
    std::normal_distribution<double> normal;
    MixtureModel model;
    model.n_components = n_components;
    model.dim = dim;
    model.family = CovarianceFamily::VVV;
    model.weights = VectorXd::Constant(n_components, 1.0 / n_components);
    for (int g = 0; g < n_components; ++g) {
        VectorXd mean(dim);
        for (int k = 0; k < dim; ++k) mean[k] = 3.0 * normal(rng);
        MatrixXd a(dim, dim);
        for (int r = 0; r < dim; ++r) {
            for (int c = 0; c < dim; ++c) a(r, c) = normal(rng);
        }
        MatrixXd cov = a * a.transpose() + MatrixXd::Identity(dim, dim);
        model.means.push_back(mean);
        model.covariances.push_back(0.5 * (cov + cov.transpose()));
    }
    model.validate();
    return model;
}

MatrixXd bench_points(const MixtureModel& model, int n) {
    return sample(model, n, 7).points;
}

void bm_log_density_reference(benchmark::State& state) {
    const MixtureModel model = bench_model(5, static_cast<int>(state.range(0)));
    const MatrixXd points = bench_points(model, 20000);
    const MixtureEvaluator evaluator(model);
    for (auto _ : state) {
        VectorXd values = reference::log_density(evaluator, points);
        benchmark::DoNotOptimize(values.data());
    }
    state.SetItemsProcessed(state.iterations() * points.rows());
}

void bm_log_density_parallel(benchmark::State& state) {
    const MixtureModel model = bench_model(5, static_cast<int>(state.range(0)));
    const MatrixXd points = bench_points(model, 20000);
    const MixtureEvaluator evaluator(model);
    for (auto _ : state) {
        VectorXd values = kernels::log_density(evaluator, points);
        benchmark::DoNotOptimize(values.data());
    }
    state.SetItemsProcessed(state.iterations() * points.rows());
}

void bm_responsibilities_reference(benchmark::State& state) {
    const MixtureModel model = bench_model(5, static_cast<int>(state.range(0)));
    const MatrixXd points = bench_points(model, 20000);
    const MixtureEvaluator evaluator(model);
    for (auto _ : state) {
        MatrixXd zeta = reference::responsibilities(evaluator, points);
        benchmark::DoNotOptimize(zeta.data());
    }
    state.SetItemsProcessed(state.iterations() * points.rows());
}

void bm_responsibilities_parallel(benchmark::State& state) {
    const MixtureModel model = bench_model(5, static_cast<int>(state.range(0)));
    const MatrixXd points = bench_points(model, 20000);
    const MixtureEvaluator evaluator(model);
    for (auto _ : state) {
        MatrixXd zeta = kernels::responsibilities(evaluator, points);
        benchmark::DoNotOptimize(zeta.data());
    }
    state.SetItemsProcessed(state.iterations() * points.rows());
}

}  // namespace

BENCHMARK(bm_log_density_reference)->Arg(2)->Arg(10)->Arg(50);
BENCHMARK(bm_log_density_parallel)->Arg(2)->Arg(10)->Arg(50);
BENCHMARK(bm_responsibilities_reference)->Arg(2)->Arg(10)->Arg(50);
BENCHMARK(bm_responsibilities_parallel)->Arg(2)->Arg(10)->Arg(50);

BENCHMARK_MAIN();
