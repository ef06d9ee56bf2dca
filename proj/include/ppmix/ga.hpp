#pragma once

#include <cstdint>
#include <vector>

#include "ppmix/basis.hpp"
#include "ppmix/mixture.hpp"

namespace ppmix {

struct GaConfig {
    int population_size = 100;
    int max_generations = 200;
    int stagnation_generations = 50;  // stop after this many generations
                                      // without improvement > stagnation_tol
    double stagnation_tol = 1e-6;
    double crossover_rate = 0.8;      // whole-arithmetic blend
    double mutation_rate = 0.1;       // per-gene uniform resample
    int elitism_count = 2;
};

/// Result of the projection pursuit search for one subspace dimension.
struct PpResult {
    ProjectionBasis basis;      // canonicalized
    VectorXd angles;            // genotype that produced `basis`
    double negentropy = 0.0;    // gaussian_entropy - entropy, for `projected`
    double entropy = 0.0;       // unscented entropy of `projected`
    double gaussian_entropy = 0.0;
    MixtureModel projected;     // model pushed through `basis`
    std::vector<double> history;  // best fitness per generation, nondecreasing
    int generations_run = 0;
};

/// Maximizes the negentropy of B^T X over column-orthonormal B by a
/// real-coded genetic algorithm on the Givens angle parameterization:
/// linear-rank selection, whole-arithmetic crossover, per-gene uniform
/// resample mutation, elitism. Deterministic for a fixed seed. Fitness
/// evaluation is read-only in the model and runs row-parallel.
/// Throws ContractViolation unless 1 <= dim_out < model.dim.
PpResult projection_pursuit(const MixtureModel& model, int dim_out,
                            const GaConfig& config, std::uint64_t seed);

}  // namespace ppmix
