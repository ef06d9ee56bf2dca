#include "ppmix/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ppmix/entropy.hpp"
#include "ppmix/rng.hpp"

namespace ppmix {
namespace {

void check_config(const GaConfig& config) {
    if (config.population_size < 2) throw ContractViolation("population must be at least 2");
    if (config.max_generations < 1) {
        throw ContractViolation("max_generations must be at least 1");
    }
    if (config.elitism_count < 0 || config.elitism_count >= config.population_size) {
        throw ContractViolation("elitism_count must be in [0, population_size)");
    }
    if (config.crossover_rate < 0.0 || config.crossover_rate > 1.0 ||
        config.mutation_rate < 0.0 || config.mutation_rate > 1.0) {
        throw ContractViolation("rates must lie in [0, 1]");
    }
    if (config.stagnation_generations < 1) {
        throw ContractViolation("stagnation_generations must be at least 1");
    }
}

// Directions along which a mixture shows structure that a uniform angle
// draw rarely hits: mean separations and their Fisher-whitened versions,
// extreme per-component covariance axes, total-covariance leaders. All
// unit length; near-duplicates (same line, either sign) are dropped.
std::vector<VectorXd> direction_pool(const MixtureModel& model) {
    const int p = model.dim;
    std::vector<VectorXd> pool;
    auto push = [&](VectorXd v) {
        const double norm = v.norm();
        if (!(norm > 1e-12)) return;
        v /= norm;
        for (const auto& u : pool) {
            if (std::abs(u.dot(v)) > 1.0 - 1e-10) return;
        }
        pool.push_back(std::move(v));
    };
    for (int g = 0; g < model.n_components; ++g) {
        for (int h = g + 1; h < model.n_components; ++h) {
            const VectorXd diff = model.means[h] - model.means[g];
            push(diff);
            push((model.covariances[g] + model.covariances[h]).ldlt().solve(diff));
        }
    }
    for (int g = 0; g < model.n_components; ++g) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(model.covariances[g]);
        for (int k = 0; k < 3 && k < p; ++k) push(eig.eigenvectors().col(k));
        push(eig.eigenvectors().col(p - 1));
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> total(mixture_moments(model).covariance);
    for (int k = 0; k < p && k < 3; ++k) {
        push(total.eigenvectors().col(p - 1 - k));
    }
    return pool;
}

// Orthonormal completion: lead directions first, then pivoted selection.
// Picking the pool direction with the largest residual keeps a completion
// column from being dominated by the noise left over after projecting a
// mostly-in-span direction onto the orthogonal complement.
MatrixXd complete_candidate(const std::vector<const VectorXd*>& leads,
                            const std::vector<VectorXd>& pool, int p, int d) {
    MatrixXd b(p, d);
    int filled = 0;
    auto residual = [&](const VectorXd& v) {
        VectorXd r = v;
        for (int c = 0; c < filled; ++c) r -= b.col(c).dot(r) * b.col(c);
        return r;
    };
    for (const auto* v : leads) {
        if (filled >= d) break;
        const VectorXd r = residual(*v);
        const double norm = r.norm();
        if (norm < 1e-8) continue;
        b.col(filled++) = r / norm;
    }
    while (filled < d) {
        VectorXd best;
        double best_norm = 1e-8;
        for (const auto& v : pool) {
            VectorXd r = residual(v);
            const double norm = r.norm();
            if (norm > best_norm) {
                best_norm = norm;
                best = std::move(r);
            }
        }
        for (int k = 0; k < p && best_norm <= 1e-8; ++k) {
            VectorXd r = residual(VectorXd::Unit(p, k));
            const double norm = r.norm();
            if (norm > best_norm) {
                best_norm = norm;
                best = std::move(r);
            }
        }
        b.col(filled++) = best / best_norm;
    }
    return b;
}

// Deterministic warm starts: candidate bases assembled from the direction
// pool, scored by the UT index, mapped back to genotypes, best first. The
// index is exactly invariant to column signs, so the round trip through
// angles_from_basis preserves each candidate's fitness.
std::vector<VectorXd> seed_genotypes(const MixtureModel& model, int dim_out,
                                     int max_seeds) {
    if (max_seeds < 1) return {};
    const int p = model.dim;
    std::vector<VectorXd> pool = direction_pool(model);
    if (pool.size() > 120) pool.resize(120);
    std::vector<MatrixXd> candidates;
    if (dim_out == 1 || pool.size() < 2) {
        for (const auto& v : pool) {
            candidates.push_back(complete_candidate({&v}, pool, p, dim_out));
        }
    } else {
        for (std::size_t i = 0; i < pool.size(); ++i) {
            for (std::size_t j = i + 1; j < pool.size(); ++j) {
                candidates.push_back(
                    complete_candidate({&pool[i], &pool[j]}, pool, p, dim_out));
            }
        }
    }
    if (candidates.empty()) return {};
    const int n_candidates = static_cast<int>(candidates.size());
    std::vector<double> score(candidates.size());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < n_candidates; ++c) {
        ProjectionBasis basis;
        basis.rows = p;
        basis.cols = dim_out;
        basis.matrix = candidates[c];
        try {
            score[c] = negentropy_ut(project_model(model, basis));
        } catch (const DegenerateModelError&) {
            score[c] = -std::numeric_limits<double>::infinity();
        }
    }
    std::vector<int> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return score[a] > score[b];
    });
    std::vector<VectorXd> genotypes;
    for (int c = 0; c < n_candidates && static_cast<int>(genotypes.size()) < max_seeds; ++c) {
        if (!std::isfinite(score[order[c]])) break;
        ProjectionBasis basis;
        basis.rows = p;
        basis.cols = dim_out;
        basis.matrix = candidates[order[c]];
        genotypes.push_back(angles_from_basis(basis));
    }
    return genotypes;
}

}  // namespace

PpResult projection_pursuit(const MixtureModel& model, int dim_out,
                            const GaConfig& config, std::uint64_t seed) {
    model.validate();
    check_config(config);
    if (dim_out < 1 || dim_out >= model.dim) {
        throw ContractViolation("projection needs 1 <= dim_out < model dimension");
    }
    const int p = model.dim;
    const int n_genes = n_angles(p, dim_out);
    const int pop_size = config.population_size;

    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unif01(0.0, 1.0);
    std::uniform_real_distribution<double> unif_angle(-kHalfPi, kHalfPi);

    std::vector<VectorXd> population(pop_size, VectorXd(n_genes));
    for (auto& member : population) {
        for (int k = 0; k < n_genes; ++k) member[k] = unif_angle(rng);
    }
    // Warm starts replace the head of the otherwise uniform population. The
    // RNG stream is consumed identically whether or not seeds exist.
    const std::vector<VectorXd> seeds =
        seed_genotypes(model, dim_out, std::max(1, pop_size / 10));
    for (std::size_t m = 0; m < seeds.size(); ++m) population[m] = seeds[m];

    // Fitness is a pure function of the genotype, so members are scored in
    // parallel; every mutation of RNG state stays in the serial breeding code.
    std::vector<double> fitness(pop_size);
    auto evaluate = [&](const std::vector<VectorXd>& pop, std::vector<double>& out) {
#pragma omp parallel for schedule(static)
        for (int m = 0; m < pop_size; ++m) {
            try {
                ProjectionBasis basis = basis_from_angles(pop[m], p, dim_out);
                out[m] = negentropy_ut(project_model(model, basis));
            } catch (const DegenerateModelError&) {
                out[m] = -std::numeric_limits<double>::infinity();
            }
        }
    };
    evaluate(population, fitness);

    VectorXd best_angles = population[0];
    double best_fitness = -std::numeric_limits<double>::infinity();
    std::vector<double> history;
    history.reserve(config.max_generations);
    int last_improvement = 1;

    std::vector<int> order(pop_size);
    std::vector<double> cum_weight(pop_size);
    std::vector<VectorXd> next(pop_size, VectorXd(n_genes));

    int generation = 1;
    for (;; ++generation) {
        for (int m = 0; m < pop_size; ++m) {
            if (fitness[m] > best_fitness) {
                if (fitness[m] > best_fitness + config.stagnation_tol) {
                    last_improvement = generation;
                }
                best_fitness = fitness[m];
                best_angles = population[m];
            }
        }
        history.push_back(best_fitness);
        if (generation >= config.max_generations) break;
        if (generation - last_improvement >= config.stagnation_generations) break;

        // Rank-sort, best first; ties keep the earlier member.
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return fitness[a] > fitness[b];
        });
        // Linear rank weights: best gets pop_size, worst gets 1.
        double acc = 0.0;
        for (int r = 0; r < pop_size; ++r) {
            acc += static_cast<double>(pop_size - r);
            cum_weight[r] = acc;
        }
        auto select_parent = [&]() -> const VectorXd& {
            const double target = unif01(rng) * acc;
            int lo = 0;
            while (lo < pop_size - 1 && cum_weight[lo] <= target) ++lo;
            return population[order[lo]];
        };
        auto mutate = [&](VectorXd& genes) {
            for (int k = 0; k < n_genes; ++k) {
                if (unif01(rng) < config.mutation_rate) genes[k] = unif_angle(rng);
            }
        };

        int filled = 0;
        for (; filled < config.elitism_count; ++filled) {
            next[filled] = population[order[filled]];
        }
        while (filled < pop_size) {
            const VectorXd& parent1 = select_parent();
            const VectorXd& parent2 = select_parent();
            VectorXd child1 = parent1;
            VectorXd child2 = parent2;
            if (unif01(rng) < config.crossover_rate) {
                const double alpha = unif01(rng);
                child1 = alpha * parent1 + (1.0 - alpha) * parent2;
                child2 = (1.0 - alpha) * parent1 + alpha * parent2;
            }
            mutate(child1);
            next[filled++] = std::move(child1);
            if (filled < pop_size) {
                mutate(child2);
                next[filled++] = std::move(child2);
            }
        }
        population.swap(next);
        evaluate(population, fitness);
    }

    PpResult result;
    result.angles = best_angles;
    result.basis = canonicalize_basis(basis_from_angles(best_angles, p, dim_out));
    result.projected = project_model(model, result.basis);
    result.entropy = entropy_ut(result.projected);
    result.gaussian_entropy = gaussian_entropy(mixture_moments(result.projected).covariance);
    result.negentropy = result.gaussian_entropy - result.entropy;
    result.history = std::move(history);
    result.generations_run = generation;
    return result;
}

}  // namespace ppmix
