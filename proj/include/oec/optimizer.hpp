#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "oec/parallel.hpp"
#include "oec/random.hpp"

namespace oec {

enum class Backend { cmaes, es, pso };

Backend parse_backend(const std::string& name);

struct EAConfig {
    Backend backend = Backend::cmaes;
    std::size_t lambda = 10;           // offspring per generation, >= 2
    std::size_t mu = 5;                // parents, 1 <= mu <= lambda
    std::size_t max_iterations = 100;  // generations, >= 1
    double alpha = 0.0;                // L1 factor forwarded to the objective
    std::uint64_t seed = 0;
    double initial_sigma = 0.5;
    Exec evaluation = Exec::parallel;
};

// Population size, parent count and iteration budget as functions of the
// search dimension (natural log).
EAConfig default_config(std::size_t n);

struct OptimizationTrace {
    std::vector<double> best_omega;       // unit norm
    double best_fitness = 0.0;
    std::vector<double> fitness_history;  // running best after each generation
    std::size_t evaluations = 0;
    std::vector<double> cov_min_eigen;    // cmaes only: floored spectrum minima
};

using Objective = std::function<double(std::span<const double>)>;

// Scales a candidate onto the unit sphere; a vector whose norm underflows is
// replaced by a randomly chosen coordinate axis.
std::vector<double> normalize_candidate(std::span<const double> omega, Rng& rng);

// Maximizes the objective over unit-norm vectors in n dimensions. Search
// dynamics run in the ambient space; candidates are normalized immediately
// before evaluation. Same config and seed give a bit-identical trace, for
// either execution policy.
OptimizationTrace maximize(const Objective& objective, std::size_t n, const EAConfig& config);

}  // namespace oec
