#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "oec/matrix.hpp"
#include "oec/optimizer.hpp"

using namespace oec;

namespace {

// max at e1 on the unit sphere, value 0
Objective sphere_quadratic(std::size_t n) {
    return [n](std::span<const double> w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = w[i] - (i == 0 ? 1.0 : 0.0);
            acc += d * d;
        }
        return -acc;
    };
}

bool traces_identical(const OptimizationTrace& a, const OptimizationTrace& b) {
    return a.best_omega == b.best_omega && a.best_fitness == b.best_fitness &&
           a.fitness_history == b.fitness_history && a.evaluations == b.evaluations &&
           a.cov_min_eigen == b.cov_min_eigen;
}

}  // namespace

TEST_CASE("default_config follows the log-scaled budget rules") {
    const EAConfig c9 = default_config(9);
    CHECK(c9.lambda == 10);  // floor(4 + 3 ln 9)
    CHECK(c9.mu == 5);
    CHECK(c9.max_iterations == 346);  // ceil(150 ln 10)
    CHECK(c9.backend == Backend::cmaes);
    CHECK(c9.initial_sigma == 0.5);

    const EAConfig c1 = default_config(1);
    CHECK(c1.lambda == 4);  // floored at 4
    CHECK(c1.mu == 2);
    CHECK(c1.max_iterations == 104);  // ceil(150 ln 2)

    const EAConfig c2 = default_config(2);
    CHECK(c2.lambda == 6);
    CHECK(c2.mu == 3);
    CHECK(c2.max_iterations == 165);

    CHECK_THROWS_AS(default_config(0), std::invalid_argument);
}

TEST_CASE("parse_backend") {
    CHECK(parse_backend("cmaes") == Backend::cmaes);
    CHECK(parse_backend("es") == Backend::es);
    CHECK(parse_backend("pso") == Backend::pso);
    CHECK_THROWS_AS(parse_backend("sgd"), std::invalid_argument);
}

TEST_CASE("normalize_candidate: unit norm or random axis fallback") {
    Rng rng(5);
    const std::vector<double> v = {3.0, 4.0};
    const std::vector<double> unit = normalize_candidate(v, rng);
    CHECK(unit[0] == 0.6);
    CHECK(unit[1] == 0.8);

    const std::vector<double> tiny = {1e-300, 0.0};
    const std::vector<double> axis = normalize_candidate(tiny, rng);
    CHECK(l2_norm(axis) == 1.0);
    CHECK((axis[0] == 1.0 || axis[1] == 1.0));

    const std::vector<double> zero = {0.0, 0.0, 0.0};
    const std::vector<double> axis3 = normalize_candidate(zero, rng);
    double sum = 0.0;
    for (double x : axis3) sum += x;
    CHECK(sum == 1.0);
    CHECK_THROWS_AS(normalize_candidate(std::vector<double>{}, rng), std::invalid_argument);
}

TEST_CASE("maximize: config validation") {
    const Objective f = sphere_quadratic(2);
    EAConfig cfg = default_config(2);
    cfg.lambda = 1;
    CHECK_THROWS_AS(maximize(f, 2, cfg), std::invalid_argument);
    cfg = default_config(2);
    cfg.mu = cfg.lambda + 1;
    CHECK_THROWS_AS(maximize(f, 2, cfg), std::invalid_argument);
    cfg = default_config(2);
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(maximize(f, 2, cfg), std::invalid_argument);
    cfg = default_config(2);
    cfg.initial_sigma = 0.0;
    CHECK_THROWS_AS(maximize(f, 2, cfg), std::invalid_argument);
    CHECK_THROWS_AS(maximize(f, 0, default_config(2)), std::invalid_argument);
    CHECK_THROWS_AS(maximize(Objective{}, 2, default_config(2)), std::invalid_argument);
}

TEST_CASE("cmaes reaches the sphere optimum to 1e-6 under the default budget") {
    for (const std::size_t n : {std::size_t{2}, std::size_t{5}}) {
        EAConfig cfg = default_config(n);
        cfg.seed = 11;
        const OptimizationTrace trace = maximize(sphere_quadratic(n), n, cfg);
        CHECK(trace.best_fitness >= -1e-6);
        CHECK(trace.evaluations == cfg.lambda * cfg.max_iterations);
        REQUIRE(trace.best_omega.size() == n);
        CHECK(std::abs(l2_norm(trace.best_omega) - 1.0) <= 1e-12);
    }
}

TEST_CASE("cmaes solves a sphere-constrained linear objective") {
    // max of w.e2 on the sphere is w = e2
    const Objective f = [](std::span<const double> w) { return w[1]; };
    EAConfig cfg = default_config(3);
    cfg.seed = 4;
    const OptimizationTrace trace = maximize(f, 3, cfg);
    CHECK(trace.best_fitness >= 1.0 - 1e-6);
    CHECK(std::abs(trace.best_omega[1] - 1.0) <= 1e-3);
}

TEST_CASE("es and pso reach the sphere optimum to 1e-3") {
    for (const Backend backend : {Backend::es, Backend::pso}) {
        EAConfig cfg = default_config(5);
        cfg.backend = backend;
        cfg.seed = 21;
        const OptimizationTrace trace = maximize(sphere_quadratic(5), 5, cfg);
        CHECK(trace.best_fitness >= -1e-3);
        CHECK(trace.fitness_history.size() == cfg.max_iterations);
    }
}

TEST_CASE("fitness history is the non-decreasing running best") {
    for (const Backend backend : {Backend::cmaes, Backend::es, Backend::pso}) {
        EAConfig cfg = default_config(4);
        cfg.backend = backend;
        cfg.seed = 77;
        cfg.max_iterations = 60;
        const OptimizationTrace trace = maximize(sphere_quadratic(4), 4, cfg);
        REQUIRE(trace.fitness_history.size() == 60);
        for (std::size_t i = 1; i < trace.fitness_history.size(); ++i) {
            REQUIRE(trace.fitness_history[i] >= trace.fitness_history[i - 1]);
        }
        CHECK(trace.fitness_history.back() == trace.best_fitness);
    }
}

TEST_CASE("every candidate reaching the objective is unit-norm") {
    for (const Backend backend : {Backend::cmaes, Backend::es, Backend::pso}) {
        std::vector<double> norms;
        std::mutex mtx;
        const Objective probe = [&](std::span<const double> w) {
            const double norm = l2_norm(w);
            {
                const std::lock_guard<std::mutex> lock(mtx);
                norms.push_back(norm);
            }
            return -(w[0] - 1.0) * (w[0] - 1.0);
        };
        EAConfig cfg = default_config(3);
        cfg.backend = backend;
        cfg.max_iterations = 30;
        cfg.seed = 9;
        maximize(probe, 3, cfg);
        REQUIRE(!norms.empty());
        for (const double norm : norms) REQUIRE(std::abs(norm - 1.0) <= 1e-9);
    }
}

TEST_CASE("identical seeds give bit-identical traces, for both execution policies") {
    for (const Backend backend : {Backend::cmaes, Backend::es, Backend::pso}) {
        EAConfig cfg = default_config(6);
        cfg.backend = backend;
        cfg.seed = 1234;
        cfg.max_iterations = 40;

        const OptimizationTrace a = maximize(sphere_quadratic(6), 6, cfg);
        const OptimizationTrace b = maximize(sphere_quadratic(6), 6, cfg);
        REQUIRE(traces_identical(a, b));

        EAConfig serial_cfg = cfg;
        serial_cfg.evaluation = Exec::serial;
        const OptimizationTrace c = maximize(sphere_quadratic(6), 6, serial_cfg);
        REQUIRE(traces_identical(a, c));

        EAConfig other_seed = cfg;
        other_seed.seed = 1235;
        const OptimizationTrace d = maximize(sphere_quadratic(6), 6, other_seed);
        REQUIRE(a.best_omega != d.best_omega);
    }
}

TEST_CASE("cmaes covariance spectrum stays positive after flooring") {
    EAConfig cfg = default_config(5);
    cfg.seed = 3;
    const OptimizationTrace trace = maximize(sphere_quadratic(5), 5, cfg);
    REQUIRE(trace.cov_min_eigen.size() == cfg.max_iterations);  // refreshed every generation
    for (const double eig : trace.cov_min_eigen) REQUIRE(eig > 0.0);
}

TEST_CASE("n = 1 searches over the two sphere points") {
    const Objective f = [](std::span<const double> w) { return w[0]; };
    for (const Backend backend : {Backend::cmaes, Backend::es, Backend::pso}) {
        EAConfig cfg = default_config(1);
        cfg.backend = backend;
        cfg.seed = 2;
        const OptimizationTrace trace = maximize(f, 1, cfg);
        CHECK(trace.best_fitness == 1.0);
        CHECK(trace.best_omega == std::vector<double>{1.0});
    }
}

TEST_CASE("objective failures surface with the candidate attached") {
    const Objective f = [](std::span<const double>) -> double {
        throw std::runtime_error("boom");
    };
    EAConfig cfg = default_config(2);
    cfg.max_iterations = 1;
    CHECK_THROWS_WITH_AS(maximize(f, 2, cfg), doctest::Contains("failed evaluation"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(maximize(f, 2, cfg), doctest::Contains("boom"), std::runtime_error);
}
