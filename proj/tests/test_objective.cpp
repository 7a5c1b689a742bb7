#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "oec/objective.hpp"
#include "oec/random.hpp"

#include "helpers.hpp"

using namespace oec;

namespace {

LabeledDataset line_dataset(const std::vector<double>& xs, const std::vector<int>& ys) {
    Matrix f(xs.size(), 2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        f(i, 0) = xs[i];
        f(i, 1) = 7.0;  // constant second feature; only omega[1] sees it
    }
    return make_dataset(std::move(f), ys);
}

LabeledDataset random_dataset(std::size_t m, std::size_t n, Rng& rng) {
    Matrix f(m, n);
    for (double& v : f.data) v = rng.normal();
    std::vector<int> labels(m);
    for (std::size_t i = 0; i < m; ++i) labels[i] = rng.uniform() < 0.5 ? -1 : 1;
    labels[0] = -1;
    labels[m - 1] = 1;
    return make_dataset(std::move(f), std::move(labels));
}

}  // namespace

TEST_CASE("evaluate: separable projection scores 1 + margin minus the L1 term") {
    const LabeledDataset data = line_dataset({0.0, 1.0}, {-1, 1});
    const std::vector<double> omega = {1.0, 0.0};

    const FitnessReport plain = evaluate(data, omega, 0.0);
    CHECK(plain.rule.p == 1.0);
    CHECK(plain.rule.r == 0.5);
    CHECK(plain.z == 1.5);
    CHECK(plain.l1_penalty == 0.0);

    const FitnessReport penalized = evaluate(data, omega, 0.1);
    CHECK(penalized.z == 1.5 - 0.1);
    CHECK(penalized.l1_penalty == 0.1);
}

TEST_CASE("evaluate: non-separable projection scores its balanced accuracy") {
    const LabeledDataset data = line_dataset({0, 1, 2, 3}, {-1, 1, -1, 1});
    const std::vector<double> omega = {1.0, 0.0};
    const FitnessReport rep = evaluate(data, omega, 0.0);
    CHECK(rep.rule.p == 0.75);
    CHECK(rep.z == 0.75);

    // the L1 term still applies below the separation branch
    const FitnessReport pen = evaluate(data, omega, 0.5);
    CHECK(pen.z == 0.75 - 0.5);
}

TEST_CASE("evaluate: input validation") {
    const LabeledDataset data = line_dataset({0.0, 1.0}, {-1, 1});
    CHECK_THROWS_AS(evaluate(data, std::vector<double>{1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(data, std::vector<double>{0.0, 0.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(data, std::vector<double>{1.0, 0.0}, -0.1), std::invalid_argument);

    Matrix f(2, 1);
    f(0, 0) = 0;
    f(1, 0) = 1;
    const LabeledDataset single = make_dataset(std::move(f), {1, 1});
    CHECK_THROWS_AS(evaluate(single, std::vector<double>{1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("evaluate: negating omega leaves z unchanged") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const LabeledDataset data = random_dataset(40, 3, rng);
        std::vector<double> omega(3), neg(3);
        for (std::size_t j = 0; j < 3; ++j) {
            omega[j] = rng.normal();
            neg[j] = -omega[j];
        }
        const FitnessReport a = evaluate(data, omega, 0.25);
        const FitnessReport b = evaluate(data, neg, 0.25);
        REQUIRE(a.z == b.z);
        REQUIRE(a.rule.p == b.rule.p);
        REQUIRE(a.l1_penalty == b.l1_penalty);
    }
}

TEST_CASE("evaluate: scaling omega by 2 doubles the margin on separable data") {
    const LabeledDataset data = line_dataset({0.0, 1.0, 2.0, 10.0}, {-1, -1, 1, 1});
    const std::vector<double> omega = {1.0, 0.0};
    const std::vector<double> twice = {2.0, 0.0};
    const FitnessReport a = evaluate(data, omega, 0.0);
    const FitnessReport b = evaluate(data, twice, 0.0);
    CHECK(a.rule.p == 1.0);
    CHECK(b.rule.p == 1.0);
    CHECK(b.rule.r == 2.0 * a.rule.r);
    CHECK(b.rule.t_prime == 2.0 * a.rule.t_prime);
    CHECK(b.z == 1.0 + 2.0 * a.rule.r);
}

TEST_CASE("project matches manual dot products") {
    const LabeledDataset data = line_dataset({1.5, -2.0}, {-1, 1});
    const std::vector<double> omega = {2.0, -1.0};
    const std::vector<double> proj = project(data.features, omega);
    CHECK(proj[0] == 1.5 * 2.0 - 7.0);
    CHECK(proj[1] == -2.0 * 2.0 - 7.0);
}

TEST_CASE("evaluate_population: parallel path is bit-identical to serial") {
    Rng rng(212);
    const LabeledDataset data = random_dataset(200, 6, rng);
    std::vector<std::vector<double>> candidates(32, std::vector<double>(6));
    for (auto& c : candidates) {
        for (double& v : c) v = rng.normal();
    }
    const auto serial = evaluate_population(data, candidates, 0.3, Exec::serial);
    const auto parallel = evaluate_population(data, candidates, 0.3, Exec::parallel);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t k = 0; k < serial.size(); ++k) {
        REQUIRE(serial[k].z == parallel[k].z);
        REQUIRE(serial[k].rule.t_prime == parallel[k].rule.t_prime);
        REQUIRE(serial[k].rule.s == parallel[k].rule.s);
        REQUIRE(serial[k].rule.p == parallel[k].rule.p);
        REQUIRE(serial[k].rule.r == parallel[k].rule.r);
        REQUIRE(serial[k].l1_penalty == parallel[k].l1_penalty);
    }

    // reports line up with per-candidate evaluation, in order
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        REQUIRE(serial[k].z == evaluate(data, candidates[k], 0.3).z);
    }
}

TEST_CASE("evaluate_population: a failing candidate is reported with its entries") {
    const LabeledDataset data = line_dataset({0.0, 1.0}, {-1, 1});
    std::vector<std::vector<double>> candidates = {{1.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_WITH_AS(evaluate_population(data, candidates, 0.0, Exec::serial),
                         doctest::Contains("[0, 0]"), std::runtime_error);
    CHECK_THROWS_WITH_AS(evaluate_population(data, candidates, 0.0, Exec::parallel),
                         doctest::Contains("failed evaluation"), std::runtime_error);
}
