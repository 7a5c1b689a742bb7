#pragma once

#include <span>
#include <vector>

#include "oec/dataset.hpp"
#include "oec/parallel.hpp"
#include "oec/threshold.hpp"

namespace oec {

// Fitness of one projection candidate. `z` rewards balanced accuracy below 1
// and switches to 1 + margin once the projection separates the classes, minus
// the L1 penalty; `rule` is the optimal threshold found on the projection.
struct FitnessReport {
    double z = 0.0;
    ThresholdRule rule;
    double l1_penalty = 0.0;  // alpha * ||omega||_1, already subtracted from z
};

std::vector<double> project(const Matrix& features, std::span<const double> omega);

// Evaluates a single candidate on signed-label data (labels -1/+1).
FitnessReport evaluate(const LabeledDataset& data, std::span<const double> omega, double alpha);

// Evaluates a whole population; the parallel path must match the serial path
// bit for bit. Reports appear in candidate order regardless of policy.
std::vector<FitnessReport> evaluate_population(const LabeledDataset& data,
                                               const std::vector<std::vector<double>>& candidates,
                                               double alpha, Exec mode);

}  // namespace oec
