#pragma once

#include <cstddef>
#include <span>

#include "oec/dataset.hpp"

namespace oec {

// 1-D decision rule: predict class -1 iff s*x <= t_prime (boundary points go
// to class -1). `p` is the balanced accuracy the rule achieved on the data
// that produced it and `r` is half the width of the empty gap around the
// threshold (0 when the data give no gap).
struct ThresholdRule {
    double t_prime = 0.0;
    int s = 1;
    double p = 0.0;
    double r = 0.0;
};

// Misclassification loss, optionally weighted by inverse class frequencies so
// both classes contribute equally regardless of imbalance.
struct LossSpec {
    enum class Kind { zero_one, zero_one_with_priors };
    Kind kind = Kind::zero_one;
    std::size_t n_neg = 0;  // class -1 count, used by the prior-weighted kind
    std::size_t n_pos = 0;  // class +1 count

    static LossSpec plain() { return {Kind::zero_one, 0, 0}; }
    static LossSpec with_priors(std::size_t n_neg, std::size_t n_pos) {
        return {Kind::zero_one_with_priors, n_neg, n_pos};
    }
};

// Loss of a single decision value y*(x.w + b); zero iff the decision is
// strictly positive.
double loss_value(const LossSpec& spec, int y, double decision);

// Dataset loss of the linear rule (omega, intercept) plus alpha * ||omega||_1.
double total_loss(const LossSpec& spec, const LabeledDataset& data, std::span<const double> omega,
                  double intercept, double alpha);

// Exact optimal-margin threshold over 1-D coordinates with labels -1/+1.
// Scans the midpoints between consecutive distinct sorted coordinates in both
// orientations, maximizing balanced accuracy; ties keep the first maximizer
// in scan order (ascending coordinate, orientation +1 checked first).
ThresholdRule optimal_margin_threshold(std::span<const double> x, std::span<const int> y);

// Independent O(m^2) reference that recounts both sides per candidate
// threshold; must agree with the sweep exactly, field for field.
ThresholdRule brute_force_threshold(std::span<const double> x, std::span<const int> y);

int predict_1d(const ThresholdRule& rule, double x);

}  // namespace oec
