#include "oec/threshold.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "oec/matrix.hpp"

namespace oec {

namespace {

void validate_labels(std::span<const int> y, std::size_t& k_neg, std::size_t& k_pos) {
    k_neg = 0;
    k_pos = 0;
    for (int v : y) {
        if (v == -1) {
            ++k_neg;
        } else if (v == 1) {
            ++k_pos;
        } else {
            throw std::invalid_argument("labels must be -1 or +1");
        }
    }
    if (k_neg == 0 || k_pos == 0) {
        throw std::invalid_argument("both classes must be present");
    }
}

}  // namespace

double loss_value(const LossSpec& spec, int y, double decision) {
    if (y != -1 && y != 1) throw std::invalid_argument("loss_value: label must be -1 or +1");
    if (decision > 0.0) return 0.0;
    if (spec.kind == LossSpec::Kind::zero_one) return 1.0;
    if (spec.n_neg == 0 || spec.n_pos == 0) {
        throw std::invalid_argument("loss_value: prior-weighted loss needs positive class counts");
    }
    return y == 1 ? 1.0 / static_cast<double>(spec.n_pos) : 1.0 / static_cast<double>(spec.n_neg);
}

double total_loss(const LossSpec& spec, const LabeledDataset& data, std::span<const double> omega,
                  double intercept, double alpha) {
    if (omega.size() != data.dims()) throw std::invalid_argument("total_loss: dimension mismatch");
    if (alpha < 0.0) throw std::invalid_argument("total_loss: alpha must be >= 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int y = data.labels[i];
        const double decision = static_cast<double>(y) * (dot(data.features.row(i), omega) + intercept);
        acc += loss_value(spec, y, decision);
    }
    return acc + alpha * l1_norm(omega);
}

ThresholdRule optimal_margin_threshold(std::span<const double> x, std::span<const int> y) {
    const std::size_t m = x.size();
    if (m != y.size()) throw std::invalid_argument("optimal_margin_threshold: size mismatch");
    if (m < 2) throw std::invalid_argument("optimal_margin_threshold: need at least 2 instances");
    std::size_t k_neg = 0, k_pos = 0;
    validate_labels(y, k_neg, k_pos);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

    // Cumulative per-class counts left of (and including) position i. The
    // counts stay integral; ratios are formed only when a candidate is
    // scored, so the reference implementation can reproduce them exactly.
    std::size_t c_neg = 0, c_pos = 0;
    double best_a = 0.0;
    bool found = false;
    ThresholdRule rule;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (y[order[i]] == -1) {
            ++c_neg;
        } else {
            ++c_pos;
        }
        const double xi = x[order[i]];
        const double xnext = x[order[i + 1]];
        if (xi == xnext) continue;  // equal coordinates admit no threshold here

        const double a_neg = static_cast<double>(c_neg) / static_cast<double>(k_neg) +
                             static_cast<double>(k_pos - c_pos) / static_cast<double>(k_pos);
        const double a_pos = static_cast<double>(c_pos) / static_cast<double>(k_pos) +
                             static_cast<double>(k_neg - c_neg) / static_cast<double>(k_neg);
        const double mid = 0.5 * (xi + xnext);
        const double half_gap = 0.5 * (xnext - xi);
        if (a_neg > best_a) {
            best_a = a_neg;
            rule = ThresholdRule{mid, +1, 0.5 * a_neg, half_gap};
            found = true;
        }
        if (a_pos > best_a) {
            best_a = a_pos;
            rule = ThresholdRule{-mid, -1, 0.5 * a_pos, half_gap};
            found = true;
        }
    }
    if (!found) {
        // All coordinates identical: no threshold can split them. Fall back
        // to a rule that sends everything to class -1 (balanced accuracy 1/2).
        return ThresholdRule{x[order[0]], +1, 0.5, 0.0};
    }
    return rule;
}

ThresholdRule brute_force_threshold(std::span<const double> x, std::span<const int> y) {
    const std::size_t m = x.size();
    if (m != y.size()) throw std::invalid_argument("brute_force_threshold: size mismatch");
    if (m < 2) throw std::invalid_argument("brute_force_threshold: need at least 2 instances");
    std::size_t k_neg = 0, k_pos = 0;
    validate_labels(y, k_neg, k_pos);

    std::vector<std::pair<double, int>> pts(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = {x[i], y[i]};
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    double best_a = 0.0;
    bool found = false;
    ThresholdRule rule;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (pts[i].first == pts[i + 1].first) continue;
        const double mid = 0.5 * (pts[i].first + pts[i + 1].first);
        const double half_gap = 0.5 * (pts[i + 1].first - pts[i].first);

        // Orientation s=+1: class -1 iff value <= mid. Recount from scratch.
        std::size_t neg_left = 0, pos_right = 0;
        // Orientation s=-1: class -1 iff value >= mid.
        std::size_t neg_right = 0, pos_left = 0;
        for (const auto& [v, label] : pts) {
            if (v <= mid) {
                if (label == -1) ++neg_left;
                if (label == 1) ++pos_left;
            } else {
                if (label == -1) ++neg_right;
                if (label == 1) ++pos_right;
            }
        }
        const double a_neg = static_cast<double>(neg_left) / static_cast<double>(k_neg) +
                             static_cast<double>(pos_right) / static_cast<double>(k_pos);
        const double a_pos = static_cast<double>(pos_left) / static_cast<double>(k_pos) +
                             static_cast<double>(neg_right) / static_cast<double>(k_neg);
        if (a_neg > best_a) {
            best_a = a_neg;
            rule = ThresholdRule{mid, +1, 0.5 * a_neg, half_gap};
            found = true;
        }
        if (a_pos > best_a) {
            best_a = a_pos;
            rule = ThresholdRule{-mid, -1, 0.5 * a_pos, half_gap};
            found = true;
        }
    }
    if (!found) return ThresholdRule{pts[0].first, +1, 0.5, 0.0};
    return rule;
}

int predict_1d(const ThresholdRule& rule, double x) {
    return static_cast<double>(rule.s) * x <= rule.t_prime ? -1 : 1;
}

}  // namespace oec
