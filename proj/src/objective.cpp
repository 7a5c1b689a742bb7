#include "oec/objective.hpp"

#include <exception>
#include <stdexcept>
#include <string>

#include "oec/matrix.hpp"

namespace oec {

namespace {

std::string candidate_text(std::span<const double> omega) {
    std::string s = "[";
    const std::size_t shown = std::min<std::size_t>(omega.size(), 16);
    for (std::size_t i = 0; i < shown; ++i) {
        if (i) s += ", ";
        s += format_double(omega[i]);
    }
    if (shown < omega.size()) s += ", ...";
    s += "]";
    return s;
}

}  // namespace

std::vector<double> project(const Matrix& features, std::span<const double> omega) {
    if (features.cols != omega.size()) throw std::invalid_argument("project: dimension mismatch");
    std::vector<double> out(features.rows);
    for (std::size_t i = 0; i < features.rows; ++i) out[i] = dot(features.row(i), omega);
    return out;
}

FitnessReport evaluate(const LabeledDataset& data, std::span<const double> omega, double alpha) {
    if (omega.size() != data.dims()) throw std::invalid_argument("evaluate: dimension mismatch");
    if (alpha < 0.0) throw std::invalid_argument("evaluate: alpha must be >= 0");
    bool nonzero = false;
    for (double v : omega) {
        if (v != 0.0) {
            nonzero = true;
            break;
        }
    }
    if (!nonzero) throw std::invalid_argument("evaluate: projection vector is all zeros");

    const std::vector<double> coords = project(data.features, omega);
    FitnessReport report;
    report.rule = optimal_margin_threshold(coords, data.labels);

    // Treat accuracies within 1e-12 of 1 as exact separation before branching.
    const double p = report.rule.p >= 1.0 - 1e-12 ? 1.0 : report.rule.p;
    const double base = p >= 1.0 ? 1.0 + report.rule.r : p;
    report.l1_penalty = alpha * l1_norm(omega);
    report.z = base - report.l1_penalty;
    return report;
}

std::vector<FitnessReport> evaluate_population(const LabeledDataset& data,
                                               const std::vector<std::vector<double>>& candidates,
                                               double alpha, Exec mode) {
    std::vector<FitnessReport> out(candidates.size());
    std::vector<std::exception_ptr> errors(candidates.size());
    for_index(candidates.size(), mode, [&](std::size_t k) {
        try {
            out[k] = evaluate(data, candidates[k], alpha);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    });
    // Surface the lowest-index failure so behavior does not depend on the
    // execution policy.
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (!errors[k]) continue;
        try {
            std::rethrow_exception(errors[k]);
        } catch (const std::exception& e) {
            throw std::runtime_error("candidate " + candidate_text(candidates[k]) +
                                     " failed evaluation: " + e.what());
        }
    }
    return out;
}

}  // namespace oec
