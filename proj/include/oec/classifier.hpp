#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "oec/dataset.hpp"
#include "oec/objective.hpp"
#include "oec/optimizer.hpp"

namespace oec {

struct TraceSummary {
    double best_fitness = 0.0;
    std::size_t evaluations = 0;
};

// Binary linear discriminant: project a normalized input onto omega and apply
// the 1-D threshold rule.
struct LinearModel {
    std::vector<double> omega;  // unit norm
    ThresholdRule rule;
    Normalizer normalizer;
    double train_performance = 0.0;  // balanced accuracy on the training set
    double alpha = 0.0;
    TraceSummary trace;
};

// Remaps a two-class dataset to signed labels: the smaller class id becomes
// -1, the larger becomes +1.
LabeledDataset to_signed_labels(const LabeledDataset& data);

// Trains on a dataset whose labels are already -1/+1. The normalizer is
// fitted on this training data and baked into the model.
LinearModel train_binary(const LabeledDataset& train, const EAConfig& config);

// Signed distance-like score: s * (normalized x).omega - t_prime. Zero or
// negative means class -1.
double decision_value(const LinearModel& model, std::span<const double> x);
int predict_binary(const LinearModel& model, std::span<const double> x);

// Binary model plus the original class ids it maps back to.
struct BinaryClassifier {
    std::vector<int> class_ids;  // [class mapped to -1, class mapped to +1]
    LinearModel model;

    int predict(std::span<const double> x) const {
        return predict_binary(model, x) == -1 ? class_ids[0] : class_ids[1];
    }
};

struct PairModel {
    int class_a = 0;  // mapped to -1 (earlier in class_ids)
    int class_b = 0;  // mapped to +1
    LinearModel model;
};

// One-vs-one ensemble over all class pairs, sharing one normalizer fitted on
// the full training set.
struct OvoModel {
    std::vector<int> class_ids;
    std::vector<PairModel> pairs;
    Normalizer normalizer;
};

// Trains c*(c-1)/2 pair models; pair (i, j) with i < j in class_ids order maps
// class i to -1 and class j to +1, and is seeded with config.seed + pair index.
OvoModel train_multiclass(const LabeledDataset& train, const EAConfig& config);

// One vote per pair model; the +1 side of a pair votes for its class_b.
std::vector<std::size_t> ovo_votes(const OvoModel& model, std::span<const double> x);

// Majority vote; ties resolve to the earliest class in class_ids order.
int predict_multiclass(const OvoModel& model, std::span<const double> x);

using Model = std::variant<BinaryClassifier, OvoModel>;

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace oec
