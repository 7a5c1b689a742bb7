#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oec/matrix.hpp"

namespace oec {

// m x n feature matrix with one integer class label per row. `class_ids`
// always holds the sorted distinct label values present in `labels`.
struct LabeledDataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<int> class_ids;

    std::size_t size() const { return features.rows; }
    std::size_t dims() const { return features.cols; }
    std::size_t class_count(int class_id) const;
};

// Builds a dataset and checks its invariants: at least two rows, all
// features finite, labels consistent with the recomputed class_ids.
LabeledDataset make_dataset(Matrix features, std::vector<int> labels);

// Row subset in the given order; class_ids are recomputed for the subset.
LabeledDataset subset_rows(const LabeledDataset& data, std::span<const std::size_t> rows);

// Per-column affine transform fitted on training data. `stds` entries are
// strictly positive; constant columns store std 1 so they map to exactly 0.
struct Normalizer {
    std::vector<double> means;
    std::vector<double> stds;
};

struct SplitSpec {
    double train_fraction = 0.7;
    std::map<int, double> per_class_fractions;  // per-class overrides
    std::uint64_t seed = 0;
};

// CSV with a header row; the label column is selected by name (or by
// zero-based index if the name parses as an integer). Non-numeric feature
// cells and NaN/inf are reported with their row and column.
LabeledDataset load_csv(const std::string& path, const std::string& label_column);
void save_csv(const LabeledDataset& data, const std::string& path);

// Feature-only loader used for prediction inputs; the named label column,
// when present, is dropped. A header-only file yields zero rows.
Matrix load_feature_csv(const std::string& path, const std::optional<std::string>& label_column);

Normalizer fit_normalizer(const LabeledDataset& train);
LabeledDataset apply_normalizer(const Normalizer& norm, const LabeledDataset& data);
Matrix apply_normalizer(const Normalizer& norm, const Matrix& features);
std::vector<double> apply_normalizer(const Normalizer& norm, std::span<const double> row);
LabeledDataset apply_inverse(const Normalizer& norm, const LabeledDataset& data);

// Per-class random split. Each class contributes round(fraction * count)
// training rows, clamped so both sides keep at least one row per class.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& data,
                                                           const SplitSpec& spec);

// Replaces every feature of floor(fraction * class count) randomly chosen
// rows of `target_class` with uniform draws from the per-column range
// widened by half its span on each side. Other rows are untouched.
LabeledDataset inject_noise(const LabeledDataset& data, int target_class, double fraction,
                            std::uint64_t seed);

enum class SyntheticPreset { two_gaussians, overlap, outliers };

SyntheticPreset parse_preset(const std::string& name);

// 2-D Gaussian mixtures with labels -1/+1. Rows are ordered class -1 block,
// class +1 block, then (for `outliers`) an appended +1-labeled outlier block.
LabeledDataset generate_synthetic(SyntheticPreset preset, std::size_t n_per_class,
                                  std::uint64_t seed);

}  // namespace oec
