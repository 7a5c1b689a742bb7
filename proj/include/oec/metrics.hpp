#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oec/dataset.hpp"
#include "oec/optimizer.hpp"

namespace oec {

// Area under the ROC curve for signed labels (-1/+1), computed from midranks
// so tied scores contribute their expected value.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

// ROC polyline (fpr, tpr) from (0,0) to (1,1), one vertex per distinct score.
std::vector<std::pair<double, double>> roc_points(std::span<const double> scores,
                                                  std::span<const int> labels);

// Mean per-class recall over the classes present in `truth` (any int labels).
double balanced_accuracy(std::span<const int> predictions, std::span<const int> truth);

// Regularized incomplete beta function I_x(a, b), |error| < 1e-10 on the
// tested domain; evaluated by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p_two_sided = 1.0;
};

// Welch's unequal-variance t-test with two-sided p-value. Two zero-variance
// samples give p=1 when their means agree and p=0 otherwise.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct RunResult {
    std::uint64_t seed = 0;
    double train_auc = 0.0;
    double test_auc = 0.0;
    double train_balanced_accuracy = 0.0;
    double test_balanced_accuracy = 0.0;
    double fit_seconds = 0.0;
};

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single run
};

MetricStats stats_of(std::span<const double> values);

struct ExperimentSummary {
    std::vector<RunResult> runs;
    std::size_t run_count = 0;
    MetricStats train_auc, test_auc, train_balanced_accuracy, test_balanced_accuracy, fit_seconds;

    // Extra artifacts for reporting: decision scores of the final run's test
    // set (binary experiments only) and every run's final projection entries.
    std::vector<double> last_test_scores;
    std::vector<int> last_test_labels;
    std::vector<std::vector<double>> weights_per_run;
};

// Repeated split/(noise)/train/score protocol. Per run, child seeds for the
// split, the noise injection and the fit are derived from the split seed and
// the run index. Noise (when fraction > 0) perturbs the training side only,
// targeting the second class in class_ids order (the +1 class for signed
// labels). Two-class data uses the binary trainer; more classes use
// one-vs-one with macro-averaged pairwise AUC.
ExperimentSummary run_experiment(const LabeledDataset& data, std::size_t runs,
                                 const SplitSpec& split, const EAConfig& config,
                                 double noise_fraction);

// results CSV: run,seed,train_auc,test_auc,train_bacc,test_bacc,fit_seconds
void write_results_csv(const ExperimentSummary& summary, const std::string& path);
std::vector<double> read_csv_column(const std::string& path, const std::string& column);

}  // namespace oec
