#include "oec/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "oec/classifier.hpp"
#include "oec/matrix.hpp"

namespace oec {

namespace {

void validate_signed(std::span<const int> labels, std::size_t& n_neg, std::size_t& n_pos) {
    n_neg = 0;
    n_pos = 0;
    for (int y : labels) {
        if (y == -1) {
            ++n_neg;
        } else if (y == 1) {
            ++n_pos;
        } else {
            throw std::invalid_argument("labels must be -1 or +1");
        }
    }
    if (n_neg == 0 || n_pos == 0) throw std::invalid_argument("both classes must be present");
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr double eps = 1e-15;
    constexpr double fpmin = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("regularized_incomplete_beta: a, b must be > 0");
    }
    if (std::isnan(x)) throw std::invalid_argument("regularized_incomplete_beta: x is NaN");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("auc_roc: size mismatch");
    if (scores.empty()) throw std::invalid_argument("auc_roc: empty input");
    std::size_t n_neg = 0, n_pos = 0;
    validate_signed(labels, n_neg, n_pos);

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks: a group of tied scores shares the average of its 1-based ranks.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t g = i;
        while (g + 1 < order.size() && scores[order[g + 1]] == scores[order[i]]) ++g;
        const double midrank = 0.5 * static_cast<double>(i + 1 + g + 1);
        for (std::size_t k = i; k <= g; ++k) {
            if (labels[order[k]] == 1) rank_sum_pos += midrank;
        }
        i = g + 1;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    const double u_pos = rank_sum_pos - np * (np + 1.0) / 2.0;
    return u_pos / (np * nn);
}

std::vector<std::pair<double, double>> roc_points(std::span<const double> scores,
                                                  std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc_points: size mismatch");
    std::size_t n_neg = 0, n_pos = 0;
    validate_signed(labels, n_neg, n_pos);

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(0.0, 0.0);
    std::size_t tp = 0, fp = 0, i = 0;
    while (i < order.size()) {
        std::size_t g = i;
        while (g + 1 < order.size() && scores[order[g + 1]] == scores[order[i]]) ++g;
        for (std::size_t k = i; k <= g; ++k) {
            if (labels[order[k]] == 1) {
                ++tp;
            } else {
                ++fp;
            }
        }
        pts.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                         static_cast<double>(tp) / static_cast<double>(n_pos));
        i = g + 1;
    }
    return pts;
}

double balanced_accuracy(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.size() != truth.size()) {
        throw std::invalid_argument("balanced_accuracy: size mismatch");
    }
    if (truth.empty()) throw std::invalid_argument("balanced_accuracy: empty input");
    std::map<int, std::pair<std::size_t, std::size_t>> per_class;  // class -> (correct, total)
    for (std::size_t i = 0; i < truth.size(); ++i) {
        auto& [correct, total] = per_class[truth[i]];
        ++total;
        correct += static_cast<std::size_t>(predictions[i] == truth[i]);
    }
    if (per_class.size() < 2) {
        throw std::invalid_argument("balanced_accuracy: need at least two truth classes");
    }
    double acc = 0.0;
    for (const auto& [cls, counts] : per_class) {
        acc += static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    return acc / static_cast<double>(per_class.size());
}

TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) {
        throw std::invalid_argument("welch_t_test: each sample needs at least 2 values");
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / na;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / nb;
    double va = 0.0, vb = 0.0;
    for (double v : a) va += (v - ma) * (v - ma);
    for (double v : b) vb += (v - mb) * (v - mb);
    va /= na - 1.0;
    vb /= nb - 1.0;

    TTestResult res;
    if (va == 0.0 && vb == 0.0) {
        // Degenerate: no within-sample variation. Identical means are a
        // perfect null fit; different means are an unambiguous difference.
        res.t = 0.0;
        res.df = na + nb - 2.0;
        res.p_two_sided = ma == mb ? 1.0 : 0.0;
        return res;
    }

    const double se2 = va / na + vb / nb;
    res.t = (ma - mb) / std::sqrt(se2);
    res.df = se2 * se2 /
             ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    res.p_two_sided =
        regularized_incomplete_beta(res.df / 2.0, 0.5, res.df / (res.df + res.t * res.t));
    return res;
}

MetricStats stats_of(std::span<const double> values) {
    MetricStats s;
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

namespace {

// Macro-averaged AUC over class pairs, scoring each pair's test subset with
// that pair's decision values.
double macro_pairwise_auc(const OvoModel& model, const LabeledDataset& data) {
    double acc = 0.0;
    std::size_t used = 0;
    for (const PairModel& pair : model.pairs) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.labels[i] != pair.class_a && data.labels[i] != pair.class_b) continue;
            scores.push_back(decision_value(pair.model, data.features.row(i)));
            labels.push_back(data.labels[i] == pair.class_a ? -1 : 1);
        }
        bool has_neg = false, has_pos = false;
        for (int y : labels) (y == -1 ? has_neg : has_pos) = true;
        if (!has_neg || !has_pos) continue;  // pair not represented in this slice
        acc += auc_roc(scores, labels);
        ++used;
    }
    if (used == 0) throw std::runtime_error("macro AUC: no class pair present in the data");
    return acc / static_cast<double>(used);
}

std::vector<double> signed_scores(const LinearModel& model, const LabeledDataset& data) {
    std::vector<double> scores(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        scores[i] = decision_value(model, data.features.row(i));
    }
    return scores;
}

}  // namespace

ExperimentSummary run_experiment(const LabeledDataset& data, std::size_t runs,
                                 const SplitSpec& split, const EAConfig& config,
                                 double noise_fraction) {
    if (runs < 1) throw std::invalid_argument("run_experiment: need at least 1 run");
    if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0)) {
        throw std::invalid_argument("run_experiment: noise fraction must be in [0, 1]");
    }
    const bool binary = data.class_ids.size() == 2;
    const int noise_target = data.class_ids[1];

    ExperimentSummary summary;
    for (std::size_t run = 0; run < runs; ++run) {
        const std::uint64_t run_seed = derive_seed(split.seed, run);
        SplitSpec run_split = split;
        run_split.seed = derive_seed(run_seed, 0);
        auto [train, test] = stratified_split(data, run_split);
        if (noise_fraction > 0.0) {
            train = inject_noise(train, noise_target, noise_fraction, derive_seed(run_seed, 1));
        }
        EAConfig run_cfg = config;
        run_cfg.seed = derive_seed(run_seed, 2);

        RunResult r;
        r.seed = run_seed;
        std::vector<double> flat_weights;

        if (binary) {
            const LabeledDataset strain = to_signed_labels(train);
            const LabeledDataset stest = to_signed_labels(test);
            const auto t0 = std::chrono::steady_clock::now();
            const LinearModel model = train_binary(strain, run_cfg);
            const auto t1 = std::chrono::steady_clock::now();
            r.fit_seconds = std::chrono::duration<double>(t1 - t0).count();

            const std::vector<double> train_scores = signed_scores(model, strain);
            const std::vector<double> test_scores = signed_scores(model, stest);
            r.train_auc = auc_roc(train_scores, strain.labels);
            r.test_auc = auc_roc(test_scores, stest.labels);
            std::vector<int> pred(strain.size());
            for (std::size_t i = 0; i < strain.size(); ++i) {
                pred[i] = train_scores[i] <= 0.0 ? -1 : 1;
            }
            r.train_balanced_accuracy = balanced_accuracy(pred, strain.labels);
            pred.resize(stest.size());
            for (std::size_t i = 0; i < stest.size(); ++i) {
                pred[i] = test_scores[i] <= 0.0 ? -1 : 1;
            }
            r.test_balanced_accuracy = balanced_accuracy(pred, stest.labels);
            flat_weights = model.omega;
            if (run + 1 == runs) {
                summary.last_test_scores = test_scores;
                summary.last_test_labels = stest.labels;
            }
        } else {
            const auto t0 = std::chrono::steady_clock::now();
            const OvoModel model = train_multiclass(train, run_cfg);
            const auto t1 = std::chrono::steady_clock::now();
            r.fit_seconds = std::chrono::duration<double>(t1 - t0).count();

            r.train_auc = macro_pairwise_auc(model, train);
            r.test_auc = macro_pairwise_auc(model, test);
            std::vector<int> pred(train.size());
            for (std::size_t i = 0; i < train.size(); ++i) {
                pred[i] = predict_multiclass(model, train.features.row(i));
            }
            r.train_balanced_accuracy = balanced_accuracy(pred, train.labels);
            pred.resize(test.size());
            for (std::size_t i = 0; i < test.size(); ++i) {
                pred[i] = predict_multiclass(model, test.features.row(i));
            }
            r.test_balanced_accuracy = balanced_accuracy(pred, test.labels);
            for (const PairModel& pair : model.pairs) {
                flat_weights.insert(flat_weights.end(), pair.model.omega.begin(),
                                    pair.model.omega.end());
            }
        }

        summary.runs.push_back(r);
        summary.weights_per_run.push_back(std::move(flat_weights));
    }

    summary.run_count = summary.runs.size();
    auto collect = [&](auto member) {
        std::vector<double> v(summary.runs.size());
        for (std::size_t i = 0; i < summary.runs.size(); ++i) v[i] = summary.runs[i].*member;
        return v;
    };
    summary.train_auc = stats_of(collect(&RunResult::train_auc));
    summary.test_auc = stats_of(collect(&RunResult::test_auc));
    summary.train_balanced_accuracy = stats_of(collect(&RunResult::train_balanced_accuracy));
    summary.test_balanced_accuracy = stats_of(collect(&RunResult::test_balanced_accuracy));
    summary.fit_seconds = stats_of(collect(&RunResult::fit_seconds));
    return summary;
}

void write_results_csv(const ExperimentSummary& summary, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write results CSV: " + path);
    out << "run,seed,train_auc,test_auc,train_bacc,test_bacc,fit_seconds\n";
    for (std::size_t i = 0; i < summary.runs.size(); ++i) {
        const RunResult& r = summary.runs[i];
        out << i << "," << r.seed << "," << format_double(r.train_auc) << ","
            << format_double(r.test_auc) << "," << format_double(r.train_balanced_accuracy) << ","
            << format_double(r.test_balanced_accuracy) << "," << format_double(r.fit_seconds)
            << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            header.push_back(cell);
        }
    }
    std::size_t col = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == column) col = j;
    }
    if (col == header.size()) {
        throw std::runtime_error(path + ": column \"" + column + "\" not found");
    }

    std::vector<double> values;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t j = 0;
        bool done = false;
        while (std::getline(ss, cell, ',')) {
            if (j++ != col) continue;
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
                throw std::runtime_error(path + ": bad numeric cell \"" + cell + "\" at line " +
                                         std::to_string(lineno));
            }
            values.push_back(v);
            done = true;
            break;
        }
        if (!done) {
            throw std::runtime_error(path + ": line " + std::to_string(lineno) + " too short");
        }
    }
    return values;
}

}  // namespace oec
