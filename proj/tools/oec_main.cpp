// Command-line front end: train/predict/evaluate/synth/compare.
//
// Exit codes: 0 success, 2 usage error, 1 runtime failure. Human-readable
// reports go to stdout, diagnostics to stderr, data artifacts to files.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "oec/classifier.hpp"
#include "oec/dataset.hpp"
#include "oec/matrix.hpp"
#include "oec/metrics.hpp"
#include "oec/optimizer.hpp"

namespace {

using namespace oec;

// Flag/validation mistakes discovered after CLI11 parsing still count as
// usage errors (exit 2), not runtime failures.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string data_path;
    std::string label_col = "label";
    std::string out_path;
    std::string model_path;
    std::string optimizer_name = "cmaes";
    std::string preset_name;
    std::string metric = "test_auc";
    std::string roc_path;
    std::string weights_path;
    std::string compare_a;
    std::string compare_b;
    std::vector<std::string> class_fracs;
    double alpha = 0.0;
    double train_frac = 0.7;
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::size_t runs = 100;
    std::size_t n_per_class = 200;
};

SplitSpec make_split_spec(const Options& opt, const LabeledDataset& data) {
    SplitSpec spec;
    spec.train_fraction = opt.train_frac;
    spec.seed = opt.seed;
    for (const std::string& entry : opt.class_fracs) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= entry.size()) {
            throw UsageError("--class-frac expects class=fraction, got \"" + entry + "\"");
        }
        int cls = 0;
        double frac = 0.0;
        try {
            cls = std::stoi(entry.substr(0, eq));
            frac = std::stod(entry.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("--class-frac expects class=fraction, got \"" + entry + "\"");
        }
        if (!(frac > 0.0 && frac < 1.0)) {
            throw UsageError("--class-frac fraction must be in (0, 1): \"" + entry + "\"");
        }
        spec.per_class_fractions[cls] = frac;
    }
    for (const auto& [cls, frac] : spec.per_class_fractions) {
        (void)frac;
        bool known = false;
        for (int id : data.class_ids) known = known || id == cls;
        if (!known) throw UsageError("--class-frac names unknown class " + std::to_string(cls));
    }
    return spec;
}

EAConfig make_config(const Options& opt, std::size_t n) {
    EAConfig cfg = default_config(n);
    cfg.backend = parse_backend(opt.optimizer_name);
    cfg.alpha = opt.alpha;
    cfg.seed = opt.seed;
    return cfg;
}

int cmd_train(const Options& opt) {
    const LabeledDataset data = load_csv(opt.data_path, opt.label_col);
    const EAConfig cfg = make_config(opt, data.dims());

    const auto t0 = std::chrono::steady_clock::now();
    Model model;
    if (data.class_ids.size() == 2) {
        const LabeledDataset strain = to_signed_labels(data);
        BinaryClassifier bc;
        bc.class_ids = data.class_ids;
        bc.model = train_binary(strain, cfg);
        model = std::move(bc);
    } else {
        model = train_multiclass(data, cfg);
    }
    const double fit_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    save_model(model, opt.out_path);

    if (const auto* bc = std::get_if<BinaryClassifier>(&model)) {
        std::cout << "trained kind=binary classes=2 n=" << data.dims() << " lambda=" << cfg.lambda
                  << " iterations=" << cfg.max_iterations
                  << " fitness=" << format_double(bc->model.trace.best_fitness)
                  << " train_bacc=" << format_double(bc->model.train_performance)
                  << " margin=" << format_double(bc->model.rule.r) << " seed=" << opt.seed
                  << " fit_seconds=" << format_double(fit_seconds) << "\n";
    } else {
        const auto& ovo = std::get<OvoModel>(model);
        std::vector<int> pred(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            pred[i] = predict_multiclass(ovo, data.features.row(i));
        }
        const double bacc = balanced_accuracy(pred, data.labels);
        for (const PairModel& pair : ovo.pairs) {
            std::cout << "pair " << pair.class_a << "|" << pair.class_b
                      << ": fitness=" << format_double(pair.model.trace.best_fitness)
                      << " margin=" << format_double(pair.model.rule.r)
                      << " train_bacc=" << format_double(pair.model.train_performance) << "\n";
        }
        std::cout << "trained kind=ovo classes=" << ovo.class_ids.size() << " n=" << data.dims()
                  << " lambda=" << cfg.lambda << " iterations=" << cfg.max_iterations
                  << " pairs=" << ovo.pairs.size() << " train_bacc=" << format_double(bacc)
                  << " seed=" << opt.seed << " fit_seconds=" << format_double(fit_seconds) << "\n";
    }
    std::cout << "model written to " << opt.out_path << "\n";
    return 0;
}

int cmd_predict(const Options& opt, bool label_col_given) {
    const Model model = load_model(opt.model_path);
    std::optional<std::string> label_col;
    if (label_col_given) label_col = opt.label_col;
    const Matrix features = load_feature_csv(opt.data_path, label_col);

    std::ofstream out(opt.out_path);
    if (!out) throw std::runtime_error("cannot write predictions CSV: " + opt.out_path);

    if (const auto* bc = std::get_if<BinaryClassifier>(&model)) {
        out << "row_index,predicted_label,decision_value\n";
        for (std::size_t i = 0; i < features.rows; ++i) {
            const double value = decision_value(bc->model, features.row(i));
            const int label = value <= 0.0 ? bc->class_ids[0] : bc->class_ids[1];
            out << i << "," << label << "," << format_double(value) << "\n";
        }
    } else {
        const auto& ovo = std::get<OvoModel>(model);
        out << "row_index,predicted_label";
        for (int cls : ovo.class_ids) out << ",votes_" << cls;
        out << "\n";
        for (std::size_t i = 0; i < features.rows; ++i) {
            const auto votes = ovo_votes(ovo, features.row(i));
            out << i << "," << predict_multiclass(ovo, features.row(i));
            for (std::size_t v : votes) out << "," << v;
            out << "\n";
        }
    }
    if (!out) throw std::runtime_error("write failed: " + opt.out_path);
    std::cout << "predicted rows=" << features.rows << " out=" << opt.out_path << "\n";
    return 0;
}

int cmd_evaluate(const Options& opt) {
    const LabeledDataset data = load_csv(opt.data_path, opt.label_col);
    const SplitSpec split = make_split_spec(opt, data);
    const EAConfig cfg = make_config(opt, data.dims());

    if (!opt.roc_path.empty() && data.class_ids.size() != 2) {
        throw std::runtime_error("--emit-roc requires a binary dataset");
    }

    const ExperimentSummary summary = run_experiment(data, opt.runs, split, cfg, opt.noise);
    write_results_csv(summary, opt.out_path);

    auto line = [](const char* name, const MetricStats& s) {
        std::cout << name << " mean=" << format_double(s.mean)
                  << " std=" << format_double(s.stddev) << "\n";
    };
    std::cout << "runs=" << summary.run_count << " seed=" << opt.seed
              << " optimizer=" << opt.optimizer_name << " alpha=" << format_double(opt.alpha)
              << " noise=" << format_double(opt.noise) << "\n";
    line("train_auc", summary.train_auc);
    line("test_auc", summary.test_auc);
    line("train_bacc", summary.train_balanced_accuracy);
    line("test_bacc", summary.test_balanced_accuracy);
    line("fit_seconds", summary.fit_seconds);
    std::cout << "results written to " << opt.out_path << "\n";

    if (!opt.roc_path.empty()) {
        const auto pts = roc_points(summary.last_test_scores, summary.last_test_labels);
        std::ofstream roc(opt.roc_path);
        if (!roc) throw std::runtime_error("cannot write ROC CSV: " + opt.roc_path);
        roc << "fpr,tpr\n";
        for (const auto& [fpr, tpr] : pts) {
            roc << format_double(fpr) << "," << format_double(tpr) << "\n";
        }
        std::cout << "roc written to " << opt.roc_path << "\n";
    }
    if (!opt.weights_path.empty()) {
        std::ofstream w(opt.weights_path);
        if (!w) throw std::runtime_error("cannot write weights CSV: " + opt.weights_path);
        w << "run,index,weight\n";
        for (std::size_t run = 0; run < summary.weights_per_run.size(); ++run) {
            const auto& entries = summary.weights_per_run[run];
            for (std::size_t k = 0; k < entries.size(); ++k) {
                w << run << "," << k << "," << format_double(entries[k]) << "\n";
            }
        }
        std::cout << "weights written to " << opt.weights_path << "\n";
    }
    return 0;
}

int cmd_synth(const Options& opt) {
    const SyntheticPreset preset = parse_preset(opt.preset_name);
    const LabeledDataset data = generate_synthetic(preset, opt.n_per_class, opt.seed);
    save_csv(data, opt.out_path);
    std::cout << "synthetic preset=" << opt.preset_name << " rows=" << data.size()
              << " out=" << opt.out_path << "\n";
    return 0;
}

int cmd_compare(const Options& opt) {
    const std::vector<double> a = read_csv_column(opt.compare_a, opt.metric);
    const std::vector<double> b = read_csv_column(opt.compare_b, opt.metric);
    const TTestResult res = welch_t_test(a, b);
    const MetricStats sa = stats_of(a);
    const MetricStats sb = stats_of(b);
    std::cout << "metric=" << opt.metric << " n_a=" << a.size() << " n_b=" << b.size()
              << " mean_a=" << format_double(sa.mean) << " mean_b=" << format_double(sb.mean)
              << " t=" << format_double(res.t) << " df=" << format_double(res.df)
              << " p=" << format_double(res.p_two_sided) << "\n";
    std::cout << (res.p_two_sided < 0.05 ? "significant at 0.05" : "not significant at 0.05")
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal-margin evolutionary classifier"};
    app.require_subcommand(1);
    Options opt;

    const auto open_unit = CLI::Validator(
        [](std::string& s) {
            try {
                const double v = std::stod(s);
                return (v > 0.0 && v < 1.0) ? std::string{}
                                            : std::string("value must be in (0, 1)");
            } catch (const std::exception&) {
                return std::string("value must be a number");
            }
        },
        "FLOAT in (0,1)");

    CLI::App* train = app.add_subcommand("train", "fit a model on a labeled CSV");
    train->add_option("--data", opt.data_path, "input CSV")->required();
    train->add_option("--label-col", opt.label_col, "label column name (default: label)");
    train->add_option("--out", opt.out_path, "output model JSON")->required();
    train->add_option("--alpha", opt.alpha, "L1 factor")->check(CLI::NonNegativeNumber);
    train->add_option("--optimizer", opt.optimizer_name, "cmaes|es|pso")
        ->check(CLI::IsMember({"cmaes", "es", "pso"}));
    train->add_option("--seed", opt.seed, "random seed");

    CLI::App* predict = app.add_subcommand("predict", "apply a saved model to a CSV");
    predict->add_option("--data", opt.data_path, "input CSV (features only or labeled)")
        ->required();
    predict->add_option("--model", opt.model_path, "model JSON from train")->required();
    predict->add_option("--out", opt.out_path, "output predictions CSV")->required();
    CLI::Option* predict_label =
        predict->add_option("--label-col", opt.label_col, "label column to drop, if present");

    CLI::App* evaluate = app.add_subcommand("evaluate", "repeated split/train/score protocol");
    evaluate->add_option("--data", opt.data_path, "input CSV")->required();
    evaluate->add_option("--label-col", opt.label_col, "label column name (default: label)");
    evaluate->add_option("--out", opt.out_path, "output results CSV")->required();
    evaluate->add_option("--runs", opt.runs, "number of runs")->check(CLI::PositiveNumber);
    evaluate->add_option("--train-frac", opt.train_frac, "train fraction")->check(open_unit);
    evaluate->add_option("--noise", opt.noise, "train-side noise fraction")
        ->check(CLI::Range(0.0, 1.0));
    evaluate->add_option("--alpha", opt.alpha, "L1 factor")->check(CLI::NonNegativeNumber);
    evaluate->add_option("--optimizer", opt.optimizer_name, "cmaes|es|pso")
        ->check(CLI::IsMember({"cmaes", "es", "pso"}));
    evaluate->add_option("--seed", opt.seed, "master seed");
    evaluate->add_option("--class-frac", opt.class_fracs,
                         "per-class train fraction as class=fraction (repeatable)");
    evaluate->add_option("--emit-roc", opt.roc_path, "write last-run test ROC points (binary)");
    evaluate->add_option("--emit-weights", opt.weights_path, "write per-run projection entries");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset CSV");
    synth->add_option("--preset", opt.preset_name, "two_gaussians|overlap|outliers")->required();
    synth->add_option("--n-per-class", opt.n_per_class, "rows per class")
        ->check(CLI::PositiveNumber);
    synth->add_option("--out", opt.out_path, "output CSV")->required();
    synth->add_option("--seed", opt.seed, "random seed");

    CLI::App* compare = app.add_subcommand("compare", "Welch t-test between two results CSVs");
    compare->add_option("results_a", opt.compare_a, "first results CSV")->required();
    compare->add_option("results_b", opt.compare_b, "second results CSV")->required();
    compare->add_option("--metric", opt.metric, "results column to compare (default: test_auc)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse diagnostic
        return code == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) return cmd_train(opt);
        if (predict->parsed()) return cmd_predict(opt, predict_label->count() > 0);
        if (evaluate->parsed()) return cmd_evaluate(opt);
        if (synth->parsed()) return cmd_synth(opt);
        if (compare->parsed()) return cmd_compare(opt);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
