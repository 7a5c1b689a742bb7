#include "oec/classifier.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "oec/matrix.hpp"
#include "oec/metrics.hpp"

namespace oec {

namespace {

using json = nlohmann::json;

// Core fit on data that is already normalized and signed-labeled; `norm` is
// the transform that produced it and is stored in the model.
LinearModel train_on_normalized(const LabeledDataset& normed, const EAConfig& cfg,
                                Normalizer norm) {
    const Objective objective = [&](std::span<const double> w) {
        return evaluate(normed, w, cfg.alpha).z;
    };
    OptimizationTrace tr = maximize(objective, normed.dims(), cfg);
    const FitnessReport report = evaluate(normed, tr.best_omega, cfg.alpha);

    // Recompute the training balanced accuracy from actual predictions of the
    // final rule rather than trusting the sweep's bookkeeping.
    const std::vector<double> coords = project(normed.features, tr.best_omega);
    std::vector<int> pred(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) pred[i] = predict_1d(report.rule, coords[i]);
    const double bacc = balanced_accuracy(pred, normed.labels);

    LinearModel model;
    model.omega = std::move(tr.best_omega);
    model.rule = report.rule;
    model.normalizer = std::move(norm);
    model.train_performance = bacc;
    model.alpha = cfg.alpha;
    model.trace = {tr.best_fitness, tr.evaluations};
    return model;
}

std::size_t class_position(const std::vector<int>& class_ids, int cls) {
    for (std::size_t i = 0; i < class_ids.size(); ++i) {
        if (class_ids[i] == cls) return i;
    }
    throw std::logic_error("class id not found");
}

json rule_to_json(const LinearModel& m) {
    return json{{"omega", m.omega},
                {"s", m.rule.s},
                {"t_prime", m.rule.t_prime},
                {"margin", m.rule.r},
                {"train_performance", m.train_performance},
                {"alpha", m.alpha}};
}

LinearModel rule_from_json(const json& j, const Normalizer& norm) {
    LinearModel m;
    m.omega = j.at("omega").get<std::vector<double>>();
    if (m.omega.empty() || m.omega.size() != norm.means.size()) {
        throw std::runtime_error("model file parse error: omega size inconsistent with normalizer");
    }
    m.rule.s = j.at("s").get<int>();
    if (m.rule.s != -1 && m.rule.s != 1) {
        throw std::runtime_error("model file parse error: s must be -1 or +1");
    }
    m.rule.t_prime = j.at("t_prime").get<double>();
    m.rule.r = j.at("margin").get<double>();
    m.train_performance = j.at("train_performance").get<double>();
    m.rule.p = m.train_performance;
    m.alpha = j.at("alpha").get<double>();
    m.normalizer = norm;
    m.trace = {};  // fitting history is not serialized
    return m;
}

Normalizer normalizer_from_json(const json& j) {
    Normalizer n;
    n.means = j.at("means").get<std::vector<double>>();
    n.stds = j.at("stds").get<std::vector<double>>();
    if (n.means.size() != n.stds.size() || n.means.empty()) {
        throw std::runtime_error("model file parse error: bad normalizer arrays");
    }
    for (double s : n.stds) {
        if (!(s > 0.0)) throw std::runtime_error("model file parse error: non-positive std");
    }
    return n;
}

}  // namespace

LabeledDataset to_signed_labels(const LabeledDataset& data) {
    if (data.class_ids.size() != 2) {
        throw std::invalid_argument("to_signed_labels: need exactly 2 classes");
    }
    LabeledDataset out = data;
    for (int& y : out.labels) y = (y == data.class_ids[0]) ? -1 : 1;
    out.class_ids = {-1, 1};
    return out;
}

LinearModel train_binary(const LabeledDataset& train, const EAConfig& config) {
    if (train.class_ids != std::vector<int>{-1, 1}) {
        throw std::invalid_argument(
            "train_binary: labels must be -1/+1 with both classes present");
    }
    Normalizer norm = fit_normalizer(train);
    const LabeledDataset normed = apply_normalizer(norm, train);
    return train_on_normalized(normed, config, std::move(norm));
}

double decision_value(const LinearModel& model, std::span<const double> x) {
    const std::vector<double> xn = apply_normalizer(model.normalizer, x);
    return static_cast<double>(model.rule.s) * dot(xn, model.omega) - model.rule.t_prime;
}

int predict_binary(const LinearModel& model, std::span<const double> x) {
    return decision_value(model, x) <= 0.0 ? -1 : 1;
}

OvoModel train_multiclass(const LabeledDataset& train, const EAConfig& config) {
    const std::size_t c = train.class_ids.size();
    if (c < 2) throw std::invalid_argument("train_multiclass: need at least 2 classes");
    for (int cls : train.class_ids) {
        if (train.class_count(cls) < 2) {
            throw std::invalid_argument("train_multiclass: class " + std::to_string(cls) +
                                        " has fewer than 2 instances");
        }
    }

    OvoModel out;
    out.class_ids = train.class_ids;
    out.normalizer = fit_normalizer(train);
    const LabeledDataset normed = apply_normalizer(out.normalizer, train);

    std::size_t pair_index = 0;
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = i + 1; j < c; ++j) {
            const int ca = train.class_ids[i];
            const int cb = train.class_ids[j];
            std::vector<std::size_t> rows;
            for (std::size_t r = 0; r < normed.size(); ++r) {
                if (normed.labels[r] == ca || normed.labels[r] == cb) rows.push_back(r);
            }
            LabeledDataset sub = subset_rows(normed, rows);
            for (int& y : sub.labels) y = (y == ca) ? -1 : 1;
            sub.class_ids = {-1, 1};

            EAConfig pair_cfg = config;
            pair_cfg.seed = config.seed + pair_index;
            out.pairs.push_back({ca, cb, train_on_normalized(sub, pair_cfg, out.normalizer)});
            ++pair_index;
        }
    }
    return out;
}

std::vector<std::size_t> ovo_votes(const OvoModel& model, std::span<const double> x) {
    std::vector<std::size_t> votes(model.class_ids.size(), 0);
    for (const PairModel& pair : model.pairs) {
        const int side = predict_binary(pair.model, x);
        const int winner = side == -1 ? pair.class_a : pair.class_b;
        ++votes[class_position(model.class_ids, winner)];
    }
    return votes;
}

int predict_multiclass(const OvoModel& model, std::span<const double> x) {
    const std::vector<std::size_t> votes = ovo_votes(model, x);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < votes.size(); ++i) {
        if (votes[i] > votes[arg]) arg = i;  // strict: ties keep the earliest class
    }
    return model.class_ids[arg];
}

void save_model(const Model& model, const std::string& path) {
    json j;
    j["version"] = 1;
    if (const auto* binary = std::get_if<BinaryClassifier>(&model)) {
        j["kind"] = "binary";
        j["class_ids"] = binary->class_ids;
        j["model"] = rule_to_json(binary->model);
        j["normalizer"] = {{"means", binary->model.normalizer.means},
                           {"stds", binary->model.normalizer.stds}};
    } else {
        const auto& ovo = std::get<OvoModel>(model);
        j["kind"] = "ovo";
        j["class_ids"] = ovo.class_ids;
        json models = json::array();
        for (const PairModel& pair : ovo.pairs) {
            json pj = rule_to_json(pair.model);
            pj["classes"] = {pair.class_a, pair.class_b};
            models.push_back(std::move(pj));
        }
        j["models"] = std::move(models);
        j["normalizer"] = {{"means", ovo.normalizer.means}, {"stds", ovo.normalizer.stds}};
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("model file parse error in " + path + ": " + e.what());
    }

    try {
        if (!j.contains("version")) throw std::runtime_error("missing version field");
        const int version = j.at("version").get<int>();
        if (version != 1) {
            throw std::runtime_error("unsupported model file version " + std::to_string(version) +
                                     " (expected 1)");
        }
        const std::string kind = j.at("kind").get<std::string>();
        const Normalizer norm = normalizer_from_json(j.at("normalizer"));
        const std::vector<int> class_ids = j.at("class_ids").get<std::vector<int>>();

        if (kind == "binary") {
            if (class_ids.size() != 2) {
                throw std::runtime_error("binary model needs exactly 2 class ids");
            }
            BinaryClassifier bc;
            bc.class_ids = class_ids;
            bc.model = rule_from_json(j.at("model"), norm);
            return bc;
        }
        if (kind == "ovo") {
            OvoModel ovo;
            ovo.class_ids = class_ids;
            ovo.normalizer = norm;
            for (const json& pj : j.at("models")) {
                const auto classes = pj.at("classes").get<std::vector<int>>();
                if (classes.size() != 2) throw std::runtime_error("pair needs 2 class ids");
                PairModel pair;
                pair.class_a = classes[0];
                pair.class_b = classes[1];
                pair.model = rule_from_json(pj, norm);
                ovo.pairs.push_back(std::move(pair));
            }
            if (ovo.pairs.size() != class_ids.size() * (class_ids.size() - 1) / 2) {
                throw std::runtime_error("pair count inconsistent with class count");
            }
            return ovo;
        }
        throw std::runtime_error("unknown model kind \"" + kind + "\"");
    } catch (const json::exception& e) {
        throw std::runtime_error("model file parse error in " + path + ": " + e.what());
    }
}

}  // namespace oec
