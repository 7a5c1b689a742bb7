#include "oec/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "oec/random.hpp"

namespace oec {

namespace {

std::vector<int> distinct_sorted(const std::vector<int>& labels) {
    std::set<int> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

bool parse_double_cell(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last && !cell.empty();
}

bool parse_int_cell(const std::string& cell, long long& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last && !cell.empty();
}

struct RawCsv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawCsv read_raw_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);
    RawCsv raw;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
    for (auto& cell : split_line(line)) raw.header.push_back(trim(cell));
    if (raw.header.empty()) throw std::runtime_error("CSV header has no columns: " + path);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != raw.header.size()) {
            throw std::runtime_error(path + ": line " + std::to_string(lineno) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(raw.header.size()));
        }
        for (auto& c : cells) c = trim(c);
        raw.rows.push_back(std::move(cells));
    }
    return raw;
}

// Finds the label column by exact name; a purely numeric selector falls back
// to a zero-based column index.
std::size_t find_label_column(const RawCsv& raw, const std::string& label_column,
                              const std::string& path) {
    for (std::size_t j = 0; j < raw.header.size(); ++j) {
        if (raw.header[j] == label_column) return j;
    }
    long long idx = 0;
    if (parse_int_cell(label_column, idx) && idx >= 0 &&
        idx < static_cast<long long>(raw.header.size())) {
        return static_cast<std::size_t>(idx);
    }
    throw std::runtime_error(path + ": label column \"" + label_column + "\" not found");
}

double parse_feature(const std::string& cell, std::size_t row, const std::string& col_name,
                     const std::string& path) {
    double v = 0.0;
    if (!parse_double_cell(cell, v) || !std::isfinite(v)) {
        throw std::runtime_error(path + ": non-numeric or non-finite value \"" + cell +
                                 "\" at data row " + std::to_string(row + 1) + ", column " +
                                 col_name);
    }
    return v;
}

}  // namespace

std::size_t LabeledDataset::class_count(int class_id) const {
    std::size_t c = 0;
    for (int y : labels) c += static_cast<std::size_t>(y == class_id);
    return c;
}

LabeledDataset make_dataset(Matrix features, std::vector<int> labels) {
    if (features.rows != labels.size()) {
        throw std::invalid_argument("make_dataset: feature rows and label count differ");
    }
    if (features.rows < 2) throw std::invalid_argument("make_dataset: need at least 2 rows");
    if (features.cols < 1) throw std::invalid_argument("make_dataset: need at least 1 feature");
    for (double v : features.data) {
        if (!std::isfinite(v)) throw std::invalid_argument("make_dataset: non-finite feature value");
    }
    LabeledDataset d;
    d.class_ids = distinct_sorted(labels);
    d.features = std::move(features);
    d.labels = std::move(labels);
    return d;
}

LabeledDataset subset_rows(const LabeledDataset& data, std::span<const std::size_t> rows) {
    Matrix f(rows.size(), data.dims());
    std::vector<int> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= data.size()) throw std::out_of_range("subset_rows: row index out of range");
        auto src = data.features.row(rows[i]);
        std::copy(src.begin(), src.end(), f.row(i).begin());
        labels[i] = data.labels[rows[i]];
    }
    return make_dataset(std::move(f), std::move(labels));
}

LabeledDataset load_csv(const std::string& path, const std::string& label_column) {
    RawCsv raw = read_raw_csv(path);
    const std::size_t label_idx = find_label_column(raw, label_column, path);
    if (raw.header.size() < 2) {
        throw std::runtime_error(path + ": need at least one feature column besides the label");
    }
    if (raw.rows.size() < 2) throw std::runtime_error(path + ": need at least 2 data rows");

    const std::size_t n = raw.header.size() - 1;
    Matrix features(raw.rows.size(), n);
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
        std::size_t out_j = 0;
        for (std::size_t j = 0; j < raw.header.size(); ++j) {
            if (j == label_idx) continue;
            features(i, out_j++) = parse_feature(raw.rows[i][j], i, raw.header[j], path);
        }
    }

    // Integer labels are kept verbatim; any non-integer label set is treated
    // as categorical and enumerated by first appearance.
    std::vector<int> labels(raw.rows.size());
    bool all_int = true;
    for (const auto& row : raw.rows) {
        long long v = 0;
        if (!parse_int_cell(row[label_idx], v)) {
            all_int = false;
            break;
        }
    }
    if (all_int) {
        for (std::size_t i = 0; i < raw.rows.size(); ++i) {
            long long v = 0;
            parse_int_cell(raw.rows[i][label_idx], v);
            labels[i] = static_cast<int>(v);
        }
    } else {
        std::map<std::string, int> seen;
        int next_id = 0;
        for (std::size_t i = 0; i < raw.rows.size(); ++i) {
            const std::string& cell = raw.rows[i][label_idx];
            auto it = seen.find(cell);
            if (it == seen.end()) it = seen.emplace(cell, next_id++).first;
            labels[i] = it->second;
        }
    }

    LabeledDataset data = make_dataset(std::move(features), std::move(labels));
    if (data.class_ids.size() < 2) {
        throw std::runtime_error(path + ": dataset has fewer than 2 classes");
    }
    return data;
}

void save_csv(const LabeledDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write CSV file: " + path);
    for (std::size_t j = 0; j < data.dims(); ++j) out << "f" << (j + 1) << ",";
    out << "label\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dims(); ++j) {
            out << format_double(data.features(i, j)) << ",";
        }
        out << data.labels[i] << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix load_feature_csv(const std::string& path, const std::optional<std::string>& label_column) {
    RawCsv raw = read_raw_csv(path);
    std::size_t label_idx = raw.header.size();  // sentinel: keep all columns
    if (label_column) label_idx = find_label_column(raw, *label_column, path);
    const std::size_t n = raw.header.size() - (label_idx < raw.header.size() ? 1 : 0);
    if (n == 0) throw std::runtime_error(path + ": no feature columns left");
    Matrix features(raw.rows.size(), n);
    for (std::size_t i = 0; i < raw.rows.size(); ++i) {
        std::size_t out_j = 0;
        for (std::size_t j = 0; j < raw.header.size(); ++j) {
            if (j == label_idx) continue;
            features(i, out_j++) = parse_feature(raw.rows[i][j], i, raw.header[j], path);
        }
    }
    return features;
}

Normalizer fit_normalizer(const LabeledDataset& train) {
    const std::size_t m = train.size();
    const std::size_t n = train.dims();
    if (m < 2) throw std::invalid_argument("fit_normalizer: need at least 2 rows");
    Normalizer norm;
    norm.means.resize(n);
    norm.stds.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double lo = train.features(0, j), hi = lo;
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double v = train.features(i, j);
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo == hi) {
            // Constant column: pin the mean to the constant so the transform
            // yields exactly 0, and use unit scale.
            norm.means[j] = lo;
            norm.stds[j] = 1.0;
            continue;
        }
        const double mean = sum / static_cast<double>(m);
        double ss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = train.features(i, j) - mean;
            ss += d * d;
        }
        norm.means[j] = mean;
        norm.stds[j] = std::sqrt(ss / static_cast<double>(m));  // population std
    }
    return norm;
}

std::vector<double> apply_normalizer(const Normalizer& norm, std::span<const double> row) {
    if (row.size() != norm.means.size()) {
        throw std::invalid_argument("apply_normalizer: dimension mismatch");
    }
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - norm.means[j]) / norm.stds[j];
    return out;
}

Matrix apply_normalizer(const Normalizer& norm, const Matrix& features) {
    if (features.cols != norm.means.size()) {
        throw std::invalid_argument("apply_normalizer: dimension mismatch");
    }
    Matrix out(features.rows, features.cols);
    for (std::size_t i = 0; i < features.rows; ++i) {
        for (std::size_t j = 0; j < features.cols; ++j) {
            out(i, j) = (features(i, j) - norm.means[j]) / norm.stds[j];
        }
    }
    return out;
}

LabeledDataset apply_normalizer(const Normalizer& norm, const LabeledDataset& data) {
    LabeledDataset out = data;
    out.features = apply_normalizer(norm, data.features);
    return out;
}

LabeledDataset apply_inverse(const Normalizer& norm, const LabeledDataset& data) {
    if (data.dims() != norm.means.size()) {
        throw std::invalid_argument("apply_inverse: dimension mismatch");
    }
    LabeledDataset out = data;
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < out.dims(); ++j) {
            out.features(i, j) = out.features(i, j) * norm.stds[j] + norm.means[j];
        }
    }
    return out;
}

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& data,
                                                           const SplitSpec& spec) {
    auto check_fraction = [](double f) {
        if (!(f > 0.0 && f < 1.0)) {
            throw std::invalid_argument("stratified_split: fraction must be in (0, 1)");
        }
    };
    check_fraction(spec.train_fraction);
    for (const auto& [cls, f] : spec.per_class_fractions) {
        check_fraction(f);
        if (std::find(data.class_ids.begin(), data.class_ids.end(), cls) == data.class_ids.end()) {
            throw std::invalid_argument("stratified_split: per-class fraction for unknown class " +
                                        std::to_string(cls));
        }
    }

    Rng rng(spec.seed);
    std::vector<std::size_t> train_rows, test_rows;
    for (int cls : data.class_ids) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.labels[i] == cls) idx.push_back(i);
        }
        const std::size_t mc = idx.size();
        if (mc < 2) {
            throw std::invalid_argument("stratified_split: class " + std::to_string(cls) +
                                        " has fewer than 2 instances");
        }
        double f = spec.train_fraction;
        if (auto it = spec.per_class_fractions.find(cls); it != spec.per_class_fractions.end()) {
            f = it->second;
        }
        // round half up, then clamp so both sides keep at least one row
        std::size_t k = static_cast<std::size_t>(std::floor(f * static_cast<double>(mc) + 0.5));
        k = std::clamp<std::size_t>(k, 1, mc - 1);
        shuffle(idx, rng);
        train_rows.insert(train_rows.end(), idx.begin(), idx.begin() + k);
        test_rows.insert(test_rows.end(), idx.begin() + k, idx.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    return {subset_rows(data, train_rows), subset_rows(data, test_rows)};
}

LabeledDataset inject_noise(const LabeledDataset& data, int target_class, double fraction,
                            std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("inject_noise: fraction must be in [0, 1]");
    }
    if (std::find(data.class_ids.begin(), data.class_ids.end(), target_class) ==
        data.class_ids.end()) {
        throw std::invalid_argument("inject_noise: target class " + std::to_string(target_class) +
                                    " not present");
    }

    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] == target_class) targets.push_back(i);
    }
    const std::size_t k =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(targets.size())));

    LabeledDataset out = data;
    if (k == 0) return out;

    const std::size_t n = data.dims();
    std::vector<double> lo(n), hi(n);
    for (std::size_t j = 0; j < n; ++j) {
        double mn = data.features(0, j), mx = mn;
        for (std::size_t i = 0; i < data.size(); ++i) {
            mn = std::min(mn, data.features(i, j));
            mx = std::max(mx, data.features(i, j));
        }
        const double range = mx - mn;
        lo[j] = mn - 0.5 * range;
        hi[j] = mx + 0.5 * range;
    }

    Rng rng(seed);
    shuffle(targets, rng);
    std::vector<std::size_t> chosen(targets.begin(), targets.begin() + k);
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t row : chosen) {
        for (std::size_t j = 0; j < n; ++j) out.features(row, j) = rng.uniform(lo[j], hi[j]);
    }
    return out;
}

SyntheticPreset parse_preset(const std::string& name) {
    if (name == "two_gaussians") return SyntheticPreset::two_gaussians;
    if (name == "overlap") return SyntheticPreset::overlap;
    if (name == "outliers") return SyntheticPreset::outliers;
    throw std::invalid_argument("unknown synthetic preset: " + name);
}

namespace {

struct Gaussian2 {
    double mu1, mu2;
    double a11, a12, a21, a22;  // mixing matrix applied to iid standard normals
};

void emit_rows(Matrix& f, std::vector<int>& labels, std::size_t& row, const Gaussian2& g,
               int label, std::size_t count, Rng& rng) {
    for (std::size_t i = 0; i < count; ++i) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        f(row, 0) = g.mu1 + g.a11 * z1 + g.a12 * z2;
        f(row, 1) = g.mu2 + g.a21 * z1 + g.a22 * z2;
        labels[row] = label;
        ++row;
    }
}

}  // namespace

LabeledDataset generate_synthetic(SyntheticPreset preset, std::size_t n_per_class,
                                  std::uint64_t seed) {
    if (n_per_class < 1) throw std::invalid_argument("generate_synthetic: n_per_class must be >= 1");

    const Gaussian2 neg{-9.0, -3.0, 2.83, -2.83, 0.71, 0.71};
    Gaussian2 pos{3.0, 6.0, 0.87, -0.5, 1.5, 2.6};
    if (preset == SyntheticPreset::overlap) {
        pos.mu1 = -3.0;
        pos.mu2 = -6.0;
    }
    const Gaussian2 outlier{50.0, 50.0, 8.66, -5.0, 15.0, 25.98};

    std::size_t extra = 0;
    if (preset == SyntheticPreset::outliers) {
        extra = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(0.15 * static_cast<double>(n_per_class))));
    }

    const std::size_t total = 2 * n_per_class + extra;
    Matrix f(total, 2);
    std::vector<int> labels(total);
    Rng rng(seed);
    std::size_t row = 0;
    emit_rows(f, labels, row, neg, -1, n_per_class, rng);
    emit_rows(f, labels, row, pos, +1, n_per_class, rng);
    if (extra > 0) emit_rows(f, labels, row, outlier, +1, extra, rng);
    return make_dataset(std::move(f), std::move(labels));
}

}  // namespace oec
