#pragma once

// Shared fixtures for the test binaries: random 1-D instances for the
// threshold oracle suite, small synthetic datasets, and closed-form reference
// classifiers used as independent oracles.

#include <cstdint>
#include <vector>

#include "oec/dataset.hpp"
#include "oec/matrix.hpp"
#include "oec/random.hpp"
#include "oec/threshold.hpp"

namespace test_util {

struct Instance {
    std::vector<double> x;
    std::vector<int> y;
};

// Random labeled 1-D instance. Half the cases draw coordinates from a coarse
// grid (multiples of 1/4, so duplicates are common and midpoints are exact
// doubles); the rest are continuous. Both classes are always present.
inline Instance random_instance(oec::Rng& rng, std::size_t m_min = 2, std::size_t m_max = 200) {
    const std::size_t m = m_min + rng.uniform_index(m_max - m_min + 1);
    Instance inst;
    inst.x.resize(m);
    inst.y.resize(m);
    const bool grid = rng.uniform() < 0.5;
    for (std::size_t i = 0; i < m; ++i) {
        inst.x[i] = grid ? -5.0 + 0.25 * static_cast<double>(rng.uniform_index(41))
                         : rng.uniform(-5.0, 5.0);
        inst.y[i] = rng.uniform() < 0.5 ? -1 : 1;
    }
    inst.y[0] = -1;
    inst.y[m - 1] = 1;
    return inst;
}

inline bool rules_identical(const oec::ThresholdRule& a, const oec::ThresholdRule& b) {
    return a.t_prime == b.t_prime && a.s == b.s && a.p == b.p && a.r == b.r;
}

// Every point duplicated k times (block-wise; the rules are order-free).
inline Instance replicate(const Instance& inst, std::size_t k) {
    Instance out;
    for (std::size_t rep = 0; rep < k; ++rep) {
        out.x.insert(out.x.end(), inst.x.begin(), inst.x.end());
        out.y.insert(out.y.end(), inst.y.begin(), inst.y.end());
    }
    return out;
}

// Three well-separated 2-D blobs labeled 0/1/2.
inline oec::LabeledDataset make_blobs(std::size_t per_class, std::uint64_t seed) {
    const double mx[3] = {0.0, 8.0, 0.0};
    const double my[3] = {0.0, 0.0, 8.0};
    oec::Rng rng(seed);
    oec::Matrix f(3 * per_class, 2);
    std::vector<int> labels(3 * per_class);
    std::size_t row = 0;
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < per_class; ++i, ++row) {
            f(row, 0) = mx[c] + rng.normal();
            f(row, 1) = my[c] + rng.normal();
            labels[row] = c;
        }
    }
    return oec::make_dataset(std::move(f), std::move(labels));
}

// Two shifted spherical Gaussians in n dimensions, labels -1/+1.
inline oec::LabeledDataset gaussian_nd(std::size_t per_class, std::size_t n, double sep,
                                       std::uint64_t seed) {
    oec::Rng rng(seed);
    oec::Matrix f(2 * per_class, n);
    std::vector<int> labels(2 * per_class);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const bool pos = i >= per_class;
        for (std::size_t j = 0; j < n; ++j) {
            f(i, j) = rng.normal() + (pos ? sep : -sep) / std::sqrt(static_cast<double>(n));
        }
        labels[i] = pos ? 1 : -1;
    }
    return oec::make_dataset(std::move(f), std::move(labels));
}

// Appends one pure-noise N(0,1) feature column.
inline oec::LabeledDataset with_noise_feature(const oec::LabeledDataset& data,
                                              std::uint64_t seed) {
    oec::Rng rng(seed);
    oec::Matrix f(data.size(), data.dims() + 1);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.dims(); ++j) f(i, j) = data.features(i, j);
        f(i, data.dims()) = rng.normal();
    }
    return oec::make_dataset(std::move(f), data.labels);
}

// Closed-form Fisher discriminant for 2-D signed-label data: pooled
// covariance inverse applied to the mean difference. Used as an independent
// oracle for AUC-level checks.
inline std::vector<double> fisher_direction(const oec::LabeledDataset& data) {
    double mneg[2] = {0, 0}, mpos[2] = {0, 0};
    std::size_t nn = 0, np = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = data.features.row(i);
        if (data.labels[i] == -1) {
            mneg[0] += row[0];
            mneg[1] += row[1];
            ++nn;
        } else {
            mpos[0] += row[0];
            mpos[1] += row[1];
            ++np;
        }
    }
    mneg[0] /= static_cast<double>(nn);
    mneg[1] /= static_cast<double>(nn);
    mpos[0] /= static_cast<double>(np);
    mpos[1] /= static_cast<double>(np);

    double s11 = 0, s12 = 0, s22 = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto row = data.features.row(i);
        const double* mu = data.labels[i] == -1 ? mneg : mpos;
        const double d0 = row[0] - mu[0];
        const double d1 = row[1] - mu[1];
        s11 += d0 * d0;
        s12 += d0 * d1;
        s22 += d1 * d1;
    }
    const double denom = static_cast<double>(data.size() - 2);
    s11 /= denom;
    s12 /= denom;
    s22 /= denom;
    const double det = s11 * s22 - s12 * s12;
    const double d0 = mpos[0] - mneg[0];
    const double d1 = mpos[1] - mneg[1];
    return {(s22 * d0 - s12 * d1) / det, (-s12 * d0 + s11 * d1) / det};
}

// Nearest-centroid accuracy: centroids from `train`, scored on `test`.
inline double nearest_centroid_accuracy(const oec::LabeledDataset& train,
                                        const oec::LabeledDataset& test) {
    const std::size_t n = train.dims();
    std::vector<std::vector<double>> centroids(train.class_ids.size(),
                                               std::vector<double>(n, 0.0));
    std::vector<std::size_t> counts(train.class_ids.size(), 0);
    auto pos_of = [&](int cls) {
        for (std::size_t c = 0; c < train.class_ids.size(); ++c) {
            if (train.class_ids[c] == cls) return c;
        }
        return train.class_ids.size();
    };
    for (std::size_t i = 0; i < train.size(); ++i) {
        const std::size_t c = pos_of(train.labels[i]);
        for (std::size_t j = 0; j < n; ++j) centroids[c][j] += train.features(i, j);
        ++counts[c];
    }
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        for (double& v : centroids[c]) v /= static_cast<double>(counts[c]);
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        std::size_t arg = 0;
        double best = 1e300;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double diff = test.features(i, j) - centroids[c][j];
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                arg = c;
            }
        }
        correct += static_cast<std::size_t>(train.class_ids[arg] == test.labels[i]);
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace test_util
