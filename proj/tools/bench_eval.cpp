// Benchmark: serial vs OpenMP population evaluation on a synthetic workload.
// Also asserts that both paths return bit-identical fitness reports, which is
// the contract the optimizer relies on.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "oec/dataset.hpp"
#include "oec/objective.hpp"
#include "oec/random.hpp"

using namespace oec;

namespace {

LabeledDataset gaussian_blobs(std::size_t m_per_class, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix f(2 * m_per_class, n);
    std::vector<int> labels(2 * m_per_class);
    for (std::size_t i = 0; i < 2 * m_per_class; ++i) {
        const bool pos = i >= m_per_class;
        for (std::size_t j = 0; j < n; ++j) {
            f(i, j) = rng.normal() + (pos ? 1.5 : -1.5) * (j % 3 == 0 ? 1.0 : 0.2);
        }
        labels[i] = pos ? 1 : -1;
    }
    return make_dataset(std::move(f), std::move(labels));
}

double time_eval(const LabeledDataset& data, const std::vector<std::vector<double>>& cands,
                 double alpha, Exec mode, int reps, std::vector<FitnessReport>& out) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        out = evaluate_population(data, cands, alpha, mode);
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (dt < best) best = dt;
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t m_per_class = 2500;
    std::size_t n = 40;
    std::size_t lambda = 64;
    int reps = 5;
    if (argc > 1) m_per_class = std::strtoull(argv[1], nullptr, 10);
    if (argc > 2) n = std::strtoull(argv[2], nullptr, 10);
    if (argc > 3) lambda = std::strtoull(argv[3], nullptr, 10);
    if (argc > 4) reps = std::atoi(argv[4]);

    const LabeledDataset data = gaussian_blobs(m_per_class, n, 7);
    Rng rng(11);
    std::vector<std::vector<double>> cands(lambda);
    for (auto& c : cands) {
        c.resize(n);
        for (double& v : c) v = rng.normal();
        const double norm = l2_norm(c);
        for (double& v : c) v /= norm;
    }

#ifdef _OPENMP
    const int threads = omp_get_max_threads();
#else
    const int threads = 1;
#endif
    std::printf("population evaluation benchmark\n");
    std::printf("rows=%zu dims=%zu lambda=%zu reps=%d threads=%d\n", data.size(), data.dims(),
                lambda, reps, threads);

    std::vector<FitnessReport> serial_out, parallel_out;
    const double t_serial = time_eval(data, cands, 0.1, Exec::serial, reps, serial_out);
    const double t_parallel = time_eval(data, cands, 0.1, Exec::parallel, reps, parallel_out);

    bool identical = serial_out.size() == parallel_out.size();
    for (std::size_t k = 0; identical && k < serial_out.size(); ++k) {
        identical = serial_out[k].z == parallel_out[k].z &&
                    serial_out[k].rule.t_prime == parallel_out[k].rule.t_prime &&
                    serial_out[k].rule.s == parallel_out[k].rule.s &&
                    serial_out[k].rule.p == parallel_out[k].rule.p &&
                    serial_out[k].rule.r == parallel_out[k].rule.r &&
                    serial_out[k].l1_penalty == parallel_out[k].l1_penalty;
    }

    std::printf("serial:   %.6f s per evaluation pass\n", t_serial);
    std::printf("parallel: %.6f s per evaluation pass\n", t_parallel);
    std::printf("speedup:  %.2fx\n", t_serial / t_parallel);
    std::printf("bit-identical results: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
