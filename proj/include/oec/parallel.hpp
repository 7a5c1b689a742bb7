#pragma once

#include <cstddef>

namespace oec {

// Execution policy for the population-evaluation kernels. `serial` is the
// reference path; `parallel` must produce bit-identical results (verified by
// tests and the benchmark tool).
enum class Exec { serial, parallel };

template <typename F>
void for_index(std::size_t n, Exec mode, F&& body) {
#ifdef _OPENMP
    if (mode == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace oec
