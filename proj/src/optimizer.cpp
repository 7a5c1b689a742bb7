#include "oec/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "oec/matrix.hpp"

namespace oec {

Backend parse_backend(const std::string& name) {
    if (name == "cmaes") return Backend::cmaes;
    if (name == "es") return Backend::es;
    if (name == "pso") return Backend::pso;
    throw std::invalid_argument("unknown optimizer backend: " + name);
}

EAConfig default_config(std::size_t n) {
    if (n < 1) throw std::invalid_argument("default_config: dimension must be >= 1");
    const double nd = static_cast<double>(n);
    EAConfig cfg;
    cfg.lambda = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::floor(4.0 + 3.0 * std::log(nd))));
    cfg.mu = cfg.lambda / 2;
    cfg.max_iterations = static_cast<std::size_t>(std::ceil(150.0 * std::log(nd + 1.0)));
    return cfg;
}

std::vector<double> normalize_candidate(std::span<const double> omega, Rng& rng) {
    if (omega.empty()) throw std::invalid_argument("normalize_candidate: empty vector");
    std::vector<double> out(omega.begin(), omega.end());
    const double norm = l2_norm(out);
    if (norm < 1e-12) {
        std::fill(out.begin(), out.end(), 0.0);
        out[rng.uniform_index(out.size())] = 1.0;
        return out;
    }
    for (double& v : out) v /= norm;
    return out;
}

namespace {

std::vector<double> random_unit_vector(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return normalize_candidate(v, rng);
}

std::string candidate_text(std::span<const double> omega) {
    std::string s = "[";
    const std::size_t shown = std::min<std::size_t>(omega.size(), 16);
    for (std::size_t i = 0; i < shown; ++i) {
        if (i) s += ", ";
        s += format_double(omega[i]);
    }
    if (shown < omega.size()) s += ", ...";
    s += "]";
    return s;
}

// Evaluates one generation under the configured policy; candidate order is
// preserved and the lowest-index failure is reported, so results do not
// depend on thread count.
std::vector<double> evaluate_generation(const Objective& f,
                                        const std::vector<std::vector<double>>& units, Exec mode) {
    std::vector<double> fitness(units.size());
    std::vector<std::exception_ptr> errors(units.size());
    for_index(units.size(), mode, [&](std::size_t k) {
        try {
            fitness[k] = f(units[k]);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    });
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (!errors[k]) continue;
        try {
            std::rethrow_exception(errors[k]);
        } catch (const std::exception& e) {
            throw std::runtime_error("candidate " + candidate_text(units[k]) +
                                     " failed evaluation: " + e.what());
        }
    }
    return fitness;
}

// Indices sorted by fitness descending; stable so equal fitness keeps the
// lower candidate index first.
std::vector<std::size_t> rank_desc(const std::vector<double>& fitness) {
    std::vector<std::size_t> idx(fitness.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
    return idx;
}

struct BestTracker {
    double fitness = -std::numeric_limits<double>::infinity();
    std::vector<double> omega;

    void offer(double f, const std::vector<double>& unit) {
        if (f > fitness) {  // strict: ties keep the earlier candidate
            fitness = f;
            omega = unit;
        }
    }
};

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition (cyclic Jacobi). Sizes here are small (search
// dimension), so the O(n^3)-per-sweep cost is irrelevant and the method is
// exactly reproducible.
// ---------------------------------------------------------------------------

struct Eigensystem {
    std::vector<double> values;   // n
    std::vector<double> vectors;  // n*n row-major; column j is eigenvector j
};

Eigensystem jacobi_eigen_symmetric(std::vector<double> a, std::size_t n) {
    Eigensystem es;
    es.vectors.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) es.vectors[i * n + i] = 1.0;
    if (n == 1) {
        es.values = {a[0]};
        return es;
    }

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            diag += a[p * n + p] * a[p * n + p];
            for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        }
        if (off <= 1e-30 * (diag + 1e-300)) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t =
                    (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {  // columns p and q
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // rows p and q
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = es.vectors[k * n + p];
                    const double vkq = es.vectors[k * n + q];
                    es.vectors[k * n + p] = c * vkp - s * vkq;
                    es.vectors[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    es.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) es.values[i] = a[i * n + i];
    return es;
}

// ---------------------------------------------------------------------------
// CMA-ES
// ---------------------------------------------------------------------------

OptimizationTrace cmaes_maximize(const Objective& f, std::size_t n, const EAConfig& cfg) {
    Rng rng(cfg.seed);
    const std::size_t lambda = cfg.lambda;
    const std::size_t mu = cfg.mu;
    const double nd = static_cast<double>(n);

    std::vector<double> w(mu);
    for (std::size_t i = 0; i < mu; ++i) {
        w[i] = std::log((static_cast<double>(lambda) + 1.0) / 2.0) -
               std::log(static_cast<double>(i) + 1.0);
    }
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& wi : w) wi /= wsum;
    double w2 = 0.0;
    for (double wi : w) w2 += wi * wi;
    const double mu_eff = 1.0 / w2;

    const double c_sigma = (mu_eff + 2.0) / (nd + mu_eff + 5.0);
    const double d_sigma =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (nd + 1.0)) - 1.0) + c_sigma;
    const double c_c = (4.0 + mu_eff / nd) / (nd + 4.0 + 2.0 * mu_eff / nd);
    const double c_1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mu_eff);
    const double c_mu = std::min(
        1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nd + 2.0) * (nd + 2.0) + mu_eff));
    const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

    std::vector<double> mean = random_unit_vector(n, rng);
    double sigma = cfg.initial_sigma;
    std::vector<double> C(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) C[i * n + i] = 1.0;
    std::vector<double> B(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) B[i * n + i] = 1.0;
    std::vector<double> D(n, 1.0);
    std::vector<double> p_sigma(n, 0.0), p_c(n, 0.0);

    // Small problems refresh the eigensystem every generation (needed for the
    // recorded spectrum floor); large ones amortize on the usual lazy
    // schedule tied to the covariance learning rates.
    const std::size_t refresh_every =
        n <= 64 ? 1
                : std::max<std::size_t>(
                      1, static_cast<std::size_t>(1.0 / ((c_1 + c_mu) * nd * 10.0)));

    OptimizationTrace trace;
    BestTracker best;
    std::vector<std::vector<double>> raw(lambda, std::vector<double>(n));
    std::vector<std::vector<double>> units(lambda);
    std::vector<double> tmp(n), u(n);

    for (std::size_t gen = 0; gen < cfg.max_iterations; ++gen) {
        if (gen % refresh_every == 0) {
            // Symmetrize against drift, decompose, floor the spectrum.
            std::vector<double> csym(n * n);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    csym[i * n + j] = 0.5 * (C[i * n + j] + C[j * n + i]);
                }
            }
            Eigensystem es = jacobi_eigen_symmetric(std::move(csym), n);
            double max_eig = es.values[0];
            for (double v : es.values) max_eig = std::max(max_eig, v);
            const double floor_v = std::max(1e-30, max_eig * 1e-14);
            double min_eig = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double v = std::max(es.values[i], floor_v);
                D[i] = std::sqrt(v);
                min_eig = std::min(min_eig, v);
            }
            B = std::move(es.vectors);
            trace.cov_min_eigen.push_back(min_eig);
        }

        // Sample lambda candidates: x = mean + sigma * B * (D .* z).
        for (std::size_t k = 0; k < lambda; ++k) {
            for (std::size_t j = 0; j < n; ++j) tmp[j] = D[j] * rng.normal();
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j) acc += B[i * n + j] * tmp[j];
                raw[k][i] = mean[i] + sigma * acc;
            }
            units[k] = normalize_candidate(raw[k], rng);
        }

        const std::vector<double> fitness = evaluate_generation(f, units, cfg.evaluation);
        trace.evaluations += lambda;
        for (std::size_t k = 0; k < lambda; ++k) best.offer(fitness[k], units[k]);

        const std::vector<std::size_t> idx = rank_desc(fitness);

        const std::vector<double> old_mean = mean;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < mu; ++j) acc += w[j] * raw[idx[j]][i];
            mean[i] = acc;
        }

        // delta = (mean - old_mean) / sigma;  whitened step for the sigma path.
        std::vector<double> delta(n);
        for (std::size_t i = 0; i < n; ++i) delta[i] = (mean[i] - old_mean[i]) / sigma;
        for (std::size_t j = 0; j < n; ++j) {  // u = D^-1 * B^T * delta
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += B[i * n + j] * delta[i];
            u[j] = acc / D[j];
        }
        std::vector<double> whitened(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += B[i * n + j] * u[j];
            whitened[i] = acc;
        }

        const double cs_scale = std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff);
        for (std::size_t i = 0; i < n; ++i) {
            p_sigma[i] = (1.0 - c_sigma) * p_sigma[i] + cs_scale * whitened[i];
        }
        const double ps_norm = l2_norm(p_sigma);
        const double expected =
            std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * static_cast<double>(gen + 1)));
        const bool hsig = ps_norm / expected / chi_n < 1.4 + 2.0 / (nd + 1.0);

        const double cc_scale = std::sqrt(c_c * (2.0 - c_c) * mu_eff);
        for (std::size_t i = 0; i < n; ++i) {
            p_c[i] = (1.0 - c_c) * p_c[i] + (hsig ? cc_scale * delta[i] : 0.0);
        }

        const double old_decay = 1.0 - c_1 - c_mu;
        const double hsig_fix = (1.0 - (hsig ? 1.0 : 0.0)) * c_c * (2.0 - c_c);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double cij = (old_decay + c_1 * hsig_fix) * C[i * n + j];
                cij += c_1 * p_c[i] * p_c[j];
                for (std::size_t k = 0; k < mu; ++k) {
                    const double yi = (raw[idx[k]][i] - old_mean[i]) / sigma;
                    const double yj = (raw[idx[k]][j] - old_mean[j]) / sigma;
                    cij += c_mu * w[k] * yi * yj;
                }
                C[i * n + j] = cij;
            }
        }

        sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));
        sigma = std::clamp(sigma, 1e-32, 1e32);

        trace.fitness_history.push_back(best.fitness);
    }

    trace.best_omega = best.omega;
    trace.best_fitness = best.fitness;
    return trace;
}

// ---------------------------------------------------------------------------
// (mu, lambda) evolution strategy with log-normal step-size self-adaptation
// ---------------------------------------------------------------------------

OptimizationTrace es_maximize(const Objective& f, std::size_t n, const EAConfig& cfg) {
    Rng rng(cfg.seed);
    const std::size_t lambda = cfg.lambda;
    const std::size_t mu = cfg.mu;
    const double tau = 1.0 / std::sqrt(2.0 * static_cast<double>(n));

    struct Individual {
        std::vector<double> x;
        double sigma;
    };
    std::vector<Individual> parents(mu);
    for (auto& p : parents) p = {random_unit_vector(n, rng), cfg.initial_sigma};

    OptimizationTrace trace;
    BestTracker best;
    std::vector<Individual> offspring(lambda);
    std::vector<std::vector<double>> units(lambda);

    for (std::size_t gen = 0; gen < cfg.max_iterations; ++gen) {
        for (std::size_t k = 0; k < lambda; ++k) {
            const Individual& parent = parents[rng.uniform_index(mu)];
            double s = parent.sigma * std::exp(tau * rng.normal());
            s = std::clamp(s, 1e-12, 1e12);
            std::vector<double> x = parent.x;
            for (double& xi : x) xi += s * rng.normal();
            units[k] = normalize_candidate(x, rng);
            offspring[k] = {std::move(x), s};
        }

        const std::vector<double> fitness = evaluate_generation(f, units, cfg.evaluation);
        trace.evaluations += lambda;
        for (std::size_t k = 0; k < lambda; ++k) best.offer(fitness[k], units[k]);

        const std::vector<std::size_t> idx = rank_desc(fitness);
        std::vector<Individual> next(mu);
        for (std::size_t i = 0; i < mu; ++i) next[i] = offspring[idx[i]];
        parents = std::move(next);

        trace.fitness_history.push_back(best.fitness);
    }

    trace.best_omega = best.omega;
    trace.best_fitness = best.fitness;
    return trace;
}

// ---------------------------------------------------------------------------
// Global-best particle swarm (synchronous, constriction-style coefficients)
// ---------------------------------------------------------------------------

OptimizationTrace pso_maximize(const Objective& f, std::size_t n, const EAConfig& cfg) {
    constexpr double kInertia = 0.7298;
    constexpr double kCognitive = 1.49618;
    constexpr double kSocial = 1.49618;

    Rng rng(cfg.seed);
    const std::size_t lambda = cfg.lambda;

    std::vector<std::vector<double>> x(lambda), vel(lambda), units(lambda);
    for (std::size_t k = 0; k < lambda; ++k) {
        x[k] = random_unit_vector(n, rng);
        vel[k].resize(n);
        for (double& v : vel[k]) v = rng.uniform(-cfg.initial_sigma, cfg.initial_sigma);
    }

    OptimizationTrace trace;
    BestTracker best;

    for (std::size_t k = 0; k < lambda; ++k) units[k] = normalize_candidate(x[k], rng);
    std::vector<double> fitness = evaluate_generation(f, units, cfg.evaluation);
    trace.evaluations += lambda;
    for (std::size_t k = 0; k < lambda; ++k) best.offer(fitness[k], units[k]);

    std::vector<std::vector<double>> pbest_x = x;
    std::vector<double> pbest_f = fitness;
    std::size_t gbest = 0;
    for (std::size_t k = 1; k < lambda; ++k) {
        if (pbest_f[k] > pbest_f[gbest]) gbest = k;
    }

    for (std::size_t gen = 0; gen < cfg.max_iterations; ++gen) {
        const std::vector<double> gx = pbest_x[gbest];  // previous generation's global best
        for (std::size_t k = 0; k < lambda; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                vel[k][j] = kInertia * vel[k][j] + kCognitive * r1 * (pbest_x[k][j] - x[k][j]) +
                            kSocial * r2 * (gx[j] - x[k][j]);
                x[k][j] += vel[k][j];
            }
            units[k] = normalize_candidate(x[k], rng);
        }

        fitness = evaluate_generation(f, units, cfg.evaluation);
        trace.evaluations += lambda;
        for (std::size_t k = 0; k < lambda; ++k) {
            best.offer(fitness[k], units[k]);
            if (fitness[k] > pbest_f[k]) {
                pbest_f[k] = fitness[k];
                pbest_x[k] = x[k];
            }
        }
        gbest = 0;
        for (std::size_t k = 1; k < lambda; ++k) {
            if (pbest_f[k] > pbest_f[gbest]) gbest = k;
        }

        trace.fitness_history.push_back(best.fitness);
    }

    trace.best_omega = best.omega;
    trace.best_fitness = best.fitness;
    return trace;
}

}  // namespace

OptimizationTrace maximize(const Objective& objective, std::size_t n, const EAConfig& config) {
    if (!objective) throw std::invalid_argument("maximize: empty objective");
    if (n < 1) throw std::invalid_argument("maximize: dimension must be >= 1");
    if (config.lambda < 2) throw std::invalid_argument("maximize: lambda must be >= 2");
    if (config.mu < 1 || config.mu > config.lambda) {
        throw std::invalid_argument("maximize: mu must satisfy 1 <= mu <= lambda");
    }
    if (config.max_iterations < 1) throw std::invalid_argument("maximize: need >= 1 iteration");
    if (!(config.initial_sigma > 0.0)) {
        throw std::invalid_argument("maximize: initial_sigma must be > 0");
    }
    switch (config.backend) {
        case Backend::cmaes:
            return cmaes_maximize(objective, n, config);
        case Backend::es:
            return es_maximize(objective, n, config);
        case Backend::pso:
            return pso_maximize(objective, n, config);
    }
    throw std::logic_error("maximize: unreachable backend");
}

}  // namespace oec
