#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dfe/embedding.hpp"
#include "dfe/random.hpp"

namespace dfe {

struct QuantizationModel {
    std::vector<double> centers;  // k x d row-major
    std::size_t k = 0;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    int iterations_run = 0;
    double sse = 0.0;

    std::span<const double> center(std::size_t l) const {
        return std::span<const double>(centers.data() + l * dim, dim);
    }
};

/// Nearest-center index; ties broken toward the lowest center index.
inline std::size_t nearest_center(const QuantizationModel& m, std::span<const double> x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < m.k; ++l) {
        const double d = squared_distance(x, m.center(l));
        if (d < best_d) {
            best_d = d;
            best = l;
        }
    }
    return best;
}

namespace detail {

struct LloydRun {
    std::vector<double> centers;
    int iterations = 0;
    double sse = 0.0;
};

inline LloydRun lloyd(const EmbeddingSet& X, std::size_t k, Rng& rng, int max_iters) {
    const std::size_t n = X.rows, d = X.dim;
    // k-means++ seeding with the supplied RNG
    std::vector<double> centers(k * d);
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    std::size_t first = static_cast<std::size_t>(rng.below(n));
    std::copy_n(X.data.begin() + first * d, d, centers.begin());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        std::span<const double> prev(centers.data() + (c - 1) * d, d);
        for (std::size_t i = 0; i < n; ++i) {
            dist2[i] = std::min(dist2[i], squared_distance(X.row(i), prev));
            total += dist2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += dist2[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.below(n));
        }
        std::copy_n(X.data.begin() + pick * d, d, centers.begin() + c * d);
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> sums(k * d);
    std::vector<std::size_t> counts(k);
    int iter = 0;
    double sse = 0.0;
    for (; iter < max_iters; ++iter) {
        bool changed = false;
        sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < k; ++l) {
                const double dd =
                    squared_distance(X.row(i), std::span<const double>(centers.data() + l * d, d));
                if (dd < best_d) {
                    best_d = dd;
                    best = l;
                }
            }
            sse += best_d;
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            counts[assign[i]]++;
            for (std::size_t j = 0; j < d; ++j) sums[assign[i] * d + j] += X.at(i, j);
        }
        for (std::size_t l = 0; l < k; ++l) {
            if (counts[l] == 0) continue;  // empty cluster keeps its center
            for (std::size_t j = 0; j < d; ++j)
                centers[l * d + j] = sums[l * d + j] / static_cast<double>(counts[l]);
        }
    }
    return {std::move(centers), iter, sse};
}

}  // namespace detail

/// Lloyd's algorithm with k-means++ seeding, restarted `n_init` times from
/// derived seeds; the run with the lowest SSE wins. Deterministic given
/// (inputs, seed, k, max_iters, n_init).
inline QuantizationModel kmeans_fit(const EmbeddingSet& joint, std::size_t k,
                                    std::uint64_t seed, int max_iters, int n_init = 10) {
    if (k < 1) throw std::invalid_argument("kmeans_fit: k must be >= 1");
    if (k > joint.rows) throw std::invalid_argument("kmeans_fit: k exceeds sample count");
    if (max_iters < 1) throw std::invalid_argument("kmeans_fit: max_iters must be >= 1");
    const Rng base(seed);
    detail::LloydRun best;
    best.sse = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n_init; ++r) {
        Rng rng = base.derive(static_cast<std::uint64_t>(r));
        detail::LloydRun run = detail::lloyd(joint, k, rng, max_iters);
        if (run.sse < best.sse) best = std::move(run);
    }
    QuantizationModel model;
    model.centers = std::move(best.centers);
    model.k = k;
    model.dim = joint.dim;
    model.seed = seed;
    model.iterations_run = best.iterations;
    model.sse = best.sse;
    return model;
}

}  // namespace dfe
