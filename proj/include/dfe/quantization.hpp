#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfe/divergence.hpp"
#include "dfe/embedding.hpp"
#include "dfe/frontier.hpp"
#include "dfe/histogram.hpp"
#include "dfe/kmeans.hpp"
#include "dfe/random.hpp"

namespace dfe {

enum class Smoothing { none, laplace, krichevsky_trofimov, braess_sauer, good_turing };

inline Smoothing smoothing_from_string(const std::string& s) {
    if (s == "none") return Smoothing::none;
    if (s == "laplace") return Smoothing::laplace;
    if (s == "kt" || s == "krichevsky_trofimov") return Smoothing::krichevsky_trofimov;
    if (s == "braess_sauer") return Smoothing::braess_sauer;
    if (s == "good_turing") return Smoothing::good_turing;
    throw std::invalid_argument("unknown smoothing scheme '" + s + "'");
}

inline std::string to_string(Smoothing s) {
    switch (s) {
        case Smoothing::none: return "none";
        case Smoothing::laplace: return "laplace";
        case Smoothing::krichevsky_trofimov: return "kt";
        case Smoothing::braess_sauer: return "braess_sauer";
        case Smoothing::good_turing: return "good_turing";
    }
    return "?";
}

/// Turn raw bin counts into a probability vector under the chosen smoothing.
/// Add-b schemes use (count_l + b_l) / (n + sum b_l); Good-Turing follows the
/// modified rule with phi_0 = number of unseen bins.
inline Histogram smooth_counts(const std::vector<std::uint64_t>& counts, Smoothing scheme) {
    const std::size_t k = counts.size();
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    std::vector<double> probs(k);
    switch (scheme) {
        case Smoothing::none: {
            if (n == 0) throw std::invalid_argument("smooth_counts: empty sample");
            for (std::size_t l = 0; l < k; ++l)
                probs[l] = static_cast<double>(counts[l]) / static_cast<double>(n);
            break;
        }
        case Smoothing::laplace:
        case Smoothing::krichevsky_trofimov: {
            const double b = scheme == Smoothing::laplace ? 1.0 : 0.5;
            const double denom = static_cast<double>(n) + b * static_cast<double>(k);
            for (std::size_t l = 0; l < k; ++l)
                probs[l] = (static_cast<double>(counts[l]) + b) / denom;
            break;
        }
        case Smoothing::braess_sauer: {
            double total = 0.0;
            for (std::size_t l = 0; l < k; ++l) {
                const double b = counts[l] == 0 ? 0.5 : (counts[l] == 1 ? 1.0 : 0.75);
                probs[l] = static_cast<double>(counts[l]) + b;
                total += probs[l];
            }
            for (double& p : probs) p /= total;
            break;
        }
        case Smoothing::good_turing: {
            // phi[t] = number of bins appearing exactly t times; phi[0] counts
            // the unseen bins.
            std::vector<std::uint64_t> phi(static_cast<std::size_t>(n) + 2, 0);
            for (auto c : counts) ++phi[c];
            double total = 0.0;
            for (std::size_t l = 0; l < k; ++l) {
                const std::uint64_t nl = counts[l];
                const std::uint64_t phi_next = phi[nl + 1];
                double w;
                if (nl > phi_next) {
                    w = static_cast<double>(nl);
                } else {
                    w = static_cast<double>(phi_next + 1) * static_cast<double>(nl + 1) /
                        static_cast<double>(phi[nl]);
                }
                probs[l] = w;
                total += w;
            }
            if (total <= 0.0) throw std::invalid_argument("smooth_counts: degenerate sample");
            for (double& p : probs) p /= total;
            break;
        }
    }
    return Histogram(std::move(probs));
}

/// Cluster-assignment counts for one embedding set under a fitted model.
inline std::vector<std::uint64_t> assignment_counts(const QuantizationModel& model,
                                                    const EmbeddingSet& X) {
    if (X.dim != model.dim) throw std::invalid_argument("assignment_counts: dim mismatch");
    std::vector<std::uint64_t> counts(model.k, 0);
    for (std::size_t i = 0; i < X.rows; ++i) ++counts[nearest_center(model, X.row(i))];
    return counts;
}

inline std::pair<Histogram, Histogram> assign_and_count(const QuantizationModel& model,
                                                        const EmbeddingSet& X,
                                                        const EmbeddingSet& Y,
                                                        Smoothing smoothing) {
    return {smooth_counts(assignment_counts(model, X), smoothing),
            smooth_counts(assignment_counts(model, Y), smoothing)};
}

/// Fraction of bins left empty by either sample, reported as a warning input.
inline double empty_bin_fraction(const std::vector<std::uint64_t>& cx,
                                 const std::vector<std::uint64_t>& cy) {
    std::size_t empty = 0;
    for (std::size_t l = 0; l < cx.size(); ++l)
        if (cx[l] == 0 || cy[l] == 0) ++empty;
    return static_cast<double>(empty) / static_cast<double>(cx.size());
}

/// End-to-end vector-quantization pipeline: joint k-means, smoothed
/// histograms, frontier, and the three summaries.
inline ScoreReport quantized_scores(const EmbeddingSet& X, const EmbeddingSet& Y,
                                    const DivergenceGenerator& f, std::size_t k,
                                    Smoothing smoothing, double c, int grid_size,
                                    std::uint64_t seed, int max_iters = 100,
                                    FrontierCurve* curve_out = nullptr) {
    const EmbeddingSet joint = vconcat(X, Y);
    const QuantizationModel model = kmeans_fit(joint, k, seed, max_iters);
    const auto cx = assignment_counts(model, X);
    const auto cy = assignment_counts(model, Y);
    const Histogram P = smooth_counts(cx, smoothing);
    const Histogram Q = smooth_counts(cy, smoothing);
    const FrontierCurve curve = build_frontier(P, Q, f, grid_size);

    ScoreReport report;
    report.mauve = mauve_score(curve, c);
    report.fi = f.name == "kl" || f.name == "chi2"
                    ? frontier_integral(P, Q, f, FiMode::closed_form)
                    : frontier_integral(curve);
    report.mid = midpoint_score(P, Q, f);
    report.scale_c = c;
    report.generator = f.name;
    report.estimator = "quantize(k=" + std::to_string(k) + ",smoothing=" + to_string(smoothing) +
                       ")";
    report.seed = seed;
    const double frac = empty_bin_fraction(cx, cy);
    if (frac > 0.0)
        report.warnings.push_back("empty_bins_fraction=" + std::to_string(frac));
    if (curve_out) *curve_out = curve;
    return report;
}

/// Oracle level-set partition: bins with p <= q are grouped by the level of
/// f(p/q) in [0, f(0)], bins with p > q by the level of f*(q/p) in
/// [0, f*(0)], k thresholds each (at most 2k groups). Requires finite f(0)
/// and f*(0).
inline std::vector<int> oracle_level_set_partition(const Histogram& P, const Histogram& Q,
                                                   const DivergenceGenerator& f, int k) {
    if (k < 1) throw std::invalid_argument("oracle_level_set_partition: k must be >= 1");
    if (P.bins() != Q.bins())
        throw std::invalid_argument("oracle_level_set_partition: bin counts differ");
    if (std::isinf(f.f_at_zero) || std::isinf(f.fstar_at_zero))
        throw std::invalid_argument(
            "oracle_level_set_partition: generator must have finite f(0) and f*(0)");
    std::vector<int> group(P.bins());
    const DivergenceGenerator fstar = conjugate(f);
    for (std::size_t l = 0; l < P.bins(); ++l) {
        const double p = P[l], q = Q[l];
        double level;
        int offset;
        if (p <= q) {
            level = q == 0.0 ? 0.0 : (p == 0.0 ? f.f_at_zero : f.eval(p / q));
            level /= f.f_at_zero > 0 ? f.f_at_zero : 1.0;
            offset = 0;
        } else {
            level = p == 0.0 ? 0.0 : (q == 0.0 ? f.fstar_at_zero : fstar.eval(q / p));
            level /= f.fstar_at_zero > 0 ? f.fstar_at_zero : 1.0;
            offset = k;
        }
        int idx = static_cast<int>(level * k);
        idx = std::clamp(idx, 0, k - 1);
        group[l] = offset + idx;
    }
    return group;
}

/// Merge histogram mass by group id (group ids need not be contiguous).
inline std::pair<Histogram, Histogram> merge_by_group(const Histogram& P, const Histogram& Q,
                                                      const std::vector<int>& group) {
    const int gmax = *std::max_element(group.begin(), group.end());
    std::vector<double> p(gmax + 1, 0.0), q(gmax + 1, 0.0);
    for (std::size_t l = 0; l < P.bins(); ++l) {
        p[group[l]] += P[l];
        q[group[l]] += Q[l];
    }
    return {Histogram(std::move(p)), Histogram(std::move(q))};
}

/// alpha_n(P) = sum_l sqrt(P_l / n), the statistical-error diagnostic.
inline double alpha_n(const Histogram& P, std::uint64_t n) {
    if (n < 1) throw std::invalid_argument("alpha_n: n must be >= 1");
    double s = 0.0;
    for (double p : P.probs()) s += std::sqrt(p / static_cast<double>(n));
    return s;
}

/// Monte-Carlo estimate of beta_n(P) = E[ sum_{l: count_l = 0}
/// P_l max(1, log(1/P_l)) ], the expected weighted missing mass.
inline double beta_n_mc(const Histogram& P, std::uint64_t n, int reps, std::uint64_t seed) {
    if (n < 1 || reps < 1) throw std::invalid_argument("beta_n_mc: n and reps must be >= 1");
    Rng base(seed);
    double total = 0.0;
    for (int r = 0; r < reps; ++r) {
        Rng rng = base.derive(static_cast<std::uint64_t>(r));
        const auto counts = rng.multinomial(n, P.probs());
        double miss = 0.0;
        for (std::size_t l = 0; l < P.bins(); ++l)
            if (counts[l] == 0 && P[l] > 0.0)
                miss += P[l] * std::max(1.0, std::log(1.0 / P[l]));
        total += miss;
    }
    return total / reps;
}

}  // namespace dfe
