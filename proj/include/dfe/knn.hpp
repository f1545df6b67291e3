#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfe/embedding.hpp"
#include "dfe/frontier.hpp"
#include "dfe/generator.hpp"
#include "dfe/random.hpp"

namespace dfe {

struct KnnConfig {
    int k_neighbors = 0;   // 0 = ceil(n^{1/3})
    int pca_dims = 25;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Center by the joint mean and project onto the top-`dims` principal
/// directions (descending eigenvalue; sign fixed so the largest-magnitude
/// loading of each component is positive).
inline EmbeddingSet pca_reduce(const EmbeddingSet& joint, int dims) {
    const std::size_t n = joint.rows, d = joint.dim;
    if (dims < 1 || static_cast<std::size_t>(dims) > std::min(n, d))
        throw std::invalid_argument("pca_reduce: dims must be in [1, min(rows, dim)]");
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        X(joint.data.data(), n, d);
    Eigen::RowVectorXd mean = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - mean;
    Eigen::MatrixXd cov = centered.transpose() * centered / std::max<double>(1.0, n - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    // eigenvalues come back ascending; take the top `dims` in descending order
    Eigen::MatrixXd proj(d, dims);
    for (int j = 0; j < dims; ++j) {
        Eigen::VectorXd v = es.eigenvectors().col(d - 1 - j);
        Eigen::Index imax;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0) v = -v;
        proj.col(j) = v;
    }
    Eigen::MatrixXd Y = centered * proj;
    std::vector<double> out(n * dims);
    for (std::size_t i = 0; i < n; ++i)
        for (int j = 0; j < dims; ++j) out[i * dims + j] = Y(i, j);
    return EmbeddingSet(std::move(out), n, dims);
}

namespace detail {

struct NeighborCounts {
    std::vector<int> in_x;  // |N_k(u) ∩ X| per union point
    std::vector<int> in_y;  // |N_k(u) ∩ Y|
};

/// Exact k-NN over the union (X rows first, then Y), excluding the query
/// point itself; distance ties go to the lower row index.
inline NeighborCounts neighbor_counts(const EmbeddingSet& X, const EmbeddingSet& Y, int k) {
    const std::size_t n = X.rows, m = Y.rows, total = n + m;
    if (k < 1 || static_cast<std::size_t>(k) > total - 1)
        throw std::invalid_argument("neighbor_counts: k must be in [1, n+m-1]");
    const EmbeddingSet U = vconcat(X, Y);
    NeighborCounts counts;
    counts.in_x.assign(total, 0);
    counts.in_y.assign(total, 0);
    std::vector<std::pair<double, std::size_t>> order(total - 1);
    for (std::size_t u = 0; u < total; ++u) {
        std::size_t w = 0;
        for (std::size_t v = 0; v < total; ++v) {
            if (v == u) continue;
            order[w++] = {squared_distance(U.row(u), U.row(v)), v};
        }
        std::partial_sort(order.begin(), order.begin() + k, order.end());
        for (int j = 0; j < k; ++j) {
            if (order[j].second < n)
                ++counts.in_x[u];
            else
                ++counts.in_y[u];
        }
    }
    return counts;
}

/// Zero neighbor counts are replaced by 1/2 before forming a ratio.
inline double guarded(int count) { return count > 0 ? count : 0.5; }

}  // namespace detail

/// Likelihood-ratio estimates r̂(u) = (|N_k(u) ∩ X|/n) / (|N_k(u) ∩ Y|/m)
/// over the union (X rows first, then Y rows).
inline std::vector<double> knn_likelihood_ratios(const EmbeddingSet& X, const EmbeddingSet& Y,
                                                 int k) {
    const auto counts = detail::neighbor_counts(X, Y, k);
    const double n = static_cast<double>(X.rows), m = static_cast<double>(Y.rows);
    std::vector<double> ratios(counts.in_x.size());
    for (std::size_t u = 0; u < ratios.size(); ++u)
        ratios[u] = (detail::guarded(counts.in_x[u]) / n) / (detail::guarded(counts.in_y[u]) / m);
    return ratios;
}

/// Frontier and summaries from the k-NN likelihood-ratio estimator. The
/// neighborhoods are computed once; each frontier coordinate applies the
/// interpolated generator to the fixed ratios, clamped at zero.
inline ScoreReport knn_scores(const EmbeddingSet& X, const EmbeddingSet& Y,
                              const DivergenceGenerator& f, const KnnConfig& config, double c,
                              int grid_size, FrontierCurve* curve_out = nullptr) {
    if (grid_size < 2) throw std::invalid_argument("knn_scores: grid_size must be >= 2");
    EmbeddingSet joint = vconcat(X, Y);
    if (config.noise_sigma > 0.0) {
        Rng rng(config.seed);
        for (double& v : joint.data) v += config.noise_sigma * rng.normal();
    }
    const int dims =
        std::min<int>(config.pca_dims, static_cast<int>(std::min(joint.rows, joint.dim)));
    if (static_cast<std::size_t>(dims) < joint.dim) joint = pca_reduce(joint, dims);
    EmbeddingSet Xr(std::vector<double>(joint.data.begin(),
                                        joint.data.begin() + X.rows * joint.dim),
                    X.rows, joint.dim);
    EmbeddingSet Yr(std::vector<double>(joint.data.begin() + X.rows * joint.dim,
                                        joint.data.end()),
                    Y.rows, joint.dim);
    int k = config.k_neighbors;
    if (k <= 0) k = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(X.rows))));
    k = std::min<int>(k, static_cast<int>(X.rows + Y.rows) - 1);

    const auto counts = detail::neighbor_counts(Xr, Yr, k);
    const double n = static_cast<double>(X.rows), m = static_cast<double>(Y.rows);
    // P/Q ratios at Y points, Q/P ratios at X points
    std::vector<double> ratio_y(Y.rows), inv_ratio_x(X.rows);
    for (std::size_t j = 0; j < Y.rows; ++j) {
        const std::size_t u = X.rows + j;
        ratio_y[j] =
            (detail::guarded(counts.in_x[u]) / n) / (detail::guarded(counts.in_y[u]) / m);
    }
    for (std::size_t i = 0; i < X.rows; ++i)
        inv_ratio_x[i] =
            (detail::guarded(counts.in_y[i]) / m) / (detail::guarded(counts.in_x[i]) / n);

    auto clamped_mean = [](const DivergenceGenerator& g, const std::vector<double>& rs) {
        double s = 0.0;
        for (double r : rs) s += g.eval(r);
        return std::max(0.0, s / static_cast<double>(rs.size()));
    };

    FrontierCurve curve;
    curve.grid_size = grid_size;
    for (int i = 1; i < grid_size; ++i) {
        const double lam = static_cast<double>(i) / grid_size;
        const DivergenceGenerator flam = interpolate_generator(f, lam);
        const DivergenceGenerator flam_bar = interpolate_generator(f, 1.0 - lam);
        curve.points.push_back(
            {lam, clamped_mean(flam, ratio_y), clamped_mean(flam_bar, inv_ratio_x)});
    }

    ScoreReport report;
    report.mauve = mauve_score(curve, c);
    report.fi = frontier_integral(curve);
    report.mid = 0.5 * clamped_mean(interpolate_generator(f, 0.5), ratio_y) +
                 0.5 * clamped_mean(interpolate_generator(f, 0.5), inv_ratio_x);
    report.scale_c = c;
    report.generator = f.name;
    report.estimator = "knn(k=" + std::to_string(k) + ",pca=" + std::to_string(dims) + ")";
    report.seed = config.seed;
    if (curve_out) *curve_out = std::move(curve);
    return report;
}

/// Kernel-density likelihood ratios at the Y points: Gaussian-KDE of X over
/// all n points divided by the leave-one-out KDE of Y. Computed in log space.
inline std::vector<double> kde_likelihood_ratios(const EmbeddingSet& X, const EmbeddingSet& Y,
                                                 double bandwidth) {
    if (bandwidth <= 0.0) throw std::invalid_argument("kde_likelihood_ratios: bandwidth <= 0");
    if (Y.rows < 2)
        throw std::invalid_argument("kde_likelihood_ratios: need at least two Y points");
    if (X.dim != Y.dim) throw std::invalid_argument("kde_likelihood_ratios: dim mismatch");
    const double h2 = 2.0 * bandwidth * bandwidth;
    auto log_sum_kernels = [&](const EmbeddingSet& S, std::span<const double> u,
                               std::ptrdiff_t skip) {
        double max_e = -kInf;
        std::vector<double> es;
        es.reserve(S.rows);
        for (std::size_t i = 0; i < S.rows; ++i) {
            if (static_cast<std::ptrdiff_t>(i) == skip) continue;
            const double e = -squared_distance(u, S.row(i)) / h2;
            es.push_back(e);
            max_e = std::max(max_e, e);
        }
        double s = 0.0;
        for (double e : es) s += std::exp(e - max_e);
        return max_e + std::log(s);
    };
    std::vector<double> ratios(Y.rows);
    for (std::size_t j = 0; j < Y.rows; ++j) {
        const double log_num = log_sum_kernels(X, Y.row(j), -1) - std::log(double(X.rows));
        const double log_den =
            log_sum_kernels(Y, Y.row(j), static_cast<std::ptrdiff_t>(j)) -
            std::log(double(Y.rows - 1));
        ratios[j] = std::exp(log_num - log_den);
    }
    return ratios;
}

/// KDE variant of the frontier estimator: ratios at Y points for the P-side
/// coordinate, symmetric ratios at X points for the Q-side.
inline ScoreReport kde_scores(const EmbeddingSet& X, const EmbeddingSet& Y,
                              const DivergenceGenerator& f, double bandwidth, int pca_dims,
                              double c, int grid_size, FrontierCurve* curve_out = nullptr) {
    EmbeddingSet joint = vconcat(X, Y);
    const int dims =
        std::min<int>(pca_dims, static_cast<int>(std::min(joint.rows, joint.dim)));
    if (static_cast<std::size_t>(dims) < joint.dim) joint = pca_reduce(joint, dims);
    EmbeddingSet Xr(std::vector<double>(joint.data.begin(),
                                        joint.data.begin() + X.rows * joint.dim),
                    X.rows, joint.dim);
    EmbeddingSet Yr(std::vector<double>(joint.data.begin() + X.rows * joint.dim,
                                        joint.data.end()),
                    Y.rows, joint.dim);
    const std::vector<double> ratio_y = kde_likelihood_ratios(Xr, Yr, bandwidth);
    std::vector<double> inv_ratio_x = kde_likelihood_ratios(Yr, Xr, bandwidth);

    auto clamped_mean = [](const DivergenceGenerator& g, const std::vector<double>& rs) {
        double s = 0.0;
        for (double r : rs) s += g.eval(r);
        return std::max(0.0, s / static_cast<double>(rs.size()));
    };

    FrontierCurve curve;
    curve.grid_size = grid_size;
    for (int i = 1; i < grid_size; ++i) {
        const double lam = static_cast<double>(i) / grid_size;
        curve.points.push_back({lam, clamped_mean(interpolate_generator(f, lam), ratio_y),
                                clamped_mean(interpolate_generator(f, 1.0 - lam), inv_ratio_x)});
    }
    ScoreReport report;
    report.mauve = mauve_score(curve, c);
    report.fi = frontier_integral(curve);
    report.mid = 0.5 * clamped_mean(interpolate_generator(f, 0.5), ratio_y) +
                 0.5 * clamped_mean(interpolate_generator(f, 0.5), inv_ratio_x);
    report.scale_c = c;
    report.generator = f.name;
    report.estimator = "kde(h=" + std::to_string(bandwidth) + ")";
    if (curve_out) *curve_out = std::move(curve);
    return report;
}

}  // namespace dfe
