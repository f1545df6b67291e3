#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfe/embedding.hpp"
#include "dfe/frontier.hpp"
#include "dfe/generator.hpp"
#include "dfe/knn.hpp"
#include "dfe/random.hpp"

namespace dfe {

/// Gaussian maximum-likelihood fit with unbiased covariance and a small
/// diagonal jitter when the spectrum degenerates.
struct GaussianFit {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double jitter = 0.0;

    // cached for density evaluation and sampling
    Eigen::MatrixXd chol_lower;
    double log_norm = 0.0;  // -0.5 log det(2 pi Sigma)

    double log_density(const Eigen::VectorXd& z) const {
        const Eigen::VectorXd u =
            chol_lower.triangularView<Eigen::Lower>().solve(z - mean);
        return log_norm - 0.5 * u.squaredNorm();
    }

    Eigen::VectorXd sample(Rng& rng) const {
        Eigen::VectorXd xi(mean.size());
        for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
        return mean + chol_lower * xi;
    }
};

inline GaussianFit fit_gaussian(const EmbeddingSet& X) {
    if (X.rows < 2) throw std::invalid_argument("fit_gaussian: need at least two rows");
    const std::size_t n = X.rows, d = X.dim;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        M(X.data.data(), n, d);
    GaussianFit fit;
    fit.mean = M.colwise().mean().transpose();
    Eigen::MatrixXd centered = M.rowwise() - fit.mean.transpose();
    fit.covariance = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fit.covariance);
    if (es.eigenvalues().minCoeff() < 1e-10) {
        fit.jitter = 1e-8 * fit.covariance.trace() / static_cast<double>(d);
        if (fit.jitter <= 0.0) fit.jitter = 1e-12;
        fit.covariance.diagonal().array() += fit.jitter;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(fit.covariance);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("fit_gaussian: covariance not positive definite");
    fit.chol_lower = llt.matrixL();
    double log_det = 0.0;
    for (std::size_t i = 0; i < d; ++i) log_det += std::log(fit.chol_lower(i, i));
    fit.log_norm = -0.5 * static_cast<double>(d) * std::log(2.0 * M_PI) - log_det;
    return fit;
}

/// Monte-Carlo D_f(A || B): z_b ~ B, average f(phi_A(z)/phi_B(z)) with the
/// ratio formed in log space. Clamped at zero.
inline double gaussian_f_divergence_mc(const GaussianFit& A, const GaussianFit& B,
                                       const DivergenceGenerator& f, std::size_t num_samples,
                                       std::uint64_t seed) {
    if (num_samples < 1)
        throw std::invalid_argument("gaussian_f_divergence_mc: num_samples must be >= 1");
    Rng rng(seed);
    double s = 0.0;
    for (std::size_t b = 0; b < num_samples; ++b) {
        const Eigen::VectorXd z = B.sample(rng);
        s += f.eval(std::exp(A.log_density(z) - B.log_density(z)));
    }
    return std::max(0.0, s / static_cast<double>(num_samples));
}

namespace detail {

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// E_{R_lam}[f(phi_T(z)/phi_R(z))] for target T in {A, B}, with z drawn from
/// the two-component mixture itself and the mixture density formed by
/// log-sum-exp. Returns the clamped mean and its MC standard error.
inline std::pair<McEstimate, McEstimate> mixture_divergences_mc(
    const GaussianFit& A, const GaussianFit& B, const DivergenceGenerator& f, double lam,
    std::size_t num_samples, Rng& rng) {
    double sa = 0.0, sa2 = 0.0, sb = 0.0, sb2 = 0.0;
    for (std::size_t t = 0; t < num_samples; ++t) {
        const bool from_a = rng.uniform() < lam;
        const Eigen::VectorXd z = from_a ? A.sample(rng) : B.sample(rng);
        const double la = A.log_density(z), lb = B.log_density(z);
        const double hi = std::max(la + std::log(lam), lb + std::log1p(-lam));
        const double lr = hi + std::log(std::exp(la + std::log(lam) - hi) +
                                        std::exp(lb + std::log1p(-lam) - hi));
        const double va = f.eval(std::exp(la - lr));
        const double vb = f.eval(std::exp(lb - lr));
        sa += va;
        sa2 += va * va;
        sb += vb;
        sb2 += vb * vb;
    }
    const double n = static_cast<double>(num_samples);
    auto pack = [&](double s, double s2) {
        McEstimate e;
        e.value = std::max(0.0, s / n);
        e.stderr_ = std::sqrt(std::max(0.0, s2 / n - (s / n) * (s / n)) / n);
        return e;
    };
    return {pack(sa, sa2), pack(sb, sb2)};
}

}  // namespace detail

/// Frontier and summaries under the Gaussian approximation. Coordinates are
/// MC expectations against the exact mixture R_lam; non-monotone x(lam)
/// beyond 2 MC standard errors raises a warning instead of isotonizing.
inline ScoreReport gaussian_scores(const EmbeddingSet& X, const EmbeddingSet& Y,
                                   const DivergenceGenerator& f, int pca_dims,
                                   std::size_t num_samples, double c, int grid_size,
                                   std::uint64_t seed, FrontierCurve* curve_out = nullptr) {
    if (grid_size < 2) throw std::invalid_argument("gaussian_scores: grid_size must be >= 2");
    EmbeddingSet joint = vconcat(X, Y);
    const int dims =
        std::min<int>(pca_dims, static_cast<int>(std::min(joint.rows, joint.dim)));
    if (static_cast<std::size_t>(dims) < joint.dim) joint = pca_reduce(joint, dims);
    const EmbeddingSet Xr(std::vector<double>(joint.data.begin(),
                                              joint.data.begin() + X.rows * joint.dim),
                          X.rows, joint.dim);
    const EmbeddingSet Yr(std::vector<double>(joint.data.begin() + X.rows * joint.dim,
                                              joint.data.end()),
                          Y.rows, joint.dim);
    const GaussianFit A = fit_gaussian(Xr);
    const GaussianFit B = fit_gaussian(Yr);

    const Rng base(seed);
    FrontierCurve curve;
    curve.grid_size = grid_size;
    std::vector<double> xerr;
    for (int i = 1; i < grid_size; ++i) {
        const double lam = static_cast<double>(i) / grid_size;
        Rng rng = base.derive(static_cast<std::uint64_t>(i));
        auto [ex, ey] = detail::mixture_divergences_mc(A, B, f, lam, num_samples, rng);
        curve.points.push_back({lam, ex.value, ey.value});
        xerr.push_back(ex.stderr_);
    }

    double mid;
    if (grid_size % 2 == 0) {
        const auto& p = curve.points[grid_size / 2 - 1];
        mid = 0.5 * p.x + 0.5 * p.y;
    } else {
        Rng rng = base.derive(static_cast<std::uint64_t>(grid_size) + 1);
        auto [ex, ey] = detail::mixture_divergences_mc(A, B, f, 0.5, num_samples, rng);
        mid = 0.5 * ex.value + 0.5 * ey.value;
    }

    ScoreReport report;
    report.mauve = mauve_score(curve, c);
    report.fi = frontier_integral(curve);
    report.mid = mid;
    report.scale_c = c;
    report.generator = f.name;
    report.estimator = "gaussian(pca=" + std::to_string(dims) +
                       ",mc=" + std::to_string(num_samples) + ")";
    report.seed = seed;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const double rise = curve.points[i].x - curve.points[i - 1].x;
        if (rise > 2.0 * (xerr[i] + xerr[i - 1])) {
            report.warnings.push_back("non_monotone_frontier at lambda=" +
                                      std::to_string(curve.points[i].lambda));
            break;
        }
    }
    if (curve_out) *curve_out = std::move(curve);
    return report;
}

}  // namespace dfe
