#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfe/divergence.hpp"
#include "dfe/generator.hpp"
#include "dfe/histogram.hpp"

namespace dfe {

struct FrontierPoint {
    double lambda;
    double x;  // D_f(P || R_lambda)
    double y;  // D_f(Q || R_lambda)
};

/// Discretized divergence frontier over the uniform grid {1/N, ..., (N-1)/N}.
struct FrontierCurve {
    std::vector<FrontierPoint> points;
    int grid_size = 0;
};

/// Scalar summaries with the configuration that produced them.
struct ScoreReport {
    double mauve = 0.0;
    double fi = 0.0;
    double mid = 0.0;
    double scale_c = 0.0;
    std::string generator;
    std::string estimator;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

inline FrontierCurve build_frontier(const Histogram& P, const Histogram& Q,
                                    const DivergenceGenerator& f, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("build_frontier: grid_size must be >= 2");
    if (P.bins() != Q.bins()) throw std::invalid_argument("build_frontier: bin counts differ");
    if (std::isinf(f.f_at_zero))
        throw std::invalid_argument("build_frontier: generator must have finite f(0)");
    FrontierCurve curve;
    curve.grid_size = grid_size;
    curve.points.reserve(grid_size - 1);
    for (int i = 1; i < grid_size; ++i) {
        const double lam = static_cast<double>(i) / grid_size;
        const Histogram R = mix(lam, P, Q);
        curve.points.push_back({lam, f_divergence(P, R, f), f_divergence(Q, R, f)});
    }
    return curve;
}

/// Area under {(e^{-cx}, e^{-cy})} with endpoints (1,0) and (0,1) appended.
/// exp(-c * inf) contributes 0 by IEEE semantics, as required.
inline double mauve_score(const FrontierCurve& curve, double c) {
    if (c <= 0.0) throw std::invalid_argument("mauve_score: c must be positive");
    // an empty interior curve degenerates to the single endpoint trapezoid
    std::vector<std::pair<double, double>> pts;
    pts.reserve(curve.points.size() + 2);
    for (const auto& p : curve.points)
        pts.emplace_back(std::exp(-c * p.x), std::exp(-c * p.y));
    pts.emplace_back(1.0, 0.0);
    pts.emplace_back(0.0, 1.0);
    std::sort(pts.begin(), pts.end());
    // collapse duplicate abscissae, keeping the max ordinate
    std::vector<std::pair<double, double>> uniq;
    for (const auto& p : pts) {
        if (!uniq.empty() && uniq.back().first == p.first)
            uniq.back().second = std::max(uniq.back().second, p.second);
        else
            uniq.push_back(p);
    }
    double area = 0.0;
    for (std::size_t i = 1; i < uniq.size(); ++i)
        area += (uniq[i].first - uniq[i - 1].first) * 0.5 *
                (uniq[i].second + uniq[i - 1].second);
    return area;
}

/// 2 * trapezoidal integral of lambda x(lambda) + (1-lambda) y(lambda) over
/// the grid, with the endpoint values taken as their (zero) limits.
inline double frontier_integral(const FrontierCurve& curve) {
    if (curve.points.empty()) throw std::invalid_argument("frontier_integral: empty curve");
    const int N = curve.grid_size;
    double integral = 0.0;
    double prev = 0.0;  // value at lambda = 0
    for (int i = 0; i < N; ++i) {
        double cur;
        if (i < N - 1) {
            const auto& p = curve.points[i];
            cur = p.lambda * p.x + (1.0 - p.lambda) * p.y;
        } else {
            cur = 0.0;  // value at lambda = 1
        }
        integral += 0.5 * (prev + cur) / N;
        prev = cur;
    }
    return 2.0 * integral;
}

enum class FiMode { closed_form, quadrature };

/// Frontier integral of the f-divergence frontier. Closed form is available
/// for the KL and chi^2 base generators; quadrature works for any generator
/// with f(0) finite.
inline double frontier_integral(const Histogram& P, const Histogram& Q,
                                const DivergenceGenerator& f, FiMode mode,
                                int grid_size = 2000) {
    if (mode == FiMode::closed_form) {
        DivergenceGenerator tilde;
        if (f.name == "kl")
            tilde = make_generator("fi_kl");
        else if (f.name == "chi2")
            tilde = make_generator("fi_chi2");
        else
            throw std::invalid_argument(
                "frontier_integral: closed form only for kl and chi2, got " + f.name);
        return f_divergence(P, Q, tilde);
    }
    return frontier_integral(build_frontier(P, Q, f, grid_size));
}

/// Mid-point summary: (1/2) D_f(P || R_1/2) + (1/2) D_f(Q || R_1/2).
inline double midpoint_score(const Histogram& P, const Histogram& Q,
                             const DivergenceGenerator& f) {
    const Histogram R = mix(0.5, P, Q);
    return 0.5 * f_divergence(P, R, f) + 0.5 * f_divergence(Q, R, f);
}

}  // namespace dfe
