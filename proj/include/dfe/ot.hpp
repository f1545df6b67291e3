#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dfe/embedding.hpp"
#include "dfe/frontier.hpp"
#include "dfe/histogram.hpp"
#include "dfe/kmeans.hpp"

namespace dfe {

/// Pairwise squared-distance cost between cluster centers.
struct CostMatrix {
    std::vector<double> entries;  // k x k row-major
    std::size_t k = 0;

    CostMatrix() = default;
    CostMatrix(std::vector<double> e, std::size_t kk) : entries(std::move(e)), k(kk) {
        validate();
    }

    double at(std::size_t i, std::size_t j) const { return entries[i * k + j]; }

    void validate() const {
        if (k < 1 || entries.size() != k * k)
            throw std::invalid_argument("CostMatrix: size mismatch");
        for (std::size_t i = 0; i < k; ++i) {
            if (at(i, i) != 0.0) throw std::invalid_argument("CostMatrix: nonzero diagonal");
            for (std::size_t j = 0; j < k; ++j) {
                if (at(i, j) < 0.0) throw std::invalid_argument("CostMatrix: negative entry");
                if (std::abs(at(i, j) - at(j, i)) > 1e-12 * std::max(1.0, at(i, j)))
                    throw std::invalid_argument("CostMatrix: asymmetric");
            }
        }
    }
};

inline CostMatrix cost_from_centers(const QuantizationModel& model) {
    std::vector<double> e(model.k * model.k, 0.0);
    for (std::size_t i = 0; i < model.k; ++i)
        for (std::size_t j = i + 1; j < model.k; ++j) {
            const double d = squared_distance(model.center(i), model.center(j));
            e[i * model.k + j] = d;
            e[j * model.k + i] = d;
        }
    return CostMatrix(std::move(e), model.k);
}

/// Median off-diagonal cost times 0.05.
inline double default_epsilon(const CostMatrix& C) {
    std::vector<double> off;
    off.reserve(C.k * (C.k - 1));
    for (std::size_t i = 0; i < C.k; ++i)
        for (std::size_t j = 0; j < C.k; ++j)
            if (i != j) off.push_back(C.at(i, j));
    if (off.empty()) return 1e-3;
    std::nth_element(off.begin(), off.begin() + off.size() / 2, off.end());
    const double med = off[off.size() / 2];
    return med > 0.0 ? 0.05 * med : 1e-3;
}

struct SinkhornResult {
    double cost = 0.0;              // <pi, C> of the regularized plan
    bool converged = false;
    double marginal_violation = 0.0;  // L1 over both marginals
    int iterations = 0;
};

/// Log-domain Sinkhorn with epsilon scaling. Bins with zero marginal mass
/// are dropped before iterating and contribute zero plan rows/columns.
inline SinkhornResult sinkhorn_ot(const Histogram& P, const Histogram& Q, const CostMatrix& C,
                                  double epsilon, int max_iters = 20000, double tol = 1e-9) {
    if (epsilon <= 0.0) throw std::invalid_argument("sinkhorn_ot: epsilon must be positive");
    if (max_iters < 1 || tol <= 0.0)
        throw std::invalid_argument("sinkhorn_ot: max_iters and tol must be positive");
    if (P.bins() != C.k || Q.bins() != C.k)
        throw std::invalid_argument("sinkhorn_ot: histogram/cost size mismatch");

    std::vector<std::size_t> I, J;
    for (std::size_t i = 0; i < C.k; ++i)
        if (P[i] > 0.0) I.push_back(i);
    for (std::size_t j = 0; j < C.k; ++j)
        if (Q[j] > 0.0) J.push_back(j);
    const std::size_t nr = I.size(), nc = J.size();

    std::vector<double> cost(nr * nc), log_p(nr), log_q(nc);
    double cmax = 0.0;
    for (std::size_t a = 0; a < nr; ++a)
        for (std::size_t b = 0; b < nc; ++b) {
            cost[a * nc + b] = C.at(I[a], J[b]);
            cmax = std::max(cmax, cost[a * nc + b]);
        }
    for (std::size_t a = 0; a < nr; ++a) log_p[a] = std::log(P[I[a]]);
    for (std::size_t b = 0; b < nc; ++b) log_q[b] = std::log(Q[J[b]]);

    std::vector<double> f(nr, 0.0), g(nc, 0.0), scratch(std::max(nr, nc));
    auto lse = [&](std::size_t count) {
        double hi = scratch[0];
        for (std::size_t t = 1; t < count; ++t) hi = std::max(hi, scratch[t]);
        double s = 0.0;
        for (std::size_t t = 0; t < count; ++t) s += std::exp(scratch[t] - hi);
        return hi + std::log(s);
    };

    // epsilon-scaling schedule from a loose start down to the target
    std::vector<double> schedule;
    double e = std::max(epsilon, cmax > 0.0 ? 0.1 * cmax : epsilon);
    while (e > epsilon * 1.0001) {
        schedule.push_back(e);
        e *= 0.2;
    }
    schedule.push_back(epsilon);

    SinkhornResult result;
    int total_iters = 0;
    for (std::size_t s = 0; s < schedule.size(); ++s) {
        const double eps = schedule[s];
        const bool final_stage = s + 1 == schedule.size();
        const double stage_tol = final_stage ? tol : 1e-3;
        for (int it = 0; it < max_iters; ++it) {
            ++total_iters;
            for (std::size_t a = 0; a < nr; ++a) {
                for (std::size_t b = 0; b < nc; ++b)
                    scratch[b] = (g[b] - cost[a * nc + b]) / eps;
                f[a] = eps * (log_p[a] - lse(nc));
            }
            for (std::size_t b = 0; b < nc; ++b) {
                for (std::size_t a = 0; a < nr; ++a)
                    scratch[a] = (f[a] - cost[a * nc + b]) / eps;
                g[b] = eps * (log_q[b] - lse(nr));
            }
            // columns are exact after the g-update; measure the row residual
            double viol = 0.0;
            for (std::size_t a = 0; a < nr; ++a) {
                double row = 0.0;
                for (std::size_t b = 0; b < nc; ++b)
                    row += std::exp((f[a] + g[b] - cost[a * nc + b]) / eps);
                viol += std::abs(row - std::exp(log_p[a]));
            }
            result.marginal_violation = viol;
            if (viol < stage_tol) break;
        }
        if (final_stage) result.converged = result.marginal_violation < tol;
    }
    result.iterations = total_iters;

    const double eps = epsilon;
    double transport = 0.0;
    for (std::size_t a = 0; a < nr; ++a)
        for (std::size_t b = 0; b < nc; ++b)
            transport +=
                std::exp((f[a] + g[b] - cost[a * nc + b]) / eps) * cost[a * nc + b];
    result.cost = transport;
    return result;
}

/// OT frontier with linear interpolation: per grid lambda, the Sinkhorn
/// costs to the mixture R_lambda on both sides.
inline FrontierCurve ot_frontier_linear(const Histogram& P, const Histogram& Q,
                                        const CostMatrix& C, double epsilon, int grid_size,
                                        int max_iters = 20000, double tol = 1e-9) {
    if (grid_size < 2)
        throw std::invalid_argument("ot_frontier_linear: grid_size must be >= 2");
    FrontierCurve curve;
    curve.grid_size = grid_size;
    for (int i = 1; i < grid_size; ++i) {
        const double lam = static_cast<double>(i) / grid_size;
        const Histogram R = mix(lam, P, Q);
        const SinkhornResult rx = sinkhorn_ot(P, R, C, epsilon, max_iters, tol);
        const SinkhornResult ry = sinkhorn_ot(Q, R, C, epsilon, max_iters, tol);
        curve.points.push_back({lam, rx.cost, ry.cost});
    }
    return curve;
}

}  // namespace dfe
