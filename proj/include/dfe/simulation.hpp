#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfe/frontier.hpp"
#include "dfe/histogram.hpp"
#include "dfe/quantization.hpp"
#include "dfe/random.hpp"

namespace dfe {

struct SyntheticSpec {
    enum class Family { zipf, dirichlet };
    Family family = Family::zipf;
    double param = 0.0;  // zipf exponent r, or dirichlet concentration alpha
    std::size_t k = 0;
    std::uint64_t seed = 0;
};

inline SyntheticSpec parse_synthetic_spec(const std::string& text, std::size_t k,
                                          std::uint64_t seed) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("synthetic spec must look like zipf:R or dirichlet:A");
    SyntheticSpec spec;
    const std::string family = text.substr(0, colon);
    spec.param = std::stod(text.substr(colon + 1));
    spec.k = k;
    spec.seed = seed;
    if (family == "zipf")
        spec.family = SyntheticSpec::Family::zipf;
    else if (family == "dirichlet")
        spec.family = SyntheticSpec::Family::dirichlet;
    else
        throw std::invalid_argument("unknown synthetic family '" + family + "'");
    return spec;
}

/// zipf(r): P_l proportional to l^{-r} over l in 1..k (deterministic);
/// dirichlet(alpha): one seeded draw from the symmetric Dirichlet.
inline Histogram make_distribution(const SyntheticSpec& spec) {
    if (spec.k < 1) throw std::invalid_argument("make_distribution: k must be >= 1");
    std::vector<double> probs(spec.k);
    switch (spec.family) {
        case SyntheticSpec::Family::zipf: {
            if (spec.param < 0.0)
                throw std::invalid_argument("make_distribution: zipf exponent must be >= 0");
            double total = 0.0;
            for (std::size_t l = 0; l < spec.k; ++l) {
                probs[l] = std::pow(static_cast<double>(l + 1), -spec.param);
                total += probs[l];
            }
            for (double& p : probs) p /= total;
            break;
        }
        case SyntheticSpec::Family::dirichlet: {
            if (spec.param <= 0.0)
                throw std::invalid_argument("make_distribution: alpha must be positive");
            Rng rng(spec.seed);
            double total = 0.0;
            for (std::size_t l = 0; l < spec.k; ++l) {
                probs[l] = rng.gamma(spec.param);
                total += probs[l];
            }
            for (double& p : probs) p /= total;
            break;
        }
    }
    return Histogram(std::move(probs));
}

struct ErrorStudyRow {
    Smoothing smoothing;
    std::uint64_t n = 0;
    double mean_abs_err = 0.0;
    double std_err = 0.0;
    std::vector<double> errors;  // per replication, paired across estimators
};

/// Statistical-error study: per (smoothing scheme, sample size), the mean
/// absolute deviation of the estimated frontier integral from its exact
/// value, over `reps` paired multinomial draws.
inline std::vector<ErrorStudyRow> error_study(const Histogram& P, const Histogram& Q,
                                              const std::vector<Smoothing>& estimators,
                                              const std::vector<std::uint64_t>& n_grid,
                                              int reps, std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("error_study: reps must be >= 1");
    if (estimators.empty() || n_grid.empty())
        throw std::invalid_argument("error_study: estimators and n_grid must be nonempty");
    const DivergenceGenerator kl = make_generator("kl");
    const double truth = frontier_integral(P, Q, kl, FiMode::closed_form);

    std::vector<ErrorStudyRow> rows;
    rows.reserve(estimators.size() * n_grid.size());
    for (Smoothing s : estimators)
        for (std::uint64_t n : n_grid) rows.push_back({s, n, 0.0, 0.0, {}});
    for (auto& row : rows) row.errors.reserve(reps);

    const Rng base(seed);
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        const std::uint64_t n = n_grid[ni];
        for (int r = 0; r < reps; ++r) {
            // one paired draw per (n, rep), shared by every smoothing scheme
            Rng rng = base.derive(ni * 1000003ULL + static_cast<std::uint64_t>(r));
            const auto counts_p = rng.multinomial(n, P.probs());
            const auto counts_q = rng.multinomial(n, Q.probs());
            for (std::size_t ei = 0; ei < estimators.size(); ++ei) {
                const Histogram Ph = smooth_counts(counts_p, estimators[ei]);
                const Histogram Qh = smooth_counts(counts_q, estimators[ei]);
                const double fi = frontier_integral(Ph, Qh, kl, FiMode::closed_form);
                rows[ei * n_grid.size() + ni].errors.push_back(std::abs(fi - truth));
            }
        }
    }
    for (auto& row : rows) {
        double s = 0.0;
        for (double e : row.errors) s += e;
        row.mean_abs_err = s / reps;
        double v = 0.0;
        for (double e : row.errors) v += (e - row.mean_abs_err) * (e - row.mean_abs_err);
        row.std_err = reps > 1 ? std::sqrt(v / (reps - 1) / reps) : 0.0;
    }
    return rows;
}

}  // namespace dfe
