#pragma once

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

struct ClassifierConfig {
    double l2_penalty = -1.0;  // < 0 = use 1/n_train
    int max_epochs = 2000;
    double learning_rate = 1.0;  // multiplier on the 1/L smoothness step
    double train_fraction = 0.5;
    std::uint64_t seed = 0;
    int pca_dims = 25;
};

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    bool converged = false;
    double grad_norm = 0.0;
    int epochs_run = 0;
};

namespace detail {

inline double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace detail

/// l2-regularized logistic regression (X labeled +1, Y labeled -1) by
/// deterministic full-batch gradient descent from zero init. The bias is
/// not penalized. Step size is learning_rate / L with L the smoothness
/// constant of the regularized loss.
inline LogisticModel fit_logistic(const EmbeddingSet& Xtrain, const EmbeddingSet& Ytrain,
                                  const ClassifierConfig& config) {
    if (Xtrain.dim != Ytrain.dim) throw std::invalid_argument("fit_logistic: dim mismatch");
    if (config.max_epochs < 1) throw std::invalid_argument("fit_logistic: max_epochs < 1");
    if (config.learning_rate <= 0.0)
        throw std::invalid_argument("fit_logistic: learning_rate must be positive");
    const std::size_t n = Xtrain.rows, m = Ytrain.rows, total = n + m, d = Xtrain.dim;
    const double l2 =
        config.l2_penalty >= 0.0 ? config.l2_penalty : 1.0 / static_cast<double>(total);

    double max_norm2 = 0.0;
    auto accum_norm = [&](const EmbeddingSet& S) {
        for (std::size_t i = 0; i < S.rows; ++i) {
            double s = 1.0;  // the implicit bias coordinate
            for (double v : S.row(i)) s += v * v;
            max_norm2 = std::max(max_norm2, s);
        }
    };
    accum_norm(Xtrain);
    accum_norm(Ytrain);
    const double L = 0.25 * max_norm2 + l2;
    const double step = config.learning_rate / L;

    LogisticModel model;
    model.weights.assign(d, 0.0);
    std::vector<double> grad(d + 1);
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        auto accumulate = [&](const EmbeddingSet& S, double label) {
            for (std::size_t i = 0; i < S.rows; ++i) {
                auto row = S.row(i);
                double z = model.bias;
                for (std::size_t j = 0; j < d; ++j) z += model.weights[j] * row[j];
                // d/dz log(1 + exp(-label z)) = -label sigma(-label z)
                const double g = -label * detail::sigmoid(-label * z);
                for (std::size_t j = 0; j < d; ++j) grad[j] += g * row[j];
                grad[d] += g;
            }
        };
        accumulate(Xtrain, 1.0);
        accumulate(Ytrain, -1.0);
        const double inv = 1.0 / static_cast<double>(total);
        double norm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            grad[j] = grad[j] * inv + l2 * model.weights[j];
            norm2 += grad[j] * grad[j];
        }
        grad[d] *= inv;
        norm2 += grad[d] * grad[d];
        model.grad_norm = std::sqrt(norm2);
        model.epochs_run = epoch + 1;
        if (model.grad_norm < 1e-8) {
            model.converged = true;
            break;
        }
        for (std::size_t j = 0; j < d; ++j) model.weights[j] -= step * grad[j];
        model.bias -= step * grad[d];
    }
    return model;
}

/// Predicted probability that a point came from X, clamped to [1e-6, 1-1e-6].
inline double predict_eta(const LogisticModel& model, std::span<const double> x) {
    double z = model.bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += model.weights[j] * x[j];
    return std::clamp(detail::sigmoid(z), 1e-6, 1.0 - 1e-6);
}

/// r̂(x) = m η̂(x) / (n (1 − η̂(x))): the classifier odds with prior
/// correction for the class sizes n (from P) and m (from Q).
inline std::vector<double> classifier_likelihood_ratios(const LogisticModel& model,
                                                        const EmbeddingSet& Xeval,
                                                        const EmbeddingSet& Yeval,
                                                        std::size_t n, std::size_t m) {
    if (n < 1 || m < 1)
        throw std::invalid_argument("classifier_likelihood_ratios: n and m must be >= 1");
    const double prior = static_cast<double>(m) / static_cast<double>(n);
    std::vector<double> ratios;
    ratios.reserve(Xeval.rows + Yeval.rows);
    auto push = [&](const EmbeddingSet& S) {
        for (std::size_t i = 0; i < S.rows; ++i) {
            const double eta = predict_eta(model, S.row(i));
            ratios.push_back(prior * eta / (1.0 - eta));
        }
    };
    push(Xeval);
    push(Yeval);
    return ratios;
}

namespace detail {

/// Seeded disjoint train/eval row split.
inline std::pair<EmbeddingSet, EmbeddingSet> split_rows(const EmbeddingSet& S,
                                                        double train_fraction, Rng& rng) {
    const std::size_t n = S.rows;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below(i + 1)]);
    std::size_t n_train = static_cast<std::size_t>(std::ceil(train_fraction * n));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    std::vector<double> train, eval;
    train.reserve(n_train * S.dim);
    eval.reserve((n - n_train) * S.dim);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = S.row(perm[i]);
        auto& dst = i < n_train ? train : eval;
        dst.insert(dst.end(), row.begin(), row.end());
    }
    return {EmbeddingSet(std::move(train), n_train, S.dim),
            EmbeddingSet(std::move(eval), n - n_train, S.dim)};
}

}  // namespace detail

/// Frontier and summaries from the classifier likelihood-ratio estimator.
/// As in the k-NN path, the P-side coordinate averages f_lambda over the
/// ratios at held-out Y points and the Q-side averages the flipped
/// generator over inverse ratios at held-out X points, clamped at zero.
inline ScoreReport classifier_scores(const EmbeddingSet& X, const EmbeddingSet& Y,
                                     const DivergenceGenerator& f,
                                     const ClassifierConfig& config, double c, int grid_size,
                                     FrontierCurve* curve_out = nullptr) {
    if (grid_size < 2) throw std::invalid_argument("classifier_scores: grid_size must be >= 2");
    if (config.train_fraction <= 0.0 || config.train_fraction >= 1.0)
        throw std::invalid_argument("classifier_scores: train_fraction must be in (0,1)");
    if (X.rows < 2 || Y.rows < 2)
        throw std::invalid_argument("classifier_scores: need at least two rows per side");
    Rng rng(config.seed);
    Rng rng_x = rng.derive(1), rng_y = rng.derive(2);
    auto [x_train, x_eval] = detail::split_rows(X, config.train_fraction, rng_x);
    auto [y_train, y_eval] = detail::split_rows(Y, config.train_fraction, rng_y);

    ClassifierConfig fit_config = config;
    if (fit_config.l2_penalty < 0.0)
        fit_config.l2_penalty = 1.0 / static_cast<double>(x_train.rows + y_train.rows);
    const LogisticModel model = fit_logistic(x_train, y_train, fit_config);

    const double prior =
        static_cast<double>(y_train.rows) / static_cast<double>(x_train.rows);
    std::vector<double> ratio_x(x_eval.rows), ratio_y(y_eval.rows);
    for (std::size_t i = 0; i < x_eval.rows; ++i) {
        const double eta = predict_eta(model, x_eval.row(i));
        ratio_x[i] = prior * eta / (1.0 - eta);
    }
    for (std::size_t j = 0; j < y_eval.rows; ++j) {
        const double eta = predict_eta(model, y_eval.row(j));
        ratio_y[j] = prior * eta / (1.0 - eta);
    }

    auto clamped_mean = [](const DivergenceGenerator& g, const std::vector<double>& ts) {
        double s = 0.0;
        for (double t : ts) s += g.eval(t);
        return std::max(0.0, s / static_cast<double>(ts.size()));
    };

    // x(lam) = E_Q[f_lam(r)] at held-out Y, y(lam) = E_P[f_{1-lam}(1/r)] at
    // held-out X
    std::vector<double> inv_ratio_x(ratio_x.size());
    for (std::size_t i = 0; i < ratio_x.size(); ++i) inv_ratio_x[i] = 1.0 / ratio_x[i];
    FrontierCurve curve;
    curve.grid_size = grid_size;
    for (int i = 1; i < grid_size; ++i) {
        const double lam = static_cast<double>(i) / grid_size;
        const DivergenceGenerator f_lam = interpolate_generator(f, lam);
        const DivergenceGenerator f_bar = interpolate_generator(f, 1.0 - lam);
        curve.points.push_back(
            {lam, clamped_mean(f_lam, ratio_y), clamped_mean(f_bar, inv_ratio_x)});
    }

    const DivergenceGenerator f_half = interpolate_generator(f, 0.5);
    ScoreReport report;
    report.mauve = mauve_score(curve, c);
    report.fi = frontier_integral(curve);
    report.mid =
        0.5 * clamped_mean(f_half, ratio_y) + 0.5 * clamped_mean(f_half, inv_ratio_x);
    report.scale_c = c;
    report.generator = f.name;
    report.estimator = "classifier(l2=" + std::to_string(fit_config.l2_penalty) + ")";
    report.seed = config.seed;
    if (!model.converged)
        report.warnings.push_back("classifier_not_converged grad_norm=" +
                                  std::to_string(model.grad_norm));
    if (curve_out) *curve_out = std::move(curve);
    return report;
}

}  // namespace dfe
