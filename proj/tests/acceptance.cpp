// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "dfe/dfe.hpp"
#include "oracles.hpp"

using namespace dfe;

namespace {

struct Checker {
    bool ok = true;
    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            std::printf("    violated: %s\n", what.c_str());
        }
    }
};

EmbeddingSet gaussian_blob(std::size_t n, double shift, double sd, Rng& rng) {
    std::vector<double> data(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        data[2 * i] = shift + sd * rng.normal();
        data[2 * i + 1] = sd * rng.normal();
    }
    return EmbeddingSet(std::move(data), n, 2);
}

GaussianFit exact_normal_1d(double mean, double var) {
    GaussianFit g = fit_gaussian(EmbeddingSet({0.0, 2.0}, 2, 1));
    g.mean(0) = mean;
    g.covariance(0, 0) = var;
    g.chol_lower(0, 0) = std::sqrt(var);
    g.log_norm = -0.5 * std::log(2.0 * M_PI * var);
    g.jitter = 0.0;
    return g;
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return num / den;
}

// 1: closed-form summaries of a fully disjoint pair.
bool criterion1(Checker& c) {
    const Histogram P({1.0, 0.0}), Q({0.0, 1.0});
    const auto kl = make_generator("kl");
    const double closed = frontier_integral(P, Q, kl, FiMode::closed_form);
    c.require(std::fabs(closed - 1.0) <= 1e-9, "disjoint FI_KL closed form != 1");
    const double quad = frontier_integral(P, Q, kl, FiMode::quadrature, 2000);
    c.require(std::fabs(quad - closed) <= 1e-3, "quadrature FI off the closed form");
    c.require(std::fabs(midpoint_score(P, Q, kl) - std::log(2.0)) <= 1e-12,
              "disjoint MID_KL != log 2");
    const int N = 500;
    const double mauve = mauve_score(build_frontier(P, Q, kl, N), 1.0);
    c.require(std::fabs(mauve - 0.5) <= 2.0 / N, "disjoint MAUVE at c=1 not ~1/2");
    return c.ok;
}

// 2: identical inputs score perfectly, exactly.
bool criterion2(Checker& c) {
    Rng rng(11);
    const auto kl = make_generator("kl");
    for (int rep = 0; rep < 50; ++rep) {
        const Histogram P = oracles::random_histogram(20, rng);
        const auto curve = build_frontier(P, P, kl, 50);
        for (const auto& pt : curve.points) {
            c.require(pt.x == 0.0, "identity frontier has nonzero x");
            c.require(pt.y == 0.0, "identity frontier has nonzero y");
        }
        c.require(mauve_score(curve, 5.0) == 1.0, "identity MAUVE != 1");
        c.require(frontier_integral(curve) == 0.0, "identity FI != 0");
        c.require(midpoint_score(P, P, kl) == 0.0, "identity MID != 0");
    }
    return c.ok;
}

// 3: closed-form frontier integrals agree with dense quadrature.
bool criterion3(Checker& c) {
    Rng rng(13);
    for (const char* name : {"kl", "chi2"}) {
        const auto f = make_generator(name);
        for (int rep = 0; rep < 100; ++rep) {
            const Histogram P = oracles::random_histogram(10, rng);
            const Histogram Q = oracles::random_histogram(10, rng);
            const double closed = frontier_integral(P, Q, f, FiMode::closed_form);
            const double quad = frontier_integral(P, Q, f, FiMode::quadrature, 8000);
            c.require(std::fabs(closed - quad) <= 1e-5,
                      std::string(name) + " closed vs quadrature gap > 1e-5");
        }
    }
    return c.ok;
}

// 4: level-set quantization respects the (f(0)+f*(0))/k error bound.
bool criterion4(Checker& c) {
    Rng rng(17);
    for (const char* name : {"js", "fi_kl", "lecam"}) {
        const auto f = make_generator(name);
        const double span = f.f_at_zero + f.fstar_at_zero;
        for (int k : {2, 5, 10, 50}) {
            for (int rep = 0; rep < 20; ++rep) {
                const Histogram P = oracles::random_histogram(500, rng, 0.5);
                const Histogram Q = oracles::random_histogram(500, rng, 0.5);
                const double full = f_divergence(P, Q, f);
                const auto group = oracle_level_set_partition(P, Q, f, k);
                const auto [Pm, Qm] = merge_by_group(P, Q, group);
                const double merged = f_divergence(Pm, Qm, f);
                c.require(merged <= full + 1e-12, "merging increased the divergence");
                c.require(full - merged <= span / k + 1e-12,
                          std::string(name) + " level-set bound violated");
            }
        }
    }
    return c.ok;
}

// 5: empirical FI error decays roughly like n^{-1/2}. A heavy-tailed pair
// keeps the statistical term dominant; light tails decay at the faster ~1/n
// bias rate.
bool criterion5(Checker& c) {
    const Histogram P = make_distribution({SyntheticSpec::Family::zipf, 3.0, 100, 0});
    const Histogram Q = make_distribution({SyntheticSpec::Family::zipf, 0.5, 100, 0});
    const auto rows = error_study(P, Q, {Smoothing::none}, {1000, 4000, 16000}, 50, 19);
    std::vector<double> log_n, log_err;
    for (const auto& row : rows) {
        log_n.push_back(std::log(static_cast<double>(row.n)));
        log_err.push_back(std::log(row.mean_abs_err));
    }
    const double slope = lsq_slope(log_n, log_err);
    std::printf("    error decay slope %.3f\n", slope);
    c.require(slope >= -0.7 && slope <= -0.3, "log-log error slope outside [-0.7, -0.3]");
    return c.ok;
}

// 6: add-1/2 smoothing beats the raw empirical estimate when bins outnumber
// samples, confirmed by a paired bootstrap.
bool criterion6(Checker& c) {
    const Histogram P = make_distribution({SyntheticSpec::Family::zipf, 0.0, 1000, 0});
    const Histogram Q = make_distribution({SyntheticSpec::Family::dirichlet, 0.5, 1000, 23});
    const int reps = 50;
    const auto rows = error_study(
        P, Q, {Smoothing::none, Smoothing::krichevsky_trofimov}, {2000}, reps, 29);
    std::vector<double> diff(reps);
    for (int r = 0; r < reps; ++r) diff[r] = rows[0].errors[r] - rows[1].errors[r];
    Rng rng(31);
    std::vector<double> boot(2000);
    for (double& b : boot) {
        double s = 0.0;
        for (int r = 0; r < reps; ++r) s += diff[rng.below(reps)];
        b = s / reps;
    }
    std::sort(boot.begin(), boot.end());
    const double lower95 = boot[static_cast<std::size_t>(0.05 * boot.size())];
    std::printf("    paired improvement 95%% lower bound %.5f\n", lower95);
    c.require(lower95 > 0.0, "bootstrap interval for the improvement includes 0");
    return c.ok;
}

// 7: simulated missing mass stays under k log(n) / n.
bool criterion7(Checker& c) {
    struct Case {
        Histogram P;
        std::uint64_t n;
    };
    const std::vector<Case> cases = {
        {make_distribution({SyntheticSpec::Family::zipf, 0.0, 100, 0}), 1000},
        {make_distribution({SyntheticSpec::Family::zipf, 1.0, 100, 0}), 1000},
        {make_distribution({SyntheticSpec::Family::zipf, 0.0, 1000, 0}), 10000},
        {make_distribution({SyntheticSpec::Family::zipf, 1.0, 1000, 0}), 10000},
    };
    for (const auto& cs : cases) {
        const double beta = beta_n_mc(cs.P, cs.n, 200, 37);
        const double bound = static_cast<double>(cs.P.bins()) *
                             std::log(static_cast<double>(cs.n)) /
                             static_cast<double>(cs.n);
        c.require(beta <= bound, "beta_n exceeds k log(n) / n");
    }
    return c.ok;
}

// 8: all four estimators rank a sweep of separations identically. Component
// std 3 keeps the largest separation inside the estimable overlap regime;
// unit-variance blobs saturate the sample-based estimators beyond 5 units.
bool criterion8(Checker& c) {
    const std::vector<double> seps = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
    const auto kl = make_generator("kl");
    std::vector<double> quantized, knn, logistic, parametric;
    Rng rng(41);
    for (double sep : seps) {
        const EmbeddingSet X = gaussian_blob(2000, 0.0, 3.0, rng);
        const EmbeddingSet Y = gaussian_blob(2000, sep, 3.0, rng);
        quantized.push_back(quantized_scores(X, Y, kl, 100,
                                             Smoothing::krichevsky_trofimov, 5.0, 25, 1)
                                .mauve);
        KnnConfig kcfg;
        kcfg.seed = 2;
        knn.push_back(knn_scores(X, Y, kl, kcfg, 5.0, 25).mauve);
        ClassifierConfig ccfg;
        ccfg.seed = 3;
        logistic.push_back(classifier_scores(X, Y, kl, ccfg, 5.0, 25).mauve);
        parametric.push_back(gaussian_scores(X, Y, kl, 2, 20000, 5.0, 25, 4).mauve);
    }
    std::vector<double> neg_sep;
    for (double s : seps) neg_sep.push_back(-s);
    const std::vector<std::pair<const char*, const std::vector<double>*>> runs = {
        {"quantize", &quantized}, {"knn", &knn}, {"classifier", &logistic},
        {"gaussian", &parametric}};
    for (const auto& [name, scores] : runs) {
        const double rho = oracles::spearman(*scores, neg_sep);
        std::printf("    %s spearman %.3f\n", name, rho);
        c.require(std::fabs(rho - 1.0) <= 1e-12,
                  std::string(name) + " does not rank the sweep perfectly");
    }
    return c.ok;
}

// 9: the interleaved-line nearest-neighbor example is exact.
bool criterion9(Checker& c) {
    const EmbeddingSet X({0.0, 2.0, 4.0}, 3, 1);
    const EmbeddingSet Y({1.0, 3.0, 5.0}, 3, 1);
    const auto ratios = knn_likelihood_ratios(X, Y, 3);
    const auto kl = make_generator("kl");
    double est = 0.0;
    for (std::size_t j = 0; j < Y.rows; ++j) est += kl.eval(ratios[X.rows + j]);
    est /= static_cast<double>(Y.rows);
    c.require(std::fabs(est - (2.0 * std::log(2.0) - 1.0)) <= 1e-12,
              "hand-computed KL estimate mismatch");
    return c.ok;
}

// 10: entropic transport at small epsilon matches the exact LP.
bool criterion10(Checker& c) {
    Rng rng(43);
    for (int rep = 0; rep < 25; ++rep) {
        const Histogram P = oracles::random_histogram(3, rng);
        const Histogram Q = oracles::random_histogram(3, rng);
        const std::vector<double> pos = {rng.uniform(), 1.0 + rng.uniform(),
                                         2.0 + rng.uniform()};
        std::vector<double> e(9);
        std::vector<std::vector<double>> cost(3, std::vector<double>(3));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                cost[i][j] = (pos[i] - pos[j]) * (pos[i] - pos[j]);
                e[i * 3 + j] = cost[i][j];
            }
        const double lp = oracles::lp_transport(P.probs(), Q.probs(), cost);
        const auto result = sinkhorn_ot(P, Q, CostMatrix(std::move(e), 3), 1e-4);
        c.require(result.converged, "sinkhorn failed to converge");
        c.require(std::fabs(result.cost - lp) <= 1e-4, "sinkhorn cost off the LP optimum");
    }
    return c.ok;
}

// 11: parametric Monte Carlo agrees with dense 1-D quadrature.
bool criterion11(Checker& c) {
    const GaussianFit a = exact_normal_1d(0.0, 1.0);
    const GaussianFit b = exact_normal_1d(1.0, 1.0);
    const auto f = make_generator("interp_kl", 0.5);
    const double oracle =
        oracles::gaussian_divergence_quadrature(f, 0.0, 1.0, 1.0, 1.0, -10.0, 11.0, 100000);
    std::vector<double> estimates;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        estimates.push_back(gaussian_f_divergence_mc(a, b, f, 100000, seed));
    double mean = 0.0, var = 0.0;
    for (double e : estimates) mean += e;
    mean /= estimates.size();
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= estimates.size() - 1;
    const double se = std::sqrt(var / estimates.size());
    std::printf("    mc mean %.6f oracle %.6f se %.6f\n", mean, oracle, se);
    c.require(std::fabs(mean - oracle) <= 3.0 * se + 1e-6,
              "monte carlo mean outside 3 standard errors of the quadrature value");
    return c.ok;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::function<bool(Checker&)>, double>> criteria = {
        {criterion1, 1.0},  {criterion2, 1.0},  {criterion3, 5.0},  {criterion4, 10.0},
        {criterion5, 120.0}, {criterion6, 120.0}, {criterion7, 30.0}, {criterion8, 180.0},
        {criterion9, 1.0},  {criterion10, 10.0}, {criterion11, 30.0}};
    bool all_ok = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Checker checker;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criteria[i].first(checker);
        } catch (const std::exception& e) {
            std::printf("    exception: %s\n", e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > criteria[i].second) {
            std::printf("    time budget exceeded: %.1fs > %.1fs\n", secs,
                        criteria[i].second);
            ok = false;
        }
        std::printf("%s criterion %zu (%.2fs)\n", ok ? "PASS" : "FAIL", i + 1, secs);
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
