#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dfe/simulation.hpp"
#include "oracles.hpp"

using dfe::error_study;
using dfe::FiMode;
using dfe::frontier_integral;
using dfe::Histogram;
using dfe::make_distribution;
using dfe::make_generator;
using dfe::Smoothing;
using dfe::SyntheticSpec;

namespace {

SyntheticSpec zipf(double r, std::size_t k) {
    SyntheticSpec s;
    s.family = SyntheticSpec::Family::zipf;
    s.param = r;
    s.k = k;
    return s;
}

SyntheticSpec dirichlet(double alpha, std::size_t k, std::uint64_t seed) {
    SyntheticSpec s;
    s.family = SyntheticSpec::Family::dirichlet;
    s.param = alpha;
    s.k = k;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("zipf families") {
    const Histogram flat = make_distribution(zipf(0.0, 4));
    for (std::size_t l = 0; l < 4; ++l) CHECK(flat[l] == Catch::Approx(0.25));
    const Histogram z1 = make_distribution(zipf(1.0, 3));
    CHECK(z1[0] == Catch::Approx(6.0 / 11.0));
    CHECK(z1[1] == Catch::Approx(3.0 / 11.0));
    CHECK(z1[2] == Catch::Approx(2.0 / 11.0));
    CHECK_THROWS_AS(make_distribution(zipf(-1.0, 3)), std::invalid_argument);
}

TEST_CASE("dirichlet draws are valid and seeded") {
    const Histogram d = make_distribution(dirichlet(1.0, 3, 42));
    double sum = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
        CHECK(d[l] > 0.0);
        sum += d[l];
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
    const Histogram d2 = make_distribution(dirichlet(1.0, 3, 42));
    CHECK(d.probs() == d2.probs());
    CHECK_THROWS_AS(make_distribution(dirichlet(0.0, 3, 1)), std::invalid_argument);
}

TEST_CASE("spec parser") {
    const auto s = dfe::parse_synthetic_spec("zipf:1.5", 10, 3);
    CHECK(s.family == SyntheticSpec::Family::zipf);
    CHECK(s.param == 1.5);
    CHECK_THROWS_AS(dfe::parse_synthetic_spec("zipf", 10, 3), std::invalid_argument);
    CHECK_THROWS_AS(dfe::parse_synthetic_spec("weird:1", 10, 3), std::invalid_argument);
}

TEST_CASE("large samples drive the error to zero") {
    const Histogram P = make_distribution(zipf(1.0, 100));
    const Histogram Q = make_distribution(zipf(0.5, 100));
    const auto rows = error_study(P, Q, {Smoothing::none}, {1000000}, 1, 5);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_abs_err < 0.01);
}

TEST_CASE("identical truth gives nonnegative errors equal to the estimate") {
    const Histogram P = make_distribution(zipf(0.0, 50));
    const auto rows = error_study(P, P, {Smoothing::none}, {500}, 5, 6);
    for (double e : rows[0].errors) CHECK(e >= 0.0);
    CHECK(rows[0].mean_abs_err > 0.0);
}

TEST_CASE("study is deterministic and paired across estimators") {
    const Histogram P = make_distribution(zipf(1.0, 50));
    const Histogram Q = make_distribution(dirichlet(0.5, 50, 9));
    const auto a =
        error_study(P, Q, {Smoothing::none, Smoothing::krichevsky_trofimov}, {400}, 8, 11);
    const auto b =
        error_study(P, Q, {Smoothing::none, Smoothing::krichevsky_trofimov}, {400}, 8, 11);
    REQUIRE(a.size() == 2);
    CHECK(a[0].errors == b[0].errors);
    CHECK(a[1].errors == b[1].errors);
}

TEST_CASE("smoothing helps when bins far outnumber samples") {
    const Histogram P = make_distribution(zipf(0.0, 1000));
    const Histogram Q = make_distribution(dirichlet(0.5, 1000, 17));
    const auto rows = error_study(
        P, Q, {Smoothing::none, Smoothing::krichevsky_trofimov}, {2000}, 15, 23);
    CHECK(rows[1].mean_abs_err < rows[0].mean_abs_err);
    // KT stays competitive in the small k/n regime too
    const Histogram Ps = make_distribution(zipf(1.0, 20));
    const Histogram Qs = make_distribution(zipf(0.5, 20));
    const auto small = error_study(
        Ps, Qs, {Smoothing::none, Smoothing::krichevsky_trofimov, Smoothing::laplace,
                 Smoothing::braess_sauer},
        {5000}, 15, 29);
    double best = small[0].mean_abs_err;
    for (const auto& row : small) best = std::min(best, row.mean_abs_err);
    CHECK(small[1].mean_abs_err <= 1.5 * best + 1e-12);
}

TEST_CASE("error shrinks as the sample grows") {
    const Histogram P = make_distribution(zipf(1.0, 100));
    const auto rows = error_study(P, P, {Smoothing::none}, {1000, 4000}, 20, 31);
    CHECK(rows[1].mean_abs_err < rows[0].mean_abs_err);
}
