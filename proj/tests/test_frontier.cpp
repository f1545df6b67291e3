#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dfe/frontier.hpp"
#include "oracles.hpp"

using dfe::build_frontier;
using dfe::f_divergence;
using dfe::FiMode;
using dfe::FrontierCurve;
using dfe::frontier_integral;
using dfe::Histogram;
using dfe::make_generator;
using dfe::mauve_score;
using dfe::midpoint_score;

TEST_CASE("frontier of identical histograms is the origin") {
    const Histogram P({0.2, 0.3, 0.5});
    const auto curve = build_frontier(P, P, make_generator("kl"), 10);
    REQUIRE(curve.points.size() == 9);
    for (const auto& pt : curve.points) {
        CHECK(pt.x == Catch::Approx(0.0).margin(1e-13));
        CHECK(pt.y == Catch::Approx(0.0).margin(1e-13));
    }
    CHECK(mauve_score(curve, 5.0) == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("disjoint point-mass frontier in closed form") {
    const Histogram P({1.0, 0.0}), Q({0.0, 1.0});
    const auto curve = build_frontier(P, Q, make_generator("kl"), 10);
    for (const auto& pt : curve.points) {
        CHECK(pt.x == Catch::Approx(std::log(1.0 / pt.lambda)).margin(1e-12));
        CHECK(pt.y == Catch::Approx(std::log(1.0 / (1.0 - pt.lambda))).margin(1e-12));
    }
    CHECK(curve.points[4].lambda == Catch::Approx(0.5));
    CHECK(curve.points[4].x == Catch::Approx(std::log(2.0)).margin(1e-12));
    CHECK(curve.points[4].y == Catch::Approx(std::log(2.0)).margin(1e-12));
}

TEST_CASE("grid lambdas are strictly increasing at i/N") {
    dfe::Rng rng(3);
    const Histogram P = oracles::random_histogram(4, rng);
    const Histogram Q = oracles::random_histogram(4, rng);
    const auto curve = build_frontier(P, Q, make_generator("js"), 25);
    REQUIRE(curve.points.size() == 24);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].lambda == Catch::Approx((i + 1) / 25.0));
        if (i) CHECK(curve.points[i].lambda > curve.points[i - 1].lambda);
        CHECK(curve.points[i].x >= 0.0);
        CHECK(curve.points[i].y >= 0.0);
    }
    CHECK_THROWS_AS(build_frontier(P, Q, make_generator("js"), 1), std::invalid_argument);
}

TEST_CASE("mauve edge cases") {
    FrontierCurve empty;
    empty.grid_size = 2;
    CHECK(mauve_score(empty, 1.0) == Catch::Approx(0.5));
    const Histogram P({1.0, 0.0}), Q({0.0, 1.0});
    const auto curve = build_frontier(P, Q, make_generator("kl"), 500);
    CHECK(mauve_score(curve, 1.0) == Catch::Approx(0.5).margin(2.0 / 500));
    CHECK_THROWS_AS(mauve_score(curve, 0.0), std::invalid_argument);
    CHECK(mauve_score(curve, 5.0) >= 0.0);
    CHECK(mauve_score(curve, 5.0) <= 1.0);
}

TEST_CASE("summaries are symmetric in the two arguments") {
    dfe::Rng rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        const Histogram P = oracles::random_histogram(6, rng);
        const Histogram Q = oracles::random_histogram(6, rng);
        const auto f = make_generator("kl");
        const auto pq = build_frontier(P, Q, f, 100);
        const auto qp = build_frontier(Q, P, f, 100);
        CHECK(mauve_score(pq, 5.0) == Catch::Approx(mauve_score(qp, 5.0)).margin(1e-10));
        CHECK(frontier_integral(pq) == Catch::Approx(frontier_integral(qp)).margin(1e-10));
        CHECK(midpoint_score(P, Q, f) == Catch::Approx(midpoint_score(Q, P, f)).margin(1e-12));
    }
}

TEST_CASE("pointwise dominance orders mauve for every c") {
    dfe::Rng rng(9);
    const Histogram P = oracles::random_histogram(5, rng);
    const Histogram Q = oracles::random_histogram(5, rng);
    const auto f = make_generator("kl");
    const auto tight = build_frontier(P, dfe::mix(0.5, P, Q), f, 50);
    const auto wide = build_frontier(P, Q, f, 50);
    bool dominated = true;
    for (std::size_t i = 0; i < tight.points.size(); ++i)
        dominated = dominated && tight.points[i].x <= wide.points[i].x + 1e-12 &&
                    tight.points[i].y <= wide.points[i].y + 1e-12;
    if (dominated)
        for (double c : {1.0, 2.5, 5.0, 10.0})
            CHECK(mauve_score(tight, c) >= mauve_score(wide, c) - 1e-12);
}

TEST_CASE("kl frontier coordinates are monotone in lambda") {
    dfe::Rng rng(15);
    for (int rep = 0; rep < 5; ++rep) {
        const Histogram P = oracles::random_histogram(6, rng);
        const Histogram Q = oracles::random_histogram(6, rng);
        const auto curve = build_frontier(P, Q, make_generator("kl"), 40);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].x <= curve.points[i - 1].x + 1e-12);
            CHECK(curve.points[i].y >= curve.points[i - 1].y - 1e-12);
        }
    }
}

TEST_CASE("frontier integral closed form agrees with quadrature") {
    dfe::Rng rng(21);
    const auto kl = make_generator("kl");
    for (int rep = 0; rep < 10; ++rep) {
        const Histogram P = oracles::random_histogram(10, rng);
        const Histogram Q = oracles::random_histogram(10, rng);
        const double closed = frontier_integral(P, Q, kl, FiMode::closed_form);
        const double quad = frontier_integral(P, Q, kl, FiMode::quadrature, 2000);
        CHECK(closed == Catch::Approx(quad).margin(1e-5));
        CHECK(closed >= 0.0);
        CHECK(closed <= 1.0 + 1e-12);
    }
    const Histogram P({1.0, 0.0}), Q({0.0, 1.0});
    CHECK(frontier_integral(P, Q, kl, FiMode::closed_form) == Catch::Approx(1.0).margin(1e-12));
    CHECK(frontier_integral(P, P, kl, FiMode::closed_form) == Catch::Approx(0.0).margin(1e-13));
    CHECK_THROWS_AS(frontier_integral(P, Q, make_generator("js"), FiMode::closed_form),
                    std::invalid_argument);
}

TEST_CASE("midpoint summary") {
    const Histogram P({1.0, 0.0}), Q({0.0, 1.0});
    const auto kl = make_generator("kl");
    CHECK(midpoint_score(P, P, kl) == Catch::Approx(0.0).margin(1e-14));
    CHECK(midpoint_score(P, Q, kl) == Catch::Approx(std::log(2.0)).margin(1e-12));
    dfe::Rng rng(25);
    for (int rep = 0; rep < 10; ++rep) {
        const Histogram A = oracles::random_histogram(6, rng);
        const Histogram B = oracles::random_histogram(6, rng);
        for (const char* name : {"kl", "js", "lecam"}) {
            const auto f = make_generator(name);
            CHECK(midpoint_score(A, B, f) <= 0.5 * (f.f_at_zero + f.eval(2.0)) + 1e-12);
        }
        // MID_KL is the Jensen-Shannon divergence, computed independently
        // from the symmetric skew generator
        CHECK(midpoint_score(A, B, kl) ==
              Catch::Approx(f_divergence(A, B, make_generator("js"))).margin(1e-12));
    }
}
