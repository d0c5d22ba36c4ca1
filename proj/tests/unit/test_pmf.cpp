#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nmgauss/pmf.hpp"

using namespace nmgauss;

// Anchors computed with an independent extended-precision implementation and
// frozen; tolerance 1e-12 absolute on the log scale covers libm differences.
TEST_CASE("log pmf anchors", "[pmf]") {
    CHECK(log_pmf(ModelParams{2, 2.5, {0.2, 0.3}}, {1, 2}) ==
          Catch::Approx(-2.7702675558999839).margin(1e-12));
    CHECK(log_pmf(ModelParams{1, 5.0, {0.5}}, {7}) ==
          Catch::Approx(-2.5186735122588146).margin(1e-12));
    // r = 1, p = 1/2: geometric, P(2) = 1/8 exactly
    CHECK(log_pmf(ModelParams{1, 1.0, {0.5}}, {2}) ==
          Catch::Approx(std::log(0.125)).margin(1e-13));
}

TEST_CASE("coordinate marginal pmf matches the 1-d family", "[pmf]") {
    ModelParams joint{2, 4.0, {0.2, 0.3}};
    auto [r, q] = marginal_params(joint, 0);
    CHECK(log_pmf(ModelParams{1, r, {q}}, {3}) ==
          Catch::Approx(-2.1084455784169647).margin(1e-12));
    // and the marginal equals the row sum of the joint pmf
    long double row = 0.0L;
    for (long long k1 = 0; k1 <= 400; ++k1)
        row += std::exp(static_cast<long double>(log_pmf(joint, {3, k1})));
    CHECK(static_cast<double>(row) ==
          Catch::Approx(std::exp(-2.1084455784169647)).epsilon(1e-10));
}

TEST_CASE("one-step recurrence agrees with direct evaluation", "[pmf]") {
    ModelParams params{2, 3.7, {0.15, 0.4}};
    DerivedParams derived = derive(params);
    PmfEval eval(params, derived);
    LatticePoint k{4, 9};
    double big_k = 13.0;
    CHECK(eval(k) + eval.step(big_k, k[1], 1) ==
          Catch::Approx(eval(LatticePoint{4, 10})).margin(1e-12));
    CHECK(eval(k) + eval.step(big_k, k[0], 0) ==
          Catch::Approx(eval(LatticePoint{5, 9})).margin(1e-12));
}

TEST_CASE("negative coordinates are rejected", "[pmf]") {
    CHECK_THROWS_AS(log_pmf(ModelParams{1, 2.0, {0.5}}, {-1}), InvalidParameter);
    CHECK_THROWS_AS(log_pmf(ModelParams{1, 2.0, {0.5}}, {1, 2}), InvalidParameter);
}

TEST_CASE("truncated mass is monotone in the box and approaches 1", "[pmf]") {
    ModelParams params{2, 5.0, {0.2, 0.3}};
    double m50 = truncated_total_mass(params, 50);
    double m100 = truncated_total_mass(params, 100);
    double m400 = truncated_total_mass(params, 400);
    CHECK(m50 <= m100);
    CHECK(m100 <= m400);
    CHECK(m400 <= 1.0 + 1e-12);
    CHECK(m400 >= 1.0 - 1e-8);

    // the 1-d family tightens the same way
    double one_d = truncated_total_mass(ModelParams{1, 10.0, {0.5}}, 400);
    CHECK(one_d <= 1.0 + 1e-12);
    CHECK(one_d >= 1.0 - 1e-8);
}

TEST_CASE("truncated mass guards its summand budget", "[pmf]") {
    CHECK_THROWS_AS(truncated_total_mass(ModelParams{2, 5.0, {0.2, 0.3}}, 1000000),
                    BudgetExceeded);
    CHECK_THROWS_AS(truncated_total_mass(ModelParams{1, 5.0, {0.5}}, -1), InvalidParameter);
}

TEST_CASE("log pmf stays finite far out in the tail", "[pmf]") {
    double lp = log_pmf(ModelParams{1, 2.0, {0.5}}, {1000000});
    CHECK(std::isfinite(lp));
    CHECK(lp < -100.0);
}
