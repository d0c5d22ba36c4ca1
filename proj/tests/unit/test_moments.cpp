#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nmgauss/moments.hpp"

using namespace nmgauss;

TEST_CASE("moment index validation", "[moments]") {
    CHECK_THROWS_AS(validate(MomentIndex{{}}, 2), InvalidParameter);
    CHECK_THROWS_AS(validate(MomentIndex{{1, 1, 1, 1, 1}}, 2), InvalidParameter);
    CHECK_THROWS_AS(validate(MomentIndex{{0}}, 2), InvalidParameter);
    CHECK_THROWS_AS(validate(MomentIndex{{3}}, 2), InvalidParameter);
    CHECK_NOTHROW(validate(MomentIndex{{2, 1}}, 2));
}

TEST_CASE("first and second moment formulas match brute-force sums", "[moments]") {
    ModelParams params{2, 16.0, {0.2, 0.3}};
    DerivedParams derived = derive(params);
    long long box = default_moment_box(params);

    CHECK(brute_force_moment(params, MomentIndex{{1}}, box) ==
          Catch::Approx(0.0).margin(1e-9));
    CHECK(brute_force_moment(params, MomentIndex{{2}}, box) ==
          Catch::Approx(0.0).margin(1e-9));

    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            MomentIndex idx{{i, j}};
            double formula = central_moment_formula(derived, params.r, idx);
            double brute = brute_force_moment(params, idx, box);
            // the covariance of the standardized counts is exactly sigma
            CHECK(brute == Catch::Approx(formula).margin(1e-9));
            CHECK(formula == Catch::Approx(derived.sigma(i - 1, j - 1)).margin(1e-15));
        }
}

TEST_CASE("third moment formula matches brute-force sums", "[moments]") {
    ModelParams params{2, 16.0, {0.2, 0.3}};
    DerivedParams derived = derive(params);
    long long box = default_moment_box(params);
    int triples[][3] = {{1, 1, 1}, {1, 1, 2}, {1, 2, 2}, {2, 2, 2}, {2, 1, 2}};
    for (auto& t : triples) {
        MomentIndex idx{{t[0], t[1], t[2]}};
        double formula = central_moment_formula(derived, params.r, idx);
        double brute = brute_force_moment(params, idx, box);
        CHECK(brute == Catch::Approx(formula).margin(1e-8));
    }
}

TEST_CASE("pure fourth moment: leading term plus an exact 26/r remainder", "[moments]") {
    // d = 1, p = 1/2 gives rho = 1: E(delta^4) = 12 + 26/r exactly
    for (double r : {16.0, 64.0}) {
        ModelParams params{1, r, {0.5}};
        DerivedParams derived = derive(params);
        long long box = default_moment_box(params);
        MomentIndex idx{{1, 1, 1, 1}};
        double formula = central_moment_formula(derived, r, idx);
        CHECK(formula == Catch::Approx(12.0).margin(1e-14));
        double brute = brute_force_moment(params, idx, box);
        CHECK(brute - formula == Catch::Approx(26.0 / r).epsilon(1e-5));
    }
}

TEST_CASE("mixed fourth moments are rejected", "[moments]") {
    DerivedParams derived = derive(ModelParams{2, 16.0, {0.2, 0.3}});
    CHECK_THROWS_AS(central_moment_formula(derived, 16.0, MomentIndex{{1, 1, 1, 2}}),
                    InvalidParameter);
    CHECK_THROWS_AS(central_moment_formula(derived, 16.0, MomentIndex{{1, 2, 1, 2}}),
                    InvalidParameter);
    CHECK_NOTHROW(central_moment_formula(derived, 16.0, MomentIndex{{2, 2, 2, 2}}));
}

TEST_CASE("second and fourth moments respect their p0 envelopes", "[moments]") {
    // E(delta_i^2) <= rho_i / p0 (equality when d = 1) and
    // E(delta_i^4) <= 4 rho_i^2 / p0^2 for r large enough
    ModelParams one{1, 32.0, {0.5}};
    DerivedParams done = derive(one);
    long long box1 = default_moment_box(one);
    double m2 = brute_force_moment(one, MomentIndex{{1, 1}}, box1);
    CHECK(m2 <= done.rho[0] / done.p0 + 1e-9); // equality case, slack for truncation
    double m4 = brute_force_moment(one, MomentIndex{{1, 1, 1, 1}}, box1);
    CHECK(m4 <= 4.0 * done.rho[0] * done.rho[0] / (done.p0 * done.p0) + 1e-9);

    ModelParams two{2, 32.0, {0.2, 0.3}};
    DerivedParams dtwo = derive(two);
    long long box2 = default_moment_box(two);
    for (int i = 1; i <= 2; ++i) {
        double rho_i = dtwo.rho[static_cast<std::size_t>(i - 1)];
        CHECK(brute_force_moment(two, MomentIndex{{i, i}}, box2) < rho_i / dtwo.p0);
        CHECK(brute_force_moment(two, MomentIndex{{i, i, i, i}}, box2) <
              4.0 * rho_i * rho_i / (dtwo.p0 * dtwo.p0));
    }
}

TEST_CASE("default box reaches the tail criterion", "[moments]") {
    for (ModelParams params : {ModelParams{1, 16.0, {0.5}}, ModelParams{2, 64.0, {0.2, 0.3}}}) {
        long long box = default_moment_box(params);
        DerivedParams derived = derive(params);
        for (std::size_t i = 0; i < derived.rho.size(); ++i)
            CHECK(static_cast<double>(box) >= params.r * derived.rho[i]);
        CHECK(truncated_total_mass(params, box) >= 1.0 - 1e-8);
    }
}

TEST_CASE("restriction to the central region changes little at wide gamma", "[moments]") {
    ModelParams params{1, 64.0, {0.5}};
    long long box = default_moment_box(params);
    MomentIndex idx{{1, 1}};
    double full = brute_force_moment(params, idx, box);
    double wide = brute_force_moment(params, idx, box, BulkSpec{50.0});
    double narrow = brute_force_moment(params, idx, box, BulkSpec{1.0});
    CHECK(wide == Catch::Approx(full).margin(1e-12));
    CHECK(narrow < full); // even-order mass is lost outside the region
}

TEST_CASE("brute force guards its summand budget", "[moments]") {
    CHECK_THROWS_AS(brute_force_moment(ModelParams{2, 16.0, {0.2, 0.3}},
                                       MomentIndex{{1}}, 1000000),
                    BudgetExceeded);
}

TEST_CASE("truncated moment bounds hold at their quoted rates", "[moments]") {
    ModelParams params{1, 64.0, {0.5}};
    long long box = default_moment_box(params);
    BulkSpec spec{1.0};
    for (int order = 1; order <= 3; ++order) {
        MomentIndex idx{std::vector<int>(static_cast<std::size_t>(order), 1)};
        MomentBoundCheck check = truncated_moment_bound_check(params, idx, spec, box);
        INFO("order " << order << ": lhs " << check.lhs << " rhs " << check.rhs);
        CHECK(check.holds);
        CHECK(check.rhs >= 0.0);
    }

    ModelParams both{2, 64.0, {0.2, 0.3}};
    long long box2 = default_moment_box(both);
    MomentBoundCheck mixed =
        truncated_moment_bound_check(both, MomentIndex{{1, 2}}, BulkSpec{1.0}, box2);
    CHECK(mixed.holds);

    CHECK_THROWS_AS(
        truncated_moment_bound_check(params, MomentIndex{{1, 1, 1, 1}}, spec, box),
        InvalidParameter);
    // a box that fails to cover the central region is a caller error
    CHECK_THROWS_AS(truncated_moment_bound_check(params, MomentIndex{{1}}, spec, 10),
                    InvalidParameter);
}
