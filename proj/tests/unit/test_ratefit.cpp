#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nmgauss/ratefit.hpp"

using namespace nmgauss;

TEST_CASE("exact power laws are recovered", "[ratefit]") {
    std::vector<std::pair<double, double>> pts;
    for (double r : {16.0, 64.0, 256.0, 1024.0}) pts.emplace_back(r, 3.0 * std::pow(r, -0.5));
    RateFitResult fit = fit_rate(pts);
    CHECK(fit.slope == Catch::Approx(-0.5).margin(1e-12));
    CHECK(fit.intercept == Catch::Approx(std::log(3.0)).margin(1e-12));
    CHECK(fit.r_squared == Catch::Approx(1.0).margin(1e-12));
    CHECK(fit.points.size() == 4);
    CHECK(fit.points[0].first == Catch::Approx(std::log(16.0)).margin(1e-14));
}

TEST_CASE("a flat series is a perfect zero-slope fit", "[ratefit]") {
    RateFitResult fit = fit_rate({{2.0, 5.0}, {8.0, 5.0}, {32.0, 5.0}});
    CHECK(fit.slope == Catch::Approx(0.0).margin(1e-14));
    CHECK(fit.r_squared == 1.0);
}

TEST_CASE("noise lowers r squared but not below zero", "[ratefit]") {
    RateFitResult fit = fit_rate({{2.0, 1.0}, {4.0, 3.0}, {8.0, 1.0}, {16.0, 3.0}});
    CHECK(fit.r_squared < 0.9);
    CHECK(fit.r_squared >= 0.0);
}

TEST_CASE("rate fit input validation", "[ratefit]") {
    CHECK_THROWS_AS(fit_rate({}), InvalidParameter);
    CHECK_THROWS_AS(fit_rate({{2.0, 1.0}}), InvalidParameter);
    CHECK_THROWS_AS(fit_rate({{2.0, 1.0}, {-4.0, 1.0}}), InvalidParameter);
    CHECK_THROWS_AS(fit_rate({{2.0, 1.0}, {0.0, 1.0}}), InvalidParameter);
    CHECK_THROWS_AS(fit_rate({{2.0, 1.0}, {2.0, 3.0}}), InvalidParameter);
    CHECK_THROWS_AS(fit_rate({{2.0, 1.0}, {4.0, 0.0}}), NumericFailure);
    CHECK_THROWS_AS(fit_rate({{2.0, 1.0}, {4.0, -1.0}}), NumericFailure);
}
