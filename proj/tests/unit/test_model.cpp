#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nmgauss/model.hpp"

using namespace nmgauss;

TEST_CASE("derived quantities at d = 2, p = (0.2, 0.3)", "[model]") {
    ModelParams params{2, 7.5, {0.2, 0.3}};
    DerivedParams derived = derive(params);

    CHECK(derived.p0 == Catch::Approx(0.5).margin(1e-15));
    CHECK(derived.rho[0] == Catch::Approx(0.4).margin(1e-15));
    CHECK(derived.rho[1] == Catch::Approx(0.6).margin(1e-15));
    CHECK(derived.mean[0] == Catch::Approx(3.0).margin(1e-12));
    CHECK(derived.mean[1] == Catch::Approx(4.5).margin(1e-12));

    // covariance diag(rho) + rho rho^T
    CHECK(derived.sigma(0, 0) == Catch::Approx(0.56).margin(1e-15));
    CHECK(derived.sigma(0, 1) == Catch::Approx(0.24).margin(1e-15));
    CHECK(derived.sigma(1, 0) == Catch::Approx(0.24).margin(1e-15));
    CHECK(derived.sigma(1, 1) == Catch::Approx(0.96).margin(1e-15));

    // closed-form inverse diag(1/rho) - p0
    CHECK(derived.sigma_inv(0, 0) == Catch::Approx(2.0).margin(1e-15));
    CHECK(derived.sigma_inv(0, 1) == Catch::Approx(-0.5).margin(1e-15));
    CHECK(derived.sigma_inv(1, 1) == Catch::Approx(7.0 / 6.0).margin(1e-15));

    // determinant 0.48, both through the log and through the 2x2 minors
    CHECK(std::exp(derived.log_det_sigma) == Catch::Approx(0.48).epsilon(1e-12));
    double det = derived.sigma(0, 0) * derived.sigma(1, 1) -
                 derived.sigma(0, 1) * derived.sigma(1, 0);
    CHECK(det == Catch::Approx(0.48).margin(1e-15));
}

TEST_CASE("sigma times closed-form inverse is the identity", "[model]") {
    ModelParams params{3, 2.0, {0.11, 0.23, 0.31}};
    DerivedParams derived = derive(params);
    Mat prod = mat_mul(derived.sigma, derived.sigma_inv);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(prod(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
}

TEST_CASE("log det matches cholesky of sigma", "[model]") {
    ModelParams params{4, 9.0, {0.05, 0.15, 0.25, 0.35}};
    DerivedParams derived = derive(params);
    CHECK(derived.log_det_sigma ==
          Catch::Approx(cholesky(derived.sigma).log_det()).epsilon(1e-12));
}

TEST_CASE("parameter validation", "[model]") {
    CHECK_THROWS_AS(validate(ModelParams{0, 1.0, {}}), InvalidParameter);
    CHECK_THROWS_AS(validate(ModelParams{2, 1.0, {0.2}}), InvalidParameter);
    CHECK_THROWS_AS(validate(ModelParams{1, 0.0, {0.5}}), InvalidParameter);
    CHECK_THROWS_AS(validate(ModelParams{1, -3.0, {0.5}}), InvalidParameter);
    CHECK_THROWS_AS(validate(ModelParams{1, 1.0, {0.0}}), InvalidParameter);
    CHECK_THROWS_AS(validate(ModelParams{1, 1.0, {-0.1}}), InvalidParameter);
    CHECK_THROWS_AS(validate(ModelParams{2, 1.0, {0.5, 0.5}}), InvalidParameter);
    CHECK_THROWS_AS(validate(ModelParams{2, 1.0, {0.6, 0.7}}), InvalidParameter);
    CHECK_NOTHROW(validate(ModelParams{2, 1.0, {0.2, 0.3}}));
}

TEST_CASE("coordinate marginal is negative binomial with q = p_i/(p_i+p0)", "[model]") {
    ModelParams params{2, 4.0, {0.2, 0.3}};
    auto [r, q] = marginal_params(params, 0);
    CHECK(r == 4.0);
    CHECK(q == Catch::Approx(2.0 / 7.0).epsilon(1e-15));
    CHECK_THROWS_AS(marginal_params(params, 2), InvalidParameter);
    CHECK_THROWS_AS(marginal_params(params, -1), InvalidParameter);
}

TEST_CASE("bulk spec validation", "[model]") {
    CHECK_THROWS_AS(validate(BulkSpec{0.0}), InvalidParameter);
    CHECK_THROWS_AS(validate(BulkSpec{-1.0}), InvalidParameter);
    CHECK_NOTHROW(validate(BulkSpec{1.0}));
}
