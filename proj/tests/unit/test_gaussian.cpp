#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nmgauss/gaussian.hpp"
#include "nmgauss/rng.hpp"

using namespace nmgauss;

namespace {

GaussianSpec make_spec(Vec mean, std::vector<double> cov_rows) {
    GaussianSpec spec;
    spec.mean = std::move(mean);
    // the covariance dimension comes from the entry count, so a short mean
    // vector really is a dimension mismatch rather than corrupt storage
    int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cov_rows.size()))));
    REQUIRE(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) == cov_rows.size());
    spec.cov = Mat(n);
    spec.cov.a = std::move(cov_rows);
    return spec;
}

// textbook 1-d closed form, written independently of the library version
double hellinger_1d(double mu_a, double var_a, double mu_b, double var_b) {
    double sa = std::sqrt(var_a), sb = std::sqrt(var_b);
    double bc = std::sqrt(2.0 * sa * sb / (var_a + var_b)) *
                std::exp(-0.25 * (mu_a - mu_b) * (mu_a - mu_b) / (var_a + var_b));
    return std::sqrt(std::max(0.0, 1.0 - bc));
}

} // namespace

TEST_CASE("gaussian spec validation", "[gaussian]") {
    CHECK_THROWS_AS(validate(make_spec({0.0, 0.0}, {1.0})), InvalidParameter);
    CHECK_THROWS_AS(validate(make_spec({0.0, 0.0}, {1.0, 0.3, 0.1, 1.0})), InvalidParameter);
    CHECK_THROWS_AS(validate(make_spec({0.0, 0.0}, {1.0, 2.0, 2.0, 1.0})), NumericFailure);
    CHECK_NOTHROW(validate(make_spec({0.0, 0.0}, {1.0, 0.3, 0.3, 1.0})));
}

TEST_CASE("identical gaussians are at distance zero", "[gaussian]") {
    GaussianSpec spec = make_spec({1.0, -2.0}, {2.0, 0.5, 0.5, 1.5});
    CHECK(hellinger_gaussians(spec, spec) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("hellinger between gaussians matches the 1-d closed form", "[gaussian]") {
    std::mt19937_64 eng = make_engine(11);
    std::uniform_real_distribution<double> unif(0.2, 3.0);
    for (int rep = 0; rep < 100; ++rep) {
        double mu_a = unif(eng) - 1.5, mu_b = unif(eng) - 1.5;
        double var_a = unif(eng), var_b = unif(eng);
        GaussianSpec a = make_spec({mu_a}, {var_a});
        GaussianSpec b = make_spec({mu_b}, {var_b});
        CHECK(hellinger_gaussians(a, b) ==
              Catch::Approx(hellinger_1d(mu_a, var_a, mu_b, var_b)).margin(1e-12));
    }
}

TEST_CASE("hellinger between equal-mean scaled covariances is scale free", "[gaussian]") {
    // full vs diagonal covariance at rho = 1 (d = 1, p = 1/2): the distance
    // does not depend on the common scale r
    auto at_r = [](double r) {
        GaussianSpec full = make_spec({r}, {2.0 * r});
        GaussianSpec diag = make_spec({r}, {1.0 * r});
        return hellinger_gaussians(full, diag);
    };
    double h = at_r(64.0);
    CHECK(h == Catch::Approx(0.17034217500476257).epsilon(1e-12));
    CHECK(at_r(64.0 * 7.3) == Catch::Approx(h).epsilon(1e-12));
    CHECK(at_r(64.0 * 1000.0) == Catch::Approx(h).epsilon(1e-12));
}

TEST_CASE("hellinger agrees with monte carlo in two dimensions", "[gaussian]") {
    GaussianSpec a = make_spec({0.0, 0.0}, {2.0, 0.6, 0.6, 1.2});
    GaussianSpec b = make_spec({0.4, -0.3}, {1.5, 0.2, 0.2, 1.8});
    double h = hellinger_gaussians(a, b);

    // BC = E_a sqrt(q_b / q_a)
    GaussianDensity da(a), db(b);
    std::mt19937_64 eng = make_engine(777);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec x = da.sample(eng);
        double w = std::exp(0.5 * (db.log_density(x) - da.log_density(x)));
        sum += w;
        sum_sq += w * w;
    }
    double bc = sum / n;
    double se = std::sqrt((sum_sq / n - bc * bc) / n);
    CHECK(std::abs((1.0 - h * h) - bc) < 4.0 * se);
}

TEST_CASE("hellinger requires matching dimensions", "[gaussian]") {
    CHECK_THROWS_AS(hellinger_gaussians(make_spec({0.0}, {1.0}),
                                        make_spec({0.0, 0.0}, {1.0, 0.0, 0.0, 1.0})),
                    InvalidParameter);
}

TEST_CASE("density evaluation matches the quadratic form", "[gaussian]") {
    GaussianSpec spec = make_spec({1.0, 2.0}, {2.0, 0.5, 0.5, 1.0});
    GaussianDensity density(spec);
    // det = 1.75; inverse = [[1, -0.5], [-0.5, 2]] / 1.75 * ... solve directly
    Vec x{1.5, 1.0};
    Vec diff{0.5, -1.0};
    Mat inv(2);
    double det = 2.0 * 1.0 - 0.5 * 0.5;
    inv(0, 0) = 1.0 / det;
    inv(0, 1) = -0.5 / det;
    inv(1, 0) = -0.5 / det;
    inv(1, 1) = 2.0 / det;
    double quad = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            quad += diff[static_cast<std::size_t>(i)] * inv(i, j) * diff[static_cast<std::size_t>(j)];
    double want = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * quad;
    CHECK(density.log_density(x) == Catch::Approx(want).margin(1e-12));
    CHECK(density.log_det_cov() == Catch::Approx(std::log(det)).margin(1e-12));
}

TEST_CASE("sampling reproduces mean and covariance", "[gaussian]") {
    GaussianSpec spec = make_spec({3.0, -1.0}, {2.0, 0.8, 0.8, 1.5});
    GaussianDensity density(spec);
    std::mt19937_64 eng = make_engine(42);
    const int n = 200000;
    Vec mean(2, 0.0);
    Mat cov(2);
    std::vector<Vec> draws;
    draws.reserve(n);
    for (int i = 0; i < n; ++i) {
        draws.push_back(density.sample(eng));
        for (int j = 0; j < 2; ++j) mean[static_cast<std::size_t>(j)] += draws.back()[static_cast<std::size_t>(j)];
    }
    for (double& v : mean) v /= n;
    for (const Vec& x : draws)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                cov(i, j) += (x[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)]) *
                             (x[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)]);
    for (double& v : cov.a) v /= n - 1;
    for (int i = 0; i < 2; ++i) {
        double se = std::sqrt(spec.cov(i, i) / n);
        CHECK(std::abs(mean[static_cast<std::size_t>(i)] - spec.mean[static_cast<std::size_t>(i)]) < 4.0 * se);
        for (int j = 0; j < 2; ++j)
            CHECK(cov(i, j) == Catch::Approx(spec.cov(i, j)).margin(0.05));
    }
}
