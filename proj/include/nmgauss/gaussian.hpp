#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include "nmgauss/errors.hpp"
#include "nmgauss/linalg.hpp"
#include "nmgauss/model.hpp"

namespace nmgauss {

// A full multivariate normal N(mean, cov). Validation requires a symmetric
// (to 1e-12, scaled) positive definite covariance.
struct GaussianSpec {
    Vec mean;
    Mat cov;
};

inline void validate(const GaussianSpec& spec) {
    if (spec.cov.n < 1 || spec.mean.size() != static_cast<std::size_t>(spec.cov.n))
        throw InvalidParameter("gaussian: mean and covariance dimensions disagree");
    double scale = 1.0;
    for (double v : spec.cov.a) scale = std::max(scale, std::abs(v));
    if (max_asymmetry(spec.cov) > 1e-12 * scale)
        throw InvalidParameter("gaussian: covariance is not symmetric");
    cholesky(spec.cov); // throws NumericFailure if not positive definite
}

// Cached factorization for repeated density evaluation and sampling.
class GaussianDensity {
public:
    explicit GaussianDensity(const GaussianSpec& spec) : mean_(spec.mean) {
        validate(spec);
        chol_ = cholesky(spec.cov);
        const double d = static_cast<double>(spec.cov.n);
        log_norm_ = -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * chol_.log_det();
    }

    int dim() const { return chol_.n; }
    const Vec& mean() const { return mean_; }
    double log_det_cov() const { return chol_.log_det(); }

    double log_density(const Vec& x) const {
        Vec diff(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - mean_[i];
        return log_norm_ - 0.5 * chol_.quad_inv(diff);
    }

    Vec sample(std::mt19937_64& eng) const {
        std::normal_distribution<double> normal(0.0, 1.0);
        Vec z(static_cast<std::size_t>(chol_.n));
        for (double& v : z) v = normal(eng);
        Vec x = chol_.apply_l(z);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += mean_[i];
        return x;
    }

private:
    Vec mean_;
    Chol chol_;
    double log_norm_ = 0.0;
};

// Hellinger distance between two Gaussians, closed form:
//   1 - H^2 = det(Sa)^{1/4} det(Sb)^{1/4} / det(M)^{1/2}
//             * exp(-(1/8) (mu_a - mu_b)^T M^{-1} (mu_a - mu_b)),  M = (Sa+Sb)/2.
inline double hellinger_gaussians(const GaussianSpec& a, const GaussianSpec& b) {
    validate(a);
    validate(b);
    if (a.cov.n != b.cov.n)
        throw InvalidParameter("hellinger_gaussians: dimension mismatch");
    const int n = a.cov.n;
    Mat m(n);
    for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] = 0.5 * (a.cov.a[i] + b.cov.a[i]);
    Chol ca = cholesky(a.cov);
    Chol cb = cholesky(b.cov);
    Chol cm = cholesky(m);
    Vec diff(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        diff[static_cast<std::size_t>(i)] =
            a.mean[static_cast<std::size_t>(i)] - b.mean[static_cast<std::size_t>(i)];
    double log_bc = 0.25 * (ca.log_det() + cb.log_det()) - 0.5 * cm.log_det()
                    - 0.125 * cm.quad_inv(diff);
    double h2 = 1.0 - std::exp(log_bc);
    return std::sqrt(std::max(h2, 0.0));
}

} // namespace nmgauss
