#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "nmgauss/errors.hpp"
#include "nmgauss/linalg.hpp"

namespace nmgauss {

using LatticePoint = std::vector<long long>;

// Negative multinomial model: d count coordinates, real stopping weight
// r > 0, success probabilities p with p0 = 1 - sum(p) > 0.
struct ModelParams {
    int d = 0;
    double r = 0.0;
    Vec p;
};

struct DerivedParams {
    double p0 = 0.0;
    Vec rho;            // odds p_i / p0
    Vec mean;           // r * rho
    Mat sigma;          // diag(rho) + rho rho^T
    Mat sigma_inv;      // diag(1/rho) - p0 * ones
    double log_det_sigma = 0.0; // sum log rho_i - log p0
};

inline void validate(const ModelParams& params) {
    if (params.d < 1)
        throw InvalidParameter("model: d must be >= 1");
    if (params.p.size() != static_cast<std::size_t>(params.d))
        throw InvalidParameter("model: p must have exactly d entries");
    if (!(params.r > 0.0) || !std::isfinite(params.r))
        throw InvalidParameter("model: r must be a positive finite real");
    double sum = 0.0;
    for (double pi : params.p) {
        if (!(pi > 0.0) || !std::isfinite(pi))
            throw InvalidParameter("model: every p_i must be positive and finite");
        sum += pi;
    }
    // p0 must be bounded away from 0 or every derived quantity blows up
    if (sum >= 1.0 - 1e-12)
        throw InvalidParameter("model: sum(p) must stay below 1 - 1e-12");
}

inline DerivedParams derive(const ModelParams& params) {
    validate(params);
    const int d = params.d;
    DerivedParams out;
    double sum = 0.0;
    for (double pi : params.p) sum += pi;
    out.p0 = 1.0 - sum;
    out.rho.resize(static_cast<std::size_t>(d));
    out.mean.resize(static_cast<std::size_t>(d));
    out.sigma = Mat(d);
    out.sigma_inv = Mat(d);
    double log_det = -std::log(out.p0);
    for (int i = 0; i < d; ++i) {
        double rho_i = params.p[static_cast<std::size_t>(i)] / out.p0;
        out.rho[static_cast<std::size_t>(i)] = rho_i;
        out.mean[static_cast<std::size_t>(i)] = params.r * rho_i;
        log_det += std::log(rho_i);
    }
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double v = out.rho[static_cast<std::size_t>(i)] * out.rho[static_cast<std::size_t>(j)];
            if (i == j) v += out.rho[static_cast<std::size_t>(i)];
            out.sigma(i, j) = v;
            out.sigma_inv(i, j) = (i == j ? 1.0 / out.rho[static_cast<std::size_t>(i)] : 0.0) - out.p0;
        }
    }
    out.log_det_sigma = log_det;
    return out;
}

// Coordinate i of a negative multinomial is negative binomial with the same
// r and success probability q = p_i / (p_i + p0).
inline std::pair<double, double> marginal_params(const ModelParams& params, int i) {
    validate(params);
    if (i < 0 || i >= params.d)
        throw InvalidParameter("marginal_params: coordinate out of range");
    double pi = params.p[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (double v : params.p) sum += v;
    double p0 = 1.0 - sum;
    return {params.r, pi / (pi + p0)};
}

// Width parameter of the central lattice region where the expansion applies.
struct BulkSpec {
    double gamma = 1.0;
};

inline void validate(const BulkSpec& spec) {
    if (!(spec.gamma > 0.0) || !std::isfinite(spec.gamma))
        throw InvalidParameter("bulk: gamma must be a positive finite real");
}

} // namespace nmgauss
