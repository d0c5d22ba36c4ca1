#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nmgauss/errors.hpp"
#include "nmgauss/expansion.hpp"
#include "nmgauss/model.hpp"
#include "nmgauss/pmf.hpp"

namespace nmgauss {

// 1-based coordinate indices of a central moment E(delta_i delta_j ...),
// order 1 through 4.
struct MomentIndex {
    std::vector<int> indices;
};

inline void validate(const MomentIndex& idx, int d) {
    if (idx.indices.empty() || idx.indices.size() > 4)
        throw InvalidParameter("moment index: order must be between 1 and 4");
    for (int i : idx.indices)
        if (i < 1 || i > d)
            throw InvalidParameter("moment index: coordinate out of range [1, d]");
}

// Closed-form central moments of the standardized deviations:
//   order 1: 0
//   order 2: rho_i 1{i=j} + rho_i rho_j
//   order 3: r^{-1/2} (2 rho_i rho_j rho_l + 1{i=j} rho_i rho_l
//            + 1{j=l} rho_i rho_j + 1{i=l} rho_j rho_l + 1{i=j=l} rho_i)
//   order 4, pure (i,i,i,i) only: 3 rho_i^2 (1+rho_i)^2, the leading term;
//            the O(1/r) remainder is not part of the returned value.
inline double central_moment_formula(const DerivedParams& derived, double r,
                                     const MomentIndex& idx) {
    validate(idx, static_cast<int>(derived.rho.size()));
    const auto& ix = idx.indices;
    auto rho = [&](int one_based) { return derived.rho[static_cast<std::size_t>(one_based - 1)]; };
    switch (ix.size()) {
    case 1:
        return 0.0;
    case 2:
        return (ix[0] == ix[1] ? rho(ix[0]) : 0.0) + rho(ix[0]) * rho(ix[1]);
    case 3: {
        double v = 2.0 * rho(ix[0]) * rho(ix[1]) * rho(ix[2]);
        if (ix[0] == ix[1]) v += rho(ix[0]) * rho(ix[2]);
        if (ix[1] == ix[2]) v += rho(ix[0]) * rho(ix[1]);
        if (ix[0] == ix[2]) v += rho(ix[1]) * rho(ix[2]);
        if (ix[0] == ix[1] && ix[1] == ix[2]) v += rho(ix[0]);
        return v / std::sqrt(r);
    }
    default:
        if (!(ix[0] == ix[1] && ix[1] == ix[2] && ix[2] == ix[3]))
            throw InvalidParameter(
                "central_moment_formula: mixed fourth-order moments have no closed form here");
        double rho_i = rho(ix[0]);
        return 3.0 * rho_i * rho_i * (1.0 + rho_i) * (1.0 + rho_i);
    }
}

namespace detail {

// Shared truncated sweep: sum of [product of delta factors] * P(k) over
// [0, box_limit]^d, optionally restricted to the central region. An empty
// index list gives plain truncated mass of the (restricted) event.
inline long double moment_sweep(const ModelParams& params, const DerivedParams& derived,
                                const std::vector<int>& indices, long long box_limit,
                                const std::optional<BulkSpec>& event,
                                std::uint64_t summand_budget = 4000000000ULL) {
    const int d = params.d;
    double count = std::pow(static_cast<double>(box_limit) + 1.0, d);
    if (count > static_cast<double>(summand_budget))
        throw BudgetExceeded("moment sweep: box of " + std::to_string(count) +
                             " summands exceeds budget");
    PmfEval eval(params, derived);
    const double sqrt_r = std::sqrt(params.r);
    long double total = 0.0L;
    LatticePoint k(static_cast<std::size_t>(d), 0);
    Vec delta(static_cast<std::size_t>(d));
    for (;;) {
        double lp = eval(k);
        double big_k = 0.0;
        for (long long v : k) big_k += static_cast<double>(v);
        for (long long last = 0;; ++last) {
            k[static_cast<std::size_t>(d - 1)] = last;
            bool keep = true;
            if (event) {
                StandardizedDeviation dev = standardize(derived, params.r, k);
                keep = in_bulk(derived, params.r, *event, dev);
            }
            if (keep) {
                for (int i = 0; i < d; ++i)
                    delta[static_cast<std::size_t>(i)] =
                        (static_cast<double>(k[static_cast<std::size_t>(i)]) -
                         params.r * derived.rho[static_cast<std::size_t>(i)]) / sqrt_r;
                double factor = 1.0;
                for (int ix : indices) factor *= delta[static_cast<std::size_t>(ix - 1)];
                total += static_cast<long double>(factor) *
                         std::exp(static_cast<long double>(lp));
            }
            if (last == box_limit) break;
            lp += eval.step(big_k, last, static_cast<std::size_t>(d - 1));
            big_k += 1.0;
        }
        k[static_cast<std::size_t>(d - 1)] = 0;
        int axis = d - 2;
        while (axis >= 0 && k[static_cast<std::size_t>(axis)] == box_limit) {
            k[static_cast<std::size_t>(axis)] = 0;
            --axis;
        }
        if (axis < 0) break;
        ++k[static_cast<std::size_t>(axis)];
    }
    return total;
}

// Chernoff bound on the marginal tail P(k_i > m): the marginal is negative
// binomial with success probability q = rho / (1 + rho); the optimal tilt is
// z* = m / (q (r + m)), giving exp{r ln(1-q) - r ln(r/(r+m)) - m ln z*}.
inline double nb_tail_chernoff(double r, double rho, double m) {
    const double q = rho / (1.0 + rho);
    if (m <= r * rho) return 1.0; // bound is vacuous at or below the mean
    const double z = m / (q * (r + m));
    return std::exp(r * std::log1p(-q) - r * std::log(r / (r + m)) - m * std::log(z));
}

} // namespace detail

inline double brute_force_moment(const ModelParams& params, const MomentIndex& idx,
                                 long long box_limit,
                                 const std::optional<BulkSpec>& event = std::nullopt) {
    DerivedParams derived = derive(params);
    validate(idx, params.d);
    return static_cast<double>(
        detail::moment_sweep(params, derived, idx.indices, box_limit, event));
}

// Default truncation box: per-coordinate r rho_i + 12 sd_i rounded up, taken
// as a single scalar limit, then doubled until the leftover mass times the
// largest fourth-power delta monomial on the box is below 1e-8. This makes
// truncation error provably negligible against the 1e-6 comparison tolerance.
// The leftover mass is bounded analytically (sum of marginal Chernoff tails)
// rather than by 1 - summed mass: the summed mass saturates at the double
// roundoff floor (~1e-15), below which the measured tail says nothing while
// the delta monomial keeps growing with the box.
inline long long default_moment_box(const ModelParams& params) {
    DerivedParams derived = derive(params);
    long long box = 0;
    for (std::size_t i = 0; i < derived.rho.size(); ++i) {
        double sd = std::sqrt(params.r * derived.rho[i] * (1.0 + derived.rho[i]));
        box = std::max(box, static_cast<long long>(
                                std::ceil(params.r * derived.rho[i] + 12.0 * sd)));
    }
    for (int attempt = 0; attempt < 8; ++attempt) {
        double tail = 0.0;
        double worst_delta = 0.0;
        for (std::size_t i = 0; i < derived.rho.size(); ++i) {
            double mu = params.r * derived.rho[i];
            tail += detail::nb_tail_chernoff(params.r, derived.rho[i],
                                             static_cast<double>(box));
            worst_delta = std::max(
                worst_delta,
                std::max(mu, static_cast<double>(box) - mu) / std::sqrt(params.r));
        }
        double monomial = std::pow(worst_delta, 4.0);
        if (tail * monomial < 1e-8) return box;
        box *= 2;
    }
    throw NumericFailure("default_moment_box: tail criterion not reached after doubling");
}

// Truncated-moment inequality: |E(delta-product restricted to the central
// region) - closed-form main term| against the order-dependent right side
// built from the mass outside the region.
struct MomentBoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

inline MomentBoundCheck truncated_moment_bound_check(const ModelParams& params,
                                                     const MomentIndex& idx,
                                                     const BulkSpec& spec,
                                                     long long box_limit) {
    DerivedParams derived = derive(params);
    validate(idx, params.d);
    const std::size_t order = idx.indices.size();
    if (order > 3)
        throw InvalidParameter("truncated_moment_bound_check: orders 1 to 3 only");
    validate(spec);
    // the central region must fit inside the summation box for the
    // complement mass computed below to be exact
    LatticePoint lo, hi;
    bulk_box(derived, params.r, spec.gamma, lo, hi);
    for (long long h : hi)
        if (h > box_limit)
            throw InvalidParameter(
                "truncated_moment_bound_check: box_limit does not cover the central region");

    double restricted = static_cast<double>(
        detail::moment_sweep(params, derived, idx.indices, box_limit, spec));
    double mass_in = static_cast<double>(
        detail::moment_sweep(params, derived, {}, box_limit, spec));
    double complement = std::max(0.0, 1.0 - mass_in);

    double main_term = central_moment_formula(derived, params.r, idx);
    MomentBoundCheck out;
    out.lhs = std::abs(restricted - main_term);
    const double p0 = derived.p0;
    if (order == 1)
        out.rhs = std::sqrt(complement) / p0;
    else if (order == 2)
        out.rhs = 2.0 * std::sqrt(complement) / (p0 * p0);
    else
        out.rhs = 4.0 * std::pow(complement, 0.25) / (p0 * p0 * p0);
    out.holds = out.lhs <= out.rhs + 1e-12;
    return out;
}

} // namespace nmgauss
