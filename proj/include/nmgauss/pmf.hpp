#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "nmgauss/errors.hpp"
#include "nmgauss/model.hpp"

namespace nmgauss {

// Precomputed constants for repeated pmf evaluation at fixed (r, p).
struct PmfEval {
    double r = 0.0;
    double lp0 = 0.0;
    Vec lrho;
    double lgamma_r = 0.0;

    PmfEval() = default;
    PmfEval(const ModelParams& params, const DerivedParams& derived)
        : r(params.r), lp0(std::log(derived.p0)), lgamma_r(std::lgamma(params.r)) {
        lrho.reserve(derived.rho.size());
        for (double v : derived.rho) lrho.push_back(std::log(v));
    }

    // log P(k) = lgamma(r+K) - lgamma(r) - sum lgamma(k_i+1)
    //           + (r+K) log p0 + sum k_i log rho_i,   K = ||k||_1
    double operator()(const LatticePoint& k) const {
        double big_k = 0.0;
        double lfact = 0.0;
        double lodds = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (k[i] < 0) throw InvalidParameter("log_pmf: lattice point has a negative coordinate");
            double ki = static_cast<double>(k[i]);
            big_k += ki;
            lfact += std::lgamma(ki + 1.0);
            lodds += ki * lrho[i];
        }
        return std::lgamma(r + big_k) - lgamma_r - lfact + (r + big_k) * lp0 + lodds;
    }

    // One-step ratio along axis i: log P(k + e_i) - log P(k).
    double step(double big_k, long long ki, std::size_t i) const {
        return lrho[i] + lp0 + std::log(r + big_k) - std::log(static_cast<double>(ki) + 1.0);
    }
};

inline double log_pmf(const ModelParams& params, const LatticePoint& k) {
    DerivedParams derived = derive(params);
    if (k.size() != static_cast<std::size_t>(params.d))
        throw InvalidParameter("log_pmf: lattice point has wrong dimension");
    return PmfEval(params, derived)(k);
}

inline double log_pmf(const ModelParams& params, const DerivedParams& derived,
                      const LatticePoint& k) {
    if (k.size() != static_cast<std::size_t>(params.d))
        throw InvalidParameter("log_pmf: lattice point has wrong dimension");
    return PmfEval(params, derived)(k);
}

// Total pmf mass over the box [0, box_limit]^d, accumulated in extended
// precision. The summand count is guarded so a careless box/d combination
// fails fast instead of running for hours.
inline double truncated_total_mass(const ModelParams& params, long long box_limit,
                                   std::uint64_t summand_budget = 4000000000ULL) {
    DerivedParams derived = derive(params);
    if (box_limit < 0) throw InvalidParameter("truncated_total_mass: box_limit must be >= 0");
    const int d = params.d;
    double count = std::pow(static_cast<double>(box_limit) + 1.0, d);
    if (count > static_cast<double>(summand_budget))
        throw BudgetExceeded("truncated_total_mass: box of " + std::to_string(count) +
                             " summands exceeds budget");
    PmfEval eval(params, derived);
    long double mass = 0.0L;
    LatticePoint k(static_cast<std::size_t>(d), 0);
    for (;;) {
        // walk the last axis with the one-step recurrence
        double lp = eval(k);
        double big_k = 0.0;
        for (long long v : k) big_k += static_cast<double>(v);
        for (long long last = 0;; ++last) {
            mass += std::exp(static_cast<long double>(lp));
            if (last == box_limit) break;
            lp += eval.step(big_k, last, static_cast<std::size_t>(d - 1));
            big_k += 1.0;
        }
        // odometer over the leading d-1 axes
        int axis = d - 2;
        while (axis >= 0 && k[static_cast<std::size_t>(axis)] == box_limit) {
            k[static_cast<std::size_t>(axis)] = 0;
            --axis;
        }
        if (axis < 0) break;
        ++k[static_cast<std::size_t>(axis)];
    }
    return static_cast<double>(mass);
}

} // namespace nmgauss
