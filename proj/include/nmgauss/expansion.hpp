#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "nmgauss/errors.hpp"
#include "nmgauss/model.hpp"
#include "nmgauss/parallel.hpp"
#include "nmgauss/pmf.hpp"
#include "nmgauss/rng.hpp"

namespace nmgauss {

struct StandardizedDeviation {
    Vec delta;
    double l1_norm = 0.0;
};

inline StandardizedDeviation standardize(const DerivedParams& derived, double r,
                                         const LatticePoint& k) {
    StandardizedDeviation out;
    out.delta.resize(k.size());
    const double sqrt_r = std::sqrt(r);
    for (std::size_t i = 0; i < k.size(); ++i) {
        out.delta[i] = (static_cast<double>(k[i]) - r * derived.rho[i]) / sqrt_r;
        out.l1_norm += std::abs(out.delta[i]);
    }
    return out;
}

// Central region: max_i |delta_i / (sqrt(r) rho_i)| <= gamma r^{-1/3}
// and |sum_i delta_i * p0 / sqrt(r)| <= gamma r^{-1/3}. Boundary points
// (equality) are inside.
inline bool in_bulk(const DerivedParams& derived, double r, const BulkSpec& spec,
                    const StandardizedDeviation& dev) {
    const double threshold = spec.gamma * std::pow(r, -1.0 / 3.0);
    const double sqrt_r = std::sqrt(r);
    double sum = 0.0;
    for (std::size_t i = 0; i < dev.delta.size(); ++i) {
        if (std::abs(dev.delta[i] / (sqrt_r * derived.rho[i])) > threshold) return false;
        sum += dev.delta[i];
    }
    return std::abs(sum * derived.p0 / sqrt_r) <= threshold;
}

inline bool in_bulk(const DerivedParams& derived, double r, const BulkSpec& spec,
                    const LatticePoint& k) {
    return in_bulk(derived, r, spec, standardize(derived, r, k));
}

// Smallest box of lattice points containing the central region:
// k_i in [r rho_i - gamma rho_i r^{2/3}, r rho_i + gamma rho_i r^{2/3}],
// clipped to k_i >= 0.
inline void bulk_box(const DerivedParams& derived, double r, double gamma,
                     LatticePoint& lo, LatticePoint& hi) {
    const double r23 = std::pow(r, 2.0 / 3.0);
    lo.resize(derived.rho.size());
    hi.resize(derived.rho.size());
    for (std::size_t i = 0; i < derived.rho.size(); ++i) {
        double center = r * derived.rho[i];
        double halfwidth = gamma * derived.rho[i] * r23;
        lo[i] = std::max(0LL, static_cast<long long>(std::ceil(center - halfwidth)));
        hi[i] = static_cast<long long>(std::floor(center + halfwidth));
    }
}

// ln of the matched local Gaussian density r^{-d/2} phi_Sigma(delta), using
// the closed-form inverse: delta^T Sigma^{-1} delta
//   = sum delta_i^2 / rho_i - p0 (sum delta_i)^2.
inline double gaussian_local_log_density(const DerivedParams& derived, double r,
                                         const StandardizedDeviation& dev) {
    const double d = static_cast<double>(derived.rho.size());
    double quad = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < dev.delta.size(); ++i) {
        quad += dev.delta[i] * dev.delta[i] / derived.rho[i];
        sum += dev.delta[i];
    }
    quad -= derived.p0 * sum * sum;
    return -0.5 * d * std::log(2.0 * std::numbers::pi * r) - 0.5 * derived.log_det_sigma
           - 0.5 * quad;
}

// First correction term, order r^{-1/2}:
//   F = -(1/2) sum_i delta_i (1/rho_i + p0)
//       + (1/6) { sum_i delta_i^3 / rho_i^2 - p0^2 (sum_i delta_i)^3 }.
// The cubic triple sum collapses to the two O(d) pieces above.
inline double correction_F(const DerivedParams& derived, const StandardizedDeviation& dev) {
    double linear = 0.0;
    double cubic_diag = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < dev.delta.size(); ++i) {
        double di = dev.delta[i];
        double rho_i = derived.rho[i];
        linear += di * (1.0 / rho_i + derived.p0);
        cubic_diag += di * di * di / (rho_i * rho_i);
        sum += di;
    }
    return -0.5 * linear + (cubic_diag - derived.p0 * derived.p0 * sum * sum * sum) / 6.0;
}

// Second correction term, order r^{-1}:
//   S = (1/12)(p0 - 1 - sum_i 1/rho_i)
//       + (1/4) { sum_i delta_i^2 / rho_i^2 + p0^2 (sum_i delta_i)^2 }
//       - (1/12) { sum_i delta_i^4 / rho_i^3 - p0^3 (sum_i delta_i)^4 }.
inline double correction_S(const DerivedParams& derived, const StandardizedDeviation& dev) {
    double inv_rho_sum = 0.0;
    double quad_diag = 0.0;
    double quart_diag = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < dev.delta.size(); ++i) {
        double di = dev.delta[i];
        double rho_i = derived.rho[i];
        inv_rho_sum += 1.0 / rho_i;
        quad_diag += di * di / (rho_i * rho_i);
        quart_diag += di * di * di * di / (rho_i * rho_i * rho_i);
        sum += di;
    }
    const double p0 = derived.p0;
    double constant = (p0 - 1.0 - inv_rho_sum) / 12.0;
    double quadratic = 0.25 * (quad_diag + p0 * p0 * sum * sum);
    double quartic = (quart_diag - p0 * p0 * p0 * sum * sum * sum * sum) / 12.0;
    return constant + quadratic - quartic;
}

struct ExpansionEval {
    double log_ratio_exact = 0.0;
    double f_term = 0.0;
    double s_term = 0.0;
    double residual = 0.0;
};

// Exact log pmf-to-Gaussian ratio and its residual after removing the
// F/sqrt(r) and S/r corrections. Points outside the central region raise an
// advisory error unless the caller forces evaluation.
inline ExpansionEval evaluate_expansion(const ModelParams& params, const BulkSpec& spec,
                                        const LatticePoint& k, bool force_out_of_bulk = false) {
    validate(spec);
    DerivedParams derived = derive(params);
    if (k.size() != static_cast<std::size_t>(params.d))
        throw InvalidParameter("evaluate_expansion: lattice point has wrong dimension");
    StandardizedDeviation dev = standardize(derived, params.r, k);
    if (!force_out_of_bulk && !in_bulk(derived, params.r, spec, dev))
        throw OutOfBulk("evaluate_expansion: point outside the central region; "
                        "pass force_out_of_bulk to evaluate anyway");
    ExpansionEval out;
    out.log_ratio_exact = log_pmf(params, derived, k)
                          - gaussian_local_log_density(derived, params.r, dev);
    out.f_term = correction_F(derived, dev);
    out.s_term = correction_S(derived, dev);
    out.residual = out.log_ratio_exact - out.f_term / std::sqrt(params.r)
                   - out.s_term / params.r;
    if (!std::isfinite(out.residual))
        throw NumericFailure("evaluate_expansion: non-finite residual");
    return out;
}

// One pass over the central region. Tracks the worst raw residual, the worst
// residual normalized by (1 + ||delta||_1^5), and the normalized variants
// with S (resp. F and S) omitted, which isolate the order of each term.
struct ResidualScan {
    std::uint64_t n_points = 0;
    double max_abs = 0.0;
    double max_norm = 0.0;
    double max_norm_no_s = 0.0;
    double max_norm_none = 0.0;
    LatticePoint argmax_norm;
};

namespace detail {

struct ScanAccum {
    std::uint64_t n = 0;
    double max_abs = 0.0;
    double max_norm = 0.0;
    double max_norm_no_s = 0.0;
    double max_norm_none = 0.0;
    LatticePoint argmax;
};

inline void scan_point(const ModelParams& params, const DerivedParams& derived,
                       const PmfEval& eval, const BulkSpec& spec, const LatticePoint& k,
                       ScanAccum& acc) {
    StandardizedDeviation dev = standardize(derived, params.r, k);
    if (!in_bulk(derived, params.r, spec, dev)) return;
    double log_ratio = eval(k) - gaussian_local_log_density(derived, params.r, dev);
    double f = correction_F(derived, dev);
    double s = correction_S(derived, dev);
    double sqrt_r = std::sqrt(params.r);
    double res = log_ratio - f / sqrt_r - s / params.r;
    double res_no_s = log_ratio - f / sqrt_r;
    double weight = 1.0 + dev.l1_norm * dev.l1_norm * dev.l1_norm * dev.l1_norm * dev.l1_norm;
    acc.n += 1;
    acc.max_abs = std::max(acc.max_abs, std::abs(res));
    double norm = std::abs(res) / weight;
    if (norm > acc.max_norm) {
        acc.max_norm = norm;
        acc.argmax = k;
    }
    acc.max_norm_no_s = std::max(acc.max_norm_no_s, std::abs(res_no_s) / weight);
    acc.max_norm_none = std::max(acc.max_norm_none, std::abs(log_ratio) / weight);
}

} // namespace detail

inline ResidualScan residual_scan(const ModelParams& params, const BulkSpec& spec,
                                  unsigned threads = 0,
                                  std::uint64_t subsample_budget = 100000,
                                  std::uint64_t seed = 20240901) {
    validate(spec);
    DerivedParams derived = derive(params);
    PmfEval eval(params, derived);
    LatticePoint lo, hi;
    bulk_box(derived, params.r, spec.gamma, lo, hi);
    const int d = params.d;

    double box_count = 1.0;
    for (int i = 0; i < d; ++i)
        box_count *= static_cast<double>(hi[static_cast<std::size_t>(i)] -
                                         lo[static_cast<std::size_t>(i)] + 1);

    ResidualScan out;
    const bool subsample = d >= 3 && box_count > static_cast<double>(subsample_budget);
    if (subsample) {
        // fixed-budget seeded uniform draw from the box; one deterministic pass
        std::mt19937_64 eng = make_engine(seed);
        detail::ScanAccum acc;
        LatticePoint k(static_cast<std::size_t>(d));
        for (std::uint64_t s = 0; s < subsample_budget; ++s) {
            for (int i = 0; i < d; ++i) {
                auto span = static_cast<std::uint64_t>(hi[static_cast<std::size_t>(i)] -
                                                       lo[static_cast<std::size_t>(i)] + 1);
                k[static_cast<std::size_t>(i)] =
                    lo[static_cast<std::size_t>(i)] + static_cast<long long>(eng() % span);
            }
            detail::scan_point(params, derived, eval, spec, k, acc);
        }
        out.n_points = acc.n;
        out.max_abs = acc.max_abs;
        out.max_norm = acc.max_norm;
        out.max_norm_no_s = acc.max_norm_no_s;
        out.max_norm_none = acc.max_norm_none;
        out.argmax_norm = acc.argmax;
        return out;
    }

    // full enumeration: rows = all-but-last axes, chunks of whole rows
    std::uint64_t n_rows = 1;
    for (int i = 0; i + 1 < d; ++i)
        n_rows *= static_cast<std::uint64_t>(hi[static_cast<std::size_t>(i)] -
                                             lo[static_cast<std::size_t>(i)] + 1);
    constexpr std::uint64_t kRowsPerChunk = 64;
    const std::uint64_t n_chunks = (n_rows + kRowsPerChunk - 1) / kRowsPerChunk;
    std::vector<detail::ScanAccum> partials(n_chunks);
    parallel_chunks(n_chunks, threads, [&](std::size_t c) {
        detail::ScanAccum& acc = partials[c];
        LatticePoint k(static_cast<std::size_t>(d));
        const std::uint64_t row_lo = static_cast<std::uint64_t>(c) * kRowsPerChunk;
        const std::uint64_t row_hi = std::min(n_rows, row_lo + kRowsPerChunk);
        for (std::uint64_t row = row_lo; row < row_hi; ++row) {
            std::uint64_t rem = row;
            for (int i = d - 2; i >= 0; --i) {
                auto span = static_cast<std::uint64_t>(hi[static_cast<std::size_t>(i)] -
                                                       lo[static_cast<std::size_t>(i)] + 1);
                k[static_cast<std::size_t>(i)] =
                    lo[static_cast<std::size_t>(i)] + static_cast<long long>(rem % span);
                rem /= span;
            }
            for (long long last = lo[static_cast<std::size_t>(d - 1)];
                 last <= hi[static_cast<std::size_t>(d - 1)]; ++last) {
                k[static_cast<std::size_t>(d - 1)] = last;
                detail::scan_point(params, derived, eval, spec, k, acc);
            }
        }
    });
    detail::ScanAccum total;
    for (const auto& acc : partials) {
        total.n += acc.n;
        total.max_abs = std::max(total.max_abs, acc.max_abs);
        if (acc.max_norm > total.max_norm) {
            total.max_norm = acc.max_norm;
            total.argmax = acc.argmax;
        }
        total.max_norm_no_s = std::max(total.max_norm_no_s, acc.max_norm_no_s);
        total.max_norm_none = std::max(total.max_norm_none, acc.max_norm_none);
    }
    out.n_points = total.n;
    out.max_abs = total.max_abs;
    out.max_norm = total.max_norm;
    out.max_norm_no_s = total.max_norm_no_s;
    out.max_norm_none = total.max_norm_none;
    out.argmax_norm = total.argmax;
    return out;
}

} // namespace nmgauss
