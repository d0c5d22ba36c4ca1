#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nmgauss/divergence.hpp"
#include "nmgauss/errors.hpp"
#include "nmgauss/gaussian.hpp"
#include "nmgauss/model.hpp"
#include "nmgauss/pmf.hpp"
#include "nmgauss/sampling.hpp"

namespace nmgauss {

// ---------------------------------------------------------------------------
// Transport kernels
// ---------------------------------------------------------------------------

// Lattice -> continuum: independent uniform jitter on the unit cell around k.
// Exposed with both a sampling form and a density form.
struct JitterKernel {
    Vec sample(const LatticePoint& k, std::uint64_t seed) const { return jitter(k, seed); }
    Vec sample(const LatticePoint& k, std::mt19937_64& eng) const {
        return jitter_with_engine(k, eng);
    }
    // uniform density on the open cell (k - 1/2, k + 1/2)^d
    double density(const LatticePoint& k, const Vec& x) const {
        if (x.size() != k.size())
            throw InvalidParameter("jitter kernel: dimension mismatch");
        for (std::size_t i = 0; i < k.size(); ++i)
            if (!(std::abs(x[i] - static_cast<double>(k[i])) < 0.5)) return 0.0;
        return 1.0;
    }
};

inline Vec kernel_T1_star(const LatticePoint& k, std::uint64_t seed) {
    return JitterKernel{}.sample(k, seed);
}

// Continuum -> lattice: componentwise nearest integer (ties to even), with
// negative results clamped to 0 so the output is a valid count vector.
inline LatticePoint kernel_T2_star(const Vec& x) {
    LatticePoint k = round_to_lattice(x);
    for (long long& v : k) v = std::max(v, 0LL);
    return k;
}

// ---------------------------------------------------------------------------
// Experiment families over a parameter set
// ---------------------------------------------------------------------------

enum class FamilyKind {
    negative_multinomial, // the count experiment itself
    gaussian_matched,     // N(r rho, r Sigma)
    gaussian_diagonal,    // N(r rho, r diag(rho))
    gaussian_stabilized   // N(sqrt(r rho), diag(1/4))
};

inline const char* family_name(FamilyKind k) {
    switch (k) {
    case FamilyKind::negative_multinomial: return "counts";
    case FamilyKind::gaussian_matched: return "gaussian-matched";
    case FamilyKind::gaussian_diagonal: return "gaussian-diagonal";
    default: return "gaussian-stabilized";
    }
}

// Finite parameter grid inside the constraint min(p0, ..., p_d) >= b.
struct ParameterSet {
    double b = 0.0;
    std::vector<ModelParams> grid;
};

inline void validate(const ParameterSet& set) {
    if (!(set.b > 0.0) || !(set.b < 1.0))
        throw InvalidParameter("parameter set: b must lie in (0, 1)");
    if (set.grid.empty())
        throw InvalidParameter("parameter set: grid must be non-empty");
    for (const ModelParams& params : set.grid) {
        DerivedParams derived = derive(params);
        double min_p = derived.p0;
        for (double pi : params.p) min_p = std::min(min_p, pi);
        if (min_p < set.b - 1e-12)
            throw InvalidParameter("parameter set: grid member violates min(p0..pd) >= b");
    }
}

// Default grid for d = 1: p linearly spaced on [b, 1/2], which covers the
// small-p corner where the constants degrade. For d = 2 the grid runs along
// the symmetric ray p1 = p2.
inline ParameterSet make_theta_grid(int d, double b, int n_points, double r) {
    if (d < 1 || d > 2)
        throw InvalidParameter("make_theta_grid: d must be 1 or 2");
    if (n_points < 1)
        throw InvalidParameter("make_theta_grid: need at least one grid point");
    if (!(b > 0.0) || !(b < 1.0 / (d + 1.0)))
        throw InvalidParameter("make_theta_grid: b must lie in (0, 1/(d+1))");
    ParameterSet set;
    set.b = b;
    double lo = b;
    double hi = d == 1 ? 0.5 : (1.0 - b) / 2.0;
    for (int i = 0; i < n_points; ++i) {
        double t = n_points == 1 ? lo : lo + (hi - lo) * i / (n_points - 1.0);
        ModelParams params;
        params.d = d;
        params.r = r;
        params.p.assign(static_cast<std::size_t>(d), t);
        set.grid.push_back(params);
    }
    validate(set);
    return set;
}

struct ExperimentFamily {
    FamilyKind kind = FamilyKind::negative_multinomial;
    ParameterSet params;
    double r = 0.0;
};

inline GaussianSpec family_spec(FamilyKind kind, const ModelParams& params) {
    DerivedParams derived = derive(params);
    const int d = params.d;
    GaussianSpec spec;
    spec.cov = Mat(d);
    switch (kind) {
    case FamilyKind::gaussian_matched:
        spec.mean = derived.mean;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) spec.cov(i, j) = params.r * derived.sigma(i, j);
        return spec;
    case FamilyKind::gaussian_diagonal:
        spec.mean = derived.mean;
        for (int i = 0; i < d; ++i) spec.cov(i, i) = params.r * derived.rho[static_cast<std::size_t>(i)];
        return spec;
    case FamilyKind::gaussian_stabilized:
        spec.mean.resize(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
            spec.mean[static_cast<std::size_t>(i)] =
                std::sqrt(params.r * derived.rho[static_cast<std::size_t>(i)]);
            spec.cov(i, i) = 0.25;
        }
        return spec;
    default:
        throw InvalidParameter("family_spec: the count family has no Gaussian spec");
    }
}

// ---------------------------------------------------------------------------
// Rounded-Gaussian vs count-distribution total variation (T2 direction)
// ---------------------------------------------------------------------------

namespace detail {

// d = 1: rounded-Gaussian cell masses are exact normal CDF differences; the
// k = 0 cell absorbs everything below 1/2 because of the clamp.
inline DivergenceEstimate tv_rounded_gaussian_vs_counts_d1(const ModelParams& params,
                                                           const GaussianSpec& q,
                                                           std::uint64_t budget) {
    DerivedParams derived = derive(params);
    PmfEval eval(params, derived);
    const double mu = q.mean[0];
    const double sd = std::sqrt(q.cov(0, 0));
    const double mu_p = params.r * derived.rho[0];
    const double sd_p = std::sqrt(params.r * derived.sigma(0, 0));
    const long long hi = std::max(static_cast<long long>(std::ceil(mu_p + 12.0 * sd_p)),
                                  static_cast<long long>(std::ceil(mu + 12.0 * sd)));
    if (static_cast<std::uint64_t>(hi + 1) > budget)
        throw BudgetExceeded("rounded tv: window exceeds budget");
    long double tv = 0.0L, mass_p = 0.0L;
    double lp = eval(LatticePoint{0});
    double big_k = 0.0;
    for (long long k = 0; k <= hi; ++k) {
        double pk = std::exp(lp);
        mass_p += pk;
        double upper = normal_cdf((static_cast<double>(k) + 0.5 - mu) / sd);
        double lower = k == 0 ? 0.0 : normal_cdf((static_cast<double>(k) - 0.5 - mu) / sd);
        tv += std::abs((upper - lower) - pk);
        if (k < hi) {
            lp += eval.step(big_k, k, 0);
            big_k += 1.0;
        }
    }
    double tail_p = std::max(0.0, 1.0 - static_cast<double>(mass_p));
    double tail_q = normal_sf((static_cast<double>(hi) + 0.5 - mu) / sd);
    DivergenceEstimate est;
    est.value = 0.5 * static_cast<double>(tv) + 0.5 * (tail_p + tail_q);
    est.method = Method::cell_quadrature;
    est.n = static_cast<std::uint64_t>(hi + 1);
    est.std_error = 0.0;
    return est;
}

// d = 2: cell masses by tensor quadrature of the Gaussian density; cells
// with a zero coordinate absorb the corresponding negative strip.
inline DivergenceEstimate tv_rounded_gaussian_vs_counts_d2(const ModelParams& params,
                                                           const GaussianSpec& q,
                                                           std::uint64_t budget,
                                                           unsigned threads) {
    DerivedParams derived = derive(params);
    PmfEval eval(params, derived);
    const GLRule& gl = gl_cached(16);
    Vec mu_q(q.mean), sd_q(2), mu_p(derived.mean), sd_p(2);
    for (int i = 0; i < 2; ++i) {
        sd_q[static_cast<std::size_t>(i)] = std::sqrt(q.cov(i, i));
        sd_p[static_cast<std::size_t>(i)] = std::sqrt(params.r * derived.sigma(i, i));
    }
    // clamped accumulation window plus the unclamped iteration ranges
    long long lo[2], hi[2], raw_lo[2];
    std::uint64_t cells = 1;
    for (int i = 0; i < 2; ++i) {
        std::size_t s = static_cast<std::size_t>(i);
        double wlo = std::min(mu_p[s] - 12.0 * sd_p[s], mu_q[s] - 12.0 * sd_q[s]);
        double whi = std::max(mu_p[s] + 12.0 * sd_p[s], mu_q[s] + 12.0 * sd_q[s]);
        lo[i] = std::max(0LL, static_cast<long long>(std::floor(wlo)));
        hi[i] = static_cast<long long>(std::ceil(whi));
        raw_lo[i] = lo[i] == 0 ? static_cast<long long>(std::floor(mu_q[s] - 12.0 * sd_q[s]))
                               : lo[i];
        cells *= static_cast<std::uint64_t>(hi[i] - raw_lo[i] + 1);
    }
    if (cells > budget)
        throw BudgetExceeded("rounded tv: window of " + std::to_string(cells) +
                             " cells exceeds budget");

    const Quad2 quad = make_quad2(q);

    const std::uint64_t n0 = static_cast<std::uint64_t>(hi[0] - lo[0] + 1);
    const std::uint64_t n1 = static_cast<std::uint64_t>(hi[1] - lo[1] + 1);
    std::vector<double> rounded(n0 * n1, 0.0);
    // unclamped sweep of Gaussian cell masses (exact along axis 1, outer
    // quadrature along axis 0), folded into the clamped array; rows share the
    // accumulation array, so this part stays serial
    std::vector<GaussBump> sections(gl.nodes.size());
    for (long long k0 = raw_lo[0]; k0 <= hi[0]; ++k0) {
        std::uint64_t i0 = static_cast<std::uint64_t>(std::max(k0, 0LL) - lo[0]);
        for (std::size_t a = 0; a < gl.nodes.size(); ++a)
            sections[a] = quad.section(static_cast<double>(k0) + gl.nodes[a]);
        for (long long k1 = raw_lo[1]; k1 <= hi[1]; ++k1) {
            const double l1 = static_cast<double>(k1) - 0.5;
            const double h1 = static_cast<double>(k1) + 0.5;
            double cell = 0.0;
            for (std::size_t a = 0; a < gl.nodes.size(); ++a)
                cell += gl.weights[a] * bump_mass(sections[a], l1, h1);
            std::uint64_t i1 = static_cast<std::uint64_t>(std::max(k1, 0LL) - lo[1]);
            rounded[i0 * n1 + i1] += cell;
        }
    }
    (void)threads;
    long double tv = 0.0L, mass_p = 0.0L, mass_q = 0.0L;
    for (long long k0 = lo[0]; k0 <= hi[0]; ++k0) {
        double lp = eval(LatticePoint{k0, lo[1]});
        double big_k = static_cast<double>(k0 + lo[1]);
        for (long long k1 = lo[1]; k1 <= hi[1]; ++k1) {
            double pk = std::exp(lp);
            mass_p += pk;
            double rk = rounded[static_cast<std::uint64_t>(k0 - lo[0]) * n1 +
                                static_cast<std::uint64_t>(k1 - lo[1])];
            mass_q += rk;
            tv += std::abs(rk - pk);
            if (k1 < hi[1]) {
                lp += eval.step(big_k, k1, 1);
                big_k += 1.0;
            }
        }
    }
    double tail_p = std::max(0.0, 1.0 - static_cast<double>(mass_p));
    double tail_q = std::max(0.0, 1.0 - static_cast<double>(mass_q));
    DivergenceEstimate est;
    est.value = 0.5 * static_cast<double>(tv) + 0.5 * (tail_p + tail_q);
    est.method = Method::cell_quadrature;
    est.n = cells;
    est.std_error = 0.0;
    return est;
}

inline DivergenceEstimate tv_rounded_gaussian_vs_counts(const ModelParams& params,
                                                        const GaussianSpec& q,
                                                        std::uint64_t budget,
                                                        unsigned threads) {
    validate(q);
    if (q.cov.n != params.d)
        throw InvalidParameter("rounded tv: dimension mismatch");
    if (params.d == 1) return tv_rounded_gaussian_vs_counts_d1(params, q, budget);
    if (params.d == 2) return tv_rounded_gaussian_vs_counts_d2(params, q, budget, threads);
    throw InvalidParameter("rounded tv: d <= 2 only");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Deficiency upper estimates
// ---------------------------------------------------------------------------

enum class KernelChoice { T1, T2 };
enum class Direction { P_to_Q, Q_to_P };

struct DeficiencyEstimate {
    double value = 0.0; // in [0, 1]
    Direction direction = Direction::P_to_Q;
    ModelParams sup_attained_at;
    double estimator_error = 0.0;
};

// Fixed-kernel upper estimate of the deficiency between two experiment
// families: the supremum over the parameter grid of the per-point total
// variation after transport. T1 jitters the counts and compares against the
// Gaussian; T2 rounds the Gaussian and compares against the count pmf.
inline DeficiencyEstimate deficiency_upper(const ExperimentFamily& p_family,
                                           const ExperimentFamily& q_family,
                                           KernelChoice kernel, std::uint64_t budget,
                                           std::uint64_t seed, unsigned threads = 0) {
    validate(p_family.params);
    validate(q_family.params);
    if (p_family.r != q_family.r)
        throw InvalidParameter("deficiency_upper: families must share r");
    if (p_family.params.grid.size() != q_family.params.grid.size())
        throw InvalidParameter("deficiency_upper: families must share the parameter grid");
    if (!(p_family.r > 0.0))
        throw InvalidParameter("deficiency_upper: r must be positive");

    DeficiencyEstimate out;
    out.direction = kernel == KernelChoice::T1 ? Direction::P_to_Q : Direction::Q_to_P;
    double worst = -1.0;
    for (std::size_t i = 0; i < p_family.params.grid.size(); ++i) {
        ModelParams point = p_family.params.grid[i];
        point.r = p_family.r;
        double value = 0.0;
        double err = 0.0;
        if (p_family.kind == q_family.kind) {
            // transporting an experiment onto itself: distance is zero at
            // every grid point, kept as an explicit sanity path
            value = 0.0;
        } else if (kernel == KernelChoice::T1) {
            if (p_family.kind != FamilyKind::negative_multinomial)
                throw InvalidParameter("deficiency_upper: T1 transports the count family");
            GaussianSpec target = family_spec(q_family.kind, point);
            DivergenceEstimate est =
                detail::tv_jittered_vs_gaussian_spec(point, target, budget, seed, threads);
            value = est.value;
            err = 1e-10 * static_cast<double>(est.n);
        } else {
            if (p_family.kind != FamilyKind::negative_multinomial)
                throw InvalidParameter("deficiency_upper: T2 compares against the count family");
            GaussianSpec source = family_spec(q_family.kind, point);
            DivergenceEstimate est =
                detail::tv_rounded_gaussian_vs_counts(point, source, budget, threads);
            value = est.value;
            err = 1e-10 * static_cast<double>(est.n);
        }
        if (value > worst) {
            worst = value;
            out.sup_attained_at = point;
            out.estimator_error = err;
        }
    }
    out.value = std::min(1.0, std::max(0.0, worst));
    return out;
}

// ---------------------------------------------------------------------------
// Stabilized-endpoint diagnostics
// ---------------------------------------------------------------------------

struct StabilizedCheck {
    double h_q_qtilde = 0.0;       // closed-form H(N(r rho, r Sigma), N(r rho, r diag rho))
    double h_qtilde_qstar_proxy = 0.0;
};

// The square-root map sends the diagonal Gaussian family to the stabilized
// one by construction, so the second entry compares the two constructions on
// a perturbed parameter pair and reports the discrepancy (identically ~0).
inline StabilizedCheck stabilized_distance_check(const ModelParams& params, double r) {
    ModelParams at_r = params;
    at_r.r = r;
    validate(at_r);
    StabilizedCheck out;
    out.h_q_qtilde = hellinger_gaussians(family_spec(FamilyKind::gaussian_matched, at_r),
                                         family_spec(FamilyKind::gaussian_diagonal, at_r));
    ModelParams perturbed = at_r;
    for (double& pi : perturbed.p) pi *= 0.9;
    auto sqrt_mapped = [](const ModelParams& m) {
        // delta-method image of the diagonal family under componentwise sqrt
        return family_spec(FamilyKind::gaussian_stabilized, m);
    };
    double h_mapped = hellinger_gaussians(sqrt_mapped(at_r), sqrt_mapped(perturbed));
    double h_star = hellinger_gaussians(family_spec(FamilyKind::gaussian_stabilized, at_r),
                                        family_spec(FamilyKind::gaussian_stabilized, perturbed));
    out.h_qtilde_qstar_proxy = std::abs(h_mapped - h_star);
    return out;
}

} // namespace nmgauss
