#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "nmgauss/errors.hpp"
#include "nmgauss/gaussian.hpp"
#include "nmgauss/model.hpp"
#include "nmgauss/parallel.hpp"
#include "nmgauss/pmf.hpp"
#include "nmgauss/quadrature.hpp"
#include "nmgauss/rng.hpp"
#include "nmgauss/sampling.hpp"

namespace nmgauss {

enum class Method { cell_quadrature, monte_carlo, closed_form };

inline const char* method_name(Method m) {
    switch (m) {
    case Method::cell_quadrature: return "cell-quadrature";
    case Method::monte_carlo: return "monte-carlo";
    default: return "closed-form";
    }
}

struct DivergenceEstimate {
    double value = 0.0;
    Method method = Method::cell_quadrature;
    std::uint64_t n = 0;        // cells or samples evaluated
    double std_error = 0.0;     // 0 for deterministic methods
    std::uint64_t seed = 0;
    std::uint64_t n_clipped = 0; // Monte Carlo likelihood-ratio clips
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

constexpr double kSqrt2Pi = 2.5066282746310005024;

// One-dimensional Gaussian bump A exp(-(x-m)^2 / (2 s^2)).
struct GaussBump {
    double a = 0.0;     // peak value
    double log_a = 0.0; // ln of the peak value
    double m = 0.0;
    double s = 1.0;
};

// Exact integral of the bump over [l, h].
inline double bump_mass(const GaussBump& g, double l, double h) {
    return g.a * g.s * kSqrt2Pi * (normal_cdf((h - g.m) / g.s) - normal_cdf((l - g.m) / g.s));
}

// Exact integral over [l, h] of |c - bump(x)|. The crossing points of a
// constant and a Gaussian bump are m +- s sqrt(2 ln(a/c)), so the integral
// splits into at most three closed-form pieces.
inline double bump_abs_diff(double c, double log_c, const GaussBump& g, double l, double h) {
    if (!(c > 0.0)) return bump_mass(g, l, h);
    if (g.log_a <= log_c) return c * (h - l) - bump_mass(g, l, h);
    const double w = g.s * std::sqrt(2.0 * (g.log_a - log_c));
    double lo = std::min(std::max(g.m - w, l), h);
    double hi = std::min(std::max(g.m + w, l), h);
    double out = 0.0;
    if (lo > l) out += c * (lo - l) - bump_mass(g, l, lo);       // bump below c
    out += bump_mass(g, lo, hi) - c * (hi - lo);                 // bump above c
    if (h > hi) out += c * (h - hi) - bump_mass(g, hi, h);       // bump below c
    return out;
}

// Integration window [max(0, mu - margin sd), mu + margin sd] per axis,
// covering both the count distribution and the target Gaussian.
struct QuadWindow {
    std::vector<long long> lo, hi;
    std::uint64_t cells = 1;
};

inline QuadWindow make_window(const Vec& mean_p, const Vec& sd_p, const Vec& mean_q,
                              const Vec& sd_q, double margin) {
    QuadWindow w;
    const std::size_t d = mean_p.size();
    w.lo.resize(d);
    w.hi.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        double lo = std::min(mean_p[i] - margin * sd_p[i], mean_q[i] - margin * sd_q[i]);
        double hi = std::max(mean_p[i] + margin * sd_p[i], mean_q[i] + margin * sd_q[i]);
        w.lo[i] = std::max(0LL, static_cast<long long>(std::floor(lo)));
        w.hi[i] = static_cast<long long>(std::ceil(hi));
        w.cells *= static_cast<std::uint64_t>(w.hi[i] - w.lo[i] + 1);
    }
    return w;
}

// Gaussian mass outside the window box, union bound over axis marginals.
inline double gaussian_box_tail(const QuadWindow& w, const Vec& mean_q, const Vec& sd_q) {
    double tail = 0.0;
    for (std::size_t i = 0; i < mean_q.size(); ++i) {
        tail += normal_sf((static_cast<double>(w.hi[i]) + 0.5 - mean_q[i]) / sd_q[i]);
        tail += normal_cdf((static_cast<double>(w.lo[i]) - 0.5 - mean_q[i]) / sd_q[i]);
    }
    return tail;
}

// Two-dimensional Gaussian density through its inverse covariance. For a
// fixed first coordinate the section along the second coordinate is again a
// Gaussian bump, which is what makes the exact inner integrals above usable.
struct Quad2 {
    double a00, a01, a11; // inverse covariance entries
    double mu0, mu1;
    double log_norm;      // ln of the density normalizer
    double schur;         // a00 - a01^2 / a11

    // section x2 -> q(x0, x2) as a bump, at scale ln(peak) = log_norm + shift
    GaussBump section(double x0, double extra_log = 0.0, double widen = 1.0) const {
        const double dx0 = x0 - mu0;
        GaussBump g;
        g.log_a = (log_norm + extra_log - 0.5 * schur * dx0 * dx0) / widen;
        // widen = 2 turns the section of q into the section of sqrt(q)
        g.a = std::exp(g.log_a);
        g.m = mu1 - (a01 / a11) * dx0;
        g.s = std::sqrt(widen / a11);
        return g;
    }
};

inline Quad2 make_quad2(const GaussianSpec& spec) {
    Chol cq = cholesky(spec.cov);
    Vec e0 = cq.solve({1.0, 0.0});
    Vec e1 = cq.solve({0.0, 1.0});
    Quad2 g;
    g.a00 = e0[0];
    g.a01 = 0.5 * (e1[0] + e0[1]);
    g.a11 = e1[1];
    g.mu0 = spec.mean[0];
    g.mu1 = spec.mean[1];
    g.log_norm = -std::log(2.0 * std::numbers::pi) - 0.5 * cq.log_det();
    g.schur = g.a00 - g.a01 * g.a01 / g.a11;
    return g;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Hellinger distance between the jittered count distribution and a Gaussian.
// ---------------------------------------------------------------------------

namespace detail {

struct SweepSums {
    long double main = 0.0L;   // Bhattacharyya integral resp. |difference| mass
    long double mass_p = 0.0L; // count mass inside the window
    std::uint64_t cells = 0;
};

// d = 1: the jittered density is constant P(k) on the cell around k and
// sqrt(q) is again a Gaussian bump, so every cell is closed form.
inline SweepSums hellinger_sweep_d1(const ModelParams& params, const DerivedParams& derived,
                                    const QuadWindow& w, unsigned threads) {
    PmfEval eval(params, derived);
    const double mu = params.r * derived.rho[0];
    const double var = params.r * derived.sigma(0, 0);
    GaussBump root; // sqrt of the N(mu, var) density
    root.log_a = -0.25 * std::log(2.0 * std::numbers::pi * var);
    root.a = std::exp(root.log_a);
    root.m = mu;
    root.s = std::sqrt(2.0 * var);

    const long long lo = w.lo[0], hi = w.hi[0];
    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t n_chunks = (w.cells + kChunk - 1) / kChunk;
    std::vector<long double> bc_part(n_chunks, 0.0L), mass_part(n_chunks, 0.0L);
    parallel_chunks(n_chunks, threads, [&](std::size_t c) {
        long double bc = 0.0L, mass = 0.0L;
        const long long k_lo = lo + static_cast<long long>(c * kChunk);
        const long long k_hi = std::min(hi, k_lo + static_cast<long long>(kChunk) - 1);
        double lp = eval(LatticePoint{k_lo});
        double big_k = static_cast<double>(k_lo);
        for (long long k = k_lo; k <= k_hi; ++k) {
            double pk = std::exp(lp);
            mass += pk;
            double cell = bump_mass(root, static_cast<double>(k) - 0.5,
                                    static_cast<double>(k) + 0.5);
            bc += std::sqrt(pk) * cell;
            if (k < k_hi) {
                lp += eval.step(big_k, k, 0);
                big_k += 1.0;
            }
        }
        bc_part[c] = bc;
        mass_part[c] = mass;
    });
    SweepSums out;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        out.main += bc_part[c];
        out.mass_p += mass_part[c];
    }
    out.cells = w.cells;
    return out;
}

// d = 2: exact inner integral along axis 1, Gauss-Legendre along axis 0.
// Sampled cells are re-evaluated with a finer outer rule; a discrepancy
// beyond 1e-10 marks the quadrature as non-converged.
inline SweepSums hellinger_sweep_d2(const ModelParams& params, const DerivedParams& derived,
                                    const QuadWindow& w, unsigned threads) {
    const GLRule& gl = gl_cached(16);
    const GLRule& gl_fine = gl_cached(32);
    PmfEval eval(params, derived);
    GaussianSpec q_spec;
    q_spec.mean = derived.mean;
    q_spec.cov = Mat(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) q_spec.cov(i, j) = params.r * derived.sigma(i, j);
    const Quad2 quad = make_quad2(q_spec);

    const long long lo0 = w.lo[0], hi0 = w.hi[0], lo1 = w.lo[1], hi1 = w.hi[1];
    const std::uint64_t n_rows = static_cast<std::uint64_t>(hi0 - lo0 + 1);
    const std::uint64_t row_len = static_cast<std::uint64_t>(hi1 - lo1 + 1);
    constexpr std::uint64_t kRowsPerChunk = 16;
    const std::uint64_t n_chunks = (n_rows + kRowsPerChunk - 1) / kRowsPerChunk;
    const std::uint64_t check_stride = std::max<std::uint64_t>(1, (n_rows * row_len) / 64);

    const std::size_t m = gl.nodes.size();
    std::vector<long double> bc_part(n_chunks, 0.0L), mass_part(n_chunks, 0.0L);
    parallel_chunks(n_chunks, threads, [&](std::size_t c) {
        long double bc = 0.0L, mass = 0.0L;
        std::vector<GaussBump> sections(m);
        const long long r_lo = lo0 + static_cast<long long>(c * kRowsPerChunk);
        const long long r_hi = std::min(hi0, r_lo + static_cast<long long>(kRowsPerChunk) - 1);
        for (long long k0 = r_lo; k0 <= r_hi; ++k0) {
            for (std::size_t a = 0; a < m; ++a)
                sections[a] = quad.section(static_cast<double>(k0) + gl.nodes[a], 0.0, 2.0);
            double lp = eval(LatticePoint{k0, lo1});
            double big_k = static_cast<double>(k0 + lo1);
            for (long long k1 = lo1; k1 <= hi1; ++k1) {
                double pk = std::exp(lp);
                mass += pk;
                const double l1 = static_cast<double>(k1) - 0.5;
                const double h1 = static_cast<double>(k1) + 0.5;
                double cell = 0.0;
                for (std::size_t a = 0; a < m; ++a)
                    cell += gl.weights[a] * bump_mass(sections[a], l1, h1);
                std::uint64_t flat = static_cast<std::uint64_t>(k0 - lo0) * row_len +
                                     static_cast<std::uint64_t>(k1 - lo1);
                if (flat % check_stride == 0) {
                    double fine = 0.0;
                    for (std::size_t a = 0; a < gl_fine.nodes.size(); ++a) {
                        GaussBump s =
                            quad.section(static_cast<double>(k0) + gl_fine.nodes[a], 0.0, 2.0);
                        fine += gl_fine.weights[a] * bump_mass(s, l1, h1);
                    }
                    if (std::abs(fine - cell) > 1e-10)
                        throw NumericFailure("hellinger quadrature: cell not converged");
                }
                bc += std::sqrt(pk) * cell;
                if (k1 < hi1) {
                    lp += eval.step(big_k, k1, 1);
                    big_k += 1.0;
                }
            }
        }
        bc_part[c] = bc;
        mass_part[c] = mass;
    });
    SweepSums out;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        out.main += bc_part[c];
        out.mass_p += mass_part[c];
    }
    out.cells = n_rows * row_len;
    return out;
}

} // namespace detail

// Cell-quadrature or Monte Carlo Hellinger distance between the jittered
// count distribution and its moment-matched Gaussian N(r rho, r Sigma).
// Quadrature supports d <= 2; Monte Carlo (sampling under the Gaussian)
// works for any d. budget caps cells resp. samples.
inline DivergenceEstimate hellinger_jittered_vs_gaussian(const ModelParams& params,
                                                         Method method, std::uint64_t budget,
                                                         std::uint64_t seed,
                                                         unsigned threads = 0) {
    DerivedParams derived = derive(params);
    if (budget < 1) throw InvalidParameter("hellinger: budget must be >= 1");
    DivergenceEstimate est;
    est.method = method;
    est.seed = seed;

    if (method == Method::cell_quadrature) {
        if (params.d > 2)
            throw InvalidParameter("hellinger: cell quadrature supports d <= 2; use monte carlo");
        Vec mu(derived.mean), sd(static_cast<std::size_t>(params.d));
        for (int i = 0; i < params.d; ++i)
            sd[static_cast<std::size_t>(i)] = std::sqrt(params.r * derived.sigma(i, i));
        double margin = 12.0;
        for (int attempt = 0;; ++attempt) {
            detail::QuadWindow w = detail::make_window(mu, sd, mu, sd, margin);
            if (w.cells > budget)
                throw BudgetExceeded("hellinger: quadrature window of " + std::to_string(w.cells) +
                                     " cells exceeds budget " + std::to_string(budget));
            detail::SweepSums res = params.d == 1
                                        ? detail::hellinger_sweep_d1(params, derived, w, threads)
                                        : detail::hellinger_sweep_d2(params, derived, w, threads);
            if (static_cast<double>(res.mass_p) >= 1.0 - 1e-10) {
                est.value = std::sqrt(std::max(0.0, 1.0 - static_cast<double>(res.main)));
                est.n = res.cells;
                est.std_error = 0.0;
                return est;
            }
            if (attempt >= 3)
                throw NumericFailure("hellinger: window mass did not reach 1 - 1e-10");
            margin *= 2.0;
        }
    }

    if (method != Method::monte_carlo)
        throw InvalidParameter("hellinger: method must be cell quadrature or monte carlo");

    // Monte Carlo under the Gaussian: 1 - H^2 = E_Q sqrt(ptilde(X)/q(X)),
    // with the jittered density ptilde(x) = P(round(x)) on its support.
    GaussianSpec q_spec;
    q_spec.mean = derived.mean;
    q_spec.cov = Mat(params.d);
    for (int i = 0; i < params.d; ++i)
        for (int j = 0; j < params.d; ++j) q_spec.cov(i, j) = params.r * derived.sigma(i, j);
    GaussianDensity density(q_spec);
    PmfEval eval(params, derived);

    constexpr std::uint64_t kBatch = 4096;
    const std::uint64_t n = budget;
    const std::uint64_t n_batches = (n + kBatch - 1) / kBatch;
    std::vector<long double> sum_part(n_batches, 0.0L), sq_part(n_batches, 0.0L);
    std::vector<std::uint64_t> clip_part(n_batches, 0);
    parallel_chunks(n_batches, threads, [&](std::size_t b) {
        std::mt19937_64 eng = make_engine(derive_seed(seed, b));
        const std::uint64_t lo = static_cast<std::uint64_t>(b) * kBatch;
        const std::uint64_t hi = std::min(n, lo + kBatch);
        long double sum = 0.0L, sq = 0.0L;
        std::uint64_t clipped = 0;
        LatticePoint k(static_cast<std::size_t>(params.d));
        for (std::uint64_t i = lo; i < hi; ++i) {
            Vec x = density.sample(eng);
            bool in_support = true;
            for (std::size_t j = 0; j < x.size(); ++j) {
                double rounded = std::nearbyint(x[j]);
                if (rounded < 0.0) {
                    in_support = false;
                    break;
                }
                k[j] = static_cast<long long>(rounded);
            }
            double w = 0.0;
            if (in_support) {
                double log_ratio = eval(k) - density.log_density(x);
                w = std::exp(0.5 * log_ratio);
                if (w > 1e6) {
                    w = 1e6;
                    ++clipped;
                }
            }
            sum += w;
            sq += static_cast<long double>(w) * w;
        }
        sum_part[b] = sum;
        sq_part[b] = sq;
        clip_part[b] = clipped;
    });
    long double sum = 0.0L, sq = 0.0L;
    std::uint64_t clipped = 0;
    for (std::uint64_t b = 0; b < n_batches; ++b) {
        sum += sum_part[b];
        sq += sq_part[b];
        clipped += clip_part[b];
    }
    const double mean = static_cast<double>(sum / static_cast<long double>(n));
    const double var =
        std::max(0.0, static_cast<double>(sq / static_cast<long double>(n)) - mean * mean);
    const double se_bc = std::sqrt(var / static_cast<double>(n));
    const double h = std::sqrt(std::max(0.0, 1.0 - mean));
    est.value = h;
    est.n = n;
    // delta method: dH/dBC = -1/(2H); keep a floor to avoid dividing by ~0
    est.std_error = se_bc / (2.0 * std::max(h, 1e-12));
    est.n_clipped = clipped;
    return est;
}

// ---------------------------------------------------------------------------
// Total variation between the jittered count distribution and a Gaussian.
// ---------------------------------------------------------------------------

namespace detail {

// d = 1 engine against an arbitrary normal target; every cell integral of
// |P(k) - q| is closed form.
inline DivergenceEstimate tv_jittered_vs_gaussian_d1(const ModelParams& params,
                                                     const DerivedParams& derived, double mu_q,
                                                     double var_q, std::uint64_t budget,
                                                     std::uint64_t seed, unsigned threads) {
    PmfEval eval(params, derived);
    const double mu_p = params.r * derived.rho[0];
    const double sd_p = std::sqrt(params.r * derived.sigma(0, 0));
    const double sd_q = std::sqrt(var_q);
    QuadWindow w = make_window({mu_p}, {sd_p}, {mu_q}, {sd_q}, 12.0);
    if (w.cells > budget)
        throw BudgetExceeded("tv: quadrature window of " + std::to_string(w.cells) +
                             " cells exceeds budget " + std::to_string(budget));
    GaussBump q;
    q.log_a = -0.5 * std::log(2.0 * std::numbers::pi * var_q);
    q.a = std::exp(q.log_a);
    q.m = mu_q;
    q.s = sd_q;

    const long long lo = w.lo[0], hi = w.hi[0];
    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t n_chunks = (w.cells + kChunk - 1) / kChunk;
    std::vector<long double> tv_part(n_chunks, 0.0L), mass_part(n_chunks, 0.0L);
    parallel_chunks(n_chunks, threads, [&](std::size_t c) {
        long double tv = 0.0L, mass = 0.0L;
        const long long k_lo = lo + static_cast<long long>(c * kChunk);
        const long long k_hi = std::min(hi, k_lo + static_cast<long long>(kChunk) - 1);
        double lp = eval(LatticePoint{k_lo});
        double big_k = static_cast<double>(k_lo);
        for (long long k = k_lo; k <= k_hi; ++k) {
            double pk = std::exp(lp);
            mass += pk;
            tv += bump_abs_diff(pk, lp, q, static_cast<double>(k) - 0.5,
                                static_cast<double>(k) + 0.5);
            if (k < k_hi) {
                lp += eval.step(big_k, k, 0);
                big_k += 1.0;
            }
        }
        tv_part[c] = tv;
        mass_part[c] = mass;
    });
    long double tv = 0.0L, mass = 0.0L;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        tv += tv_part[c];
        mass += mass_part[c];
    }
    double tail_p = std::max(0.0, 1.0 - static_cast<double>(mass));
    double tail_q = gaussian_box_tail(w, {mu_q}, {sd_q});
    DivergenceEstimate est;
    est.value = 0.5 * static_cast<double>(tv) + 0.5 * (tail_p + tail_q);
    est.method = Method::cell_quadrature;
    est.n = w.cells;
    est.std_error = 0.0;
    est.seed = seed;
    return est;
}

// Crossing topology of a section against the level pk on [l1, h1]: whether
// the set {q > pk} misses the interval, covers it, or cuts it on the left,
// right, or both sides. Cells whose sections all share one status have a
// smooth outer integrand; a status change marks a kink in x0.
inline int section_status(const GaussBump& s, double pk, double lp, double l1, double h1) {
    if (!(pk > 0.0)) return 1;
    if (s.log_a <= lp) return 0;
    const double w = s.s * std::sqrt(2.0 * (s.log_a - lp));
    const double a = s.m - w, b = s.m + w;
    if (b <= l1 || a >= h1) return 0;
    const bool left_in = a > l1;   // crossing at a lies inside
    const bool right_in = b < h1;  // crossing at b lies inside
    if (!left_in && !right_in) return 1;
    if (left_in && right_in) return 4;
    return left_in ? 3 : 2;
}

// One Gauss-Legendre pass of the exact inner integral over x0 in [lo, hi].
inline double tv_outer_gl(const Quad2& quad, double pk, double lp, double l1, double h1,
                          double lo, double hi, const GLRule& gl) {
    const double mid = 0.5 * (lo + hi), width = hi - lo;
    double sum = 0.0;
    for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
        GaussBump s = quad.section(mid + width * gl.nodes[a]);
        sum += gl.weights[a] * bump_abs_diff(pk, lp, s, l1, h1);
    }
    return sum * width;
}

// Bisection refinement in x0 for cells the status test flags as kinked. The
// halved estimate is kept once it agrees with the coarse one to 1e-13.
inline double tv_outer_adaptive(const Quad2& quad, double pk, double lp, double l1, double h1,
                                double lo, double hi, const GLRule& gl, double coarse,
                                int depth) {
    const double mid = 0.5 * (lo + hi);
    const double left = tv_outer_gl(quad, pk, lp, l1, h1, lo, mid, gl);
    const double right = tv_outer_gl(quad, pk, lp, l1, h1, mid, hi, gl);
    const double fine = left + right;
    if (std::abs(fine - coarse) <= 1e-13) return fine;
    if (depth >= 10) {
        if (std::abs(fine - coarse) > 1e-10)
            throw NumericFailure("tv quadrature: cell not converged");
        return fine;
    }
    return tv_outer_adaptive(quad, pk, lp, l1, h1, lo, mid, gl, left, depth + 1) +
           tv_outer_adaptive(quad, pk, lp, l1, h1, mid, hi, gl, right, depth + 1);
}

// d = 2 engine: exact |P(k) - q| integral along axis 1 per outer node,
// Gauss-Legendre along axis 0, refined adaptively where the sign of
// P(k) - q changes shape across the cell.
inline DivergenceEstimate tv_jittered_vs_gaussian_d2(const ModelParams& params,
                                                     const DerivedParams& derived,
                                                     const GaussianSpec& target,
                                                     std::uint64_t budget, std::uint64_t seed,
                                                     unsigned threads) {
    const GLRule& gl = gl_cached(16);
    PmfEval eval(params, derived);
    Vec mu_p(derived.mean), sd_p(2), mu_q(target.mean), sd_q(2);
    for (int i = 0; i < 2; ++i) {
        sd_p[static_cast<std::size_t>(i)] = std::sqrt(params.r * derived.sigma(i, i));
        sd_q[static_cast<std::size_t>(i)] = std::sqrt(target.cov(i, i));
    }
    QuadWindow w = make_window(mu_p, sd_p, mu_q, sd_q, 12.0);
    if (w.cells > budget)
        throw BudgetExceeded("tv: quadrature window of " + std::to_string(w.cells) +
                             " cells exceeds budget " + std::to_string(budget));
    const Quad2 quad = make_quad2(target);

    const long long lo0 = w.lo[0], hi0 = w.hi[0], lo1 = w.lo[1], hi1 = w.hi[1];
    const std::uint64_t n_rows = static_cast<std::uint64_t>(hi0 - lo0 + 1);
    constexpr std::uint64_t kRowsPerChunk = 16;
    const std::uint64_t n_chunks = (n_rows + kRowsPerChunk - 1) / kRowsPerChunk;

    const std::size_t m = gl.nodes.size();
    std::vector<long double> tv_part(n_chunks, 0.0L), mass_part(n_chunks, 0.0L);
    parallel_chunks(n_chunks, threads, [&](std::size_t c) {
        long double tv = 0.0L, mass = 0.0L;
        std::vector<GaussBump> sections(m);
        const long long r_lo = lo0 + static_cast<long long>(c * kRowsPerChunk);
        const long long r_hi = std::min(hi0, r_lo + static_cast<long long>(kRowsPerChunk) - 1);
        for (long long k0 = r_lo; k0 <= r_hi; ++k0) {
            const double x0_lo = static_cast<double>(k0) - 0.5;
            const double x0_hi = static_cast<double>(k0) + 0.5;
            for (std::size_t a = 0; a < m; ++a)
                sections[a] = quad.section(static_cast<double>(k0) + gl.nodes[a]);
            const GaussBump edge_lo = quad.section(x0_lo);
            const GaussBump edge_hi = quad.section(x0_hi);
            double lp = eval(LatticePoint{k0, lo1});
            double big_k = static_cast<double>(k0 + lo1);
            for (long long k1 = lo1; k1 <= hi1; ++k1) {
                double pk = std::exp(lp);
                mass += pk;
                const double l1 = static_cast<double>(k1) - 0.5;
                const double h1 = static_cast<double>(k1) + 0.5;
                double cell = 0.0;
                const int status = section_status(edge_lo, pk, lp, l1, h1);
                bool kinked = section_status(edge_hi, pk, lp, l1, h1) != status;
                for (std::size_t a = 0; a < m; ++a) {
                    cell += gl.weights[a] * bump_abs_diff(pk, lp, sections[a], l1, h1);
                    kinked = kinked || section_status(sections[a], pk, lp, l1, h1) != status;
                }
                if (kinked)
                    cell = tv_outer_adaptive(quad, pk, lp, l1, h1, x0_lo, x0_hi, gl, cell, 0);
                tv += cell;
                if (k1 < hi1) {
                    lp += eval.step(big_k, k1, 1);
                    big_k += 1.0;
                }
            }
        }
        tv_part[c] = tv;
        mass_part[c] = mass;
    });
    long double tv = 0.0L, mass = 0.0L;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        tv += tv_part[c];
        mass += mass_part[c];
    }
    double tail_p = std::max(0.0, 1.0 - static_cast<double>(mass));
    double tail_q = gaussian_box_tail(w, mu_q, sd_q);
    DivergenceEstimate est;
    est.value = 0.5 * static_cast<double>(tv) + 0.5 * (tail_p + tail_q);
    est.method = Method::cell_quadrature;
    est.n = w.cells;
    est.std_error = 0.0;
    est.seed = seed;
    return est;
}

inline DivergenceEstimate tv_jittered_vs_gaussian_spec(const ModelParams& params,
                                                       const GaussianSpec& target,
                                                       std::uint64_t budget, std::uint64_t seed,
                                                       unsigned threads) {
    DerivedParams derived = derive(params);
    validate(target);
    if (target.cov.n != params.d)
        throw InvalidParameter("tv: target dimension mismatch");
    if (params.d == 1)
        return tv_jittered_vs_gaussian_d1(params, derived, target.mean[0], target.cov(0, 0),
                                          budget, seed, threads);
    if (params.d == 2)
        return tv_jittered_vs_gaussian_d2(params, derived, target, budget, seed, threads);
    throw InvalidParameter("tv: cell quadrature supports d <= 2");
}

} // namespace detail

// Total variation between the jittered count distribution and its matched
// Gaussian N(r rho, r Sigma), by cell quadrature (d <= 2).
inline DivergenceEstimate tv_jittered_vs_gaussian(const ModelParams& params,
                                                  std::uint64_t budget, std::uint64_t seed,
                                                  unsigned threads = 0) {
    DerivedParams derived = derive(params);
    GaussianSpec target;
    target.mean = derived.mean;
    target.cov = Mat(params.d);
    for (int i = 0; i < params.d; ++i)
        for (int j = 0; j < params.d; ++j) target.cov(i, j) = params.r * derived.sigma(i, j);
    return detail::tv_jittered_vs_gaussian_spec(params, target, budget, seed, threads);
}

// ---------------------------------------------------------------------------
// Bounds
// ---------------------------------------------------------------------------

// Theoretical Hellinger envelopes at universal constant C:
//   tight: (C / sqrt(r p0)) sqrt(d^2 + sum_i 1/p_i)
//   loose: (C d / sqrt(r)) * 2 / min(p0, p_1, ..., p_d)
struct Prop2Bound {
    double tight = 0.0;
    double loose = 0.0;
};

inline Prop2Bound prop2_bound(const ModelParams& params, double c_universal) {
    DerivedParams derived = derive(params);
    if (!(c_universal > 0.0))
        throw InvalidParameter("prop2_bound: constant must be positive");
    double inv_p_sum = 0.0;
    double min_p = derived.p0;
    for (double pi : params.p) {
        inv_p_sum += 1.0 / pi;
        min_p = std::min(min_p, pi);
    }
    const double d = static_cast<double>(params.d);
    Prop2Bound out;
    out.tight = c_universal / std::sqrt(params.r * derived.p0) * std::sqrt(d * d + inv_p_sum);
    out.loose = c_universal * d / std::sqrt(params.r) * 2.0 / min_p;
    return out;
}

// Exponential off-center mass bound
//   100 d exp{ -(min_i p_i / (100 d^2 max_i p_i)) r^{1/3} },
// clamped into [0, 1]; the min and max run over the count coordinates.
inline double tail_bound_eq8(const ModelParams& params, double r) {
    validate(params);
    if (!(r > 0.0)) throw InvalidParameter("tail_bound_eq8: r must be positive");
    double min_p = params.p[0], max_p = params.p[0];
    for (double pi : params.p) {
        min_p = std::min(min_p, pi);
        max_p = std::max(max_p, pi);
    }
    const double d = static_cast<double>(params.d);
    double v = 100.0 * d *
               std::exp(-(min_p / (100.0 * d * d * max_p)) * std::pow(r, 1.0 / 3.0));
    return std::min(1.0, std::max(0.0, v));
}

} // namespace nmgauss
