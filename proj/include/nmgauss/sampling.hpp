#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "nmgauss/model.hpp"
#include "nmgauss/parallel.hpp"
#include "nmgauss/rng.hpp"

namespace nmgauss {

// One draw: K | lambda ~ product Poisson(lambda rho_i) with lambda ~ Gamma(r, 1).
inline LatticePoint sample_one(const DerivedParams& derived, double r, std::mt19937_64& eng) {
    std::gamma_distribution<double> gamma(r, 1.0);
    std::poisson_distribution<long long> poisson;
    using poisson_param = std::poisson_distribution<long long>::param_type;
    double lambda = gamma(eng);
    LatticePoint k(derived.rho.size());
    for (std::size_t i = 0; i < derived.rho.size(); ++i)
        k[i] = poisson(eng, poisson_param(lambda * derived.rho[i]));
    return k;
}

// n independent draws. Work is split into fixed-size batches with seeds
// derived from (seed, batch index), so output is identical for any thread
// count and any scheduling order.
inline std::vector<LatticePoint> sample(const ModelParams& params, std::uint64_t seed,
                                        std::size_t n, unsigned threads = 0) {
    DerivedParams derived = derive(params);
    constexpr std::size_t kBatch = 4096;
    std::vector<LatticePoint> out(n);
    const std::size_t n_batches = (n + kBatch - 1) / kBatch;
    parallel_chunks(n_batches, threads, [&](std::size_t b) {
        std::mt19937_64 eng = make_engine(derive_seed(seed, b));
        const std::size_t lo = b * kBatch;
        const std::size_t hi = std::min(n, lo + kBatch);
        for (std::size_t i = lo; i < hi; ++i) out[i] = sample_one(derived, params.r, eng);
    });
    return out;
}

// Adds an independent uniform on (-1/2, 1/2) per coordinate, moving the
// lattice point to a random position strictly inside its unit cell.
inline Vec jitter_with_engine(const LatticePoint& k, std::mt19937_64& eng) {
    Vec x(k.size());
    for (std::size_t i = 0; i < k.size(); ++i)
        x[i] = static_cast<double>(k[i]) + (uniform_open01(eng) - 0.5);
    return x;
}

inline Vec jitter(const LatticePoint& k, std::uint64_t seed) {
    std::mt19937_64 eng = make_engine(seed);
    return jitter_with_engine(k, eng);
}

// Componentwise nearest integer, ties to even. Inverts jitter exactly.
inline LatticePoint round_to_lattice(const Vec& x) {
    LatticePoint k(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        k[i] = static_cast<long long>(std::nearbyint(x[i]));
    return k;
}

} // namespace nmgauss
