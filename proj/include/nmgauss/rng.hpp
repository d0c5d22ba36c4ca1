#pragma once

#include <cstdint>
#include <random>

namespace nmgauss {

// splitmix64 step (Steele, Lea, Vigna). Used only to derive independent
// per-batch seeds from a root seed; the batch index enters the state so the
// derived streams do not depend on evaluation order or thread count.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t counter) {
    std::uint64_t s = root ^ (0x9e3779b97f4a7c15ULL * (counter + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b >> 1);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

// Uniform draw in the open interval (0, 1). The 53-bit mantissa scaling can
// produce exactly 0, which would put a jittered coordinate on a cell face;
// bump it to 2^-54 so both endpoints stay excluded.
inline double uniform_open01(std::mt19937_64& eng) {
    double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    if (u == 0.0) u = 0x1.0p-54;
    return u;
}

} // namespace nmgauss
