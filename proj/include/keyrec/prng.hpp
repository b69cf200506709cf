#pragma once

#include <cstdint>
#include <random>

namespace keyrec {

// splitmix64 finalizer; used to derive independent stream seeds from a base
// seed plus labels without correlating the resulting mt19937_64 streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t label) {
    return mix64(base ^ mix64(label));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(base, a), b);
}

// uniform in [0,1) with 53 random bits, independent of library distribution
// implementations so streams are reproducible across standard libraries
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace keyrec
