#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "keyrec/bitstring.hpp"
#include "keyrec/prng.hpp"

namespace keyrec {

// Binary asymmetric channel: alpha = P(stored 0 read as 1), beta = P(stored 1
// read as 0).  Cold-boot decay toward ground state means beta >> alpha in the
// regimes of interest, but nothing here assumes that.
struct ChannelParams {
    double alpha = 0.0;
    double beta = 0.0;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0))
            throw std::invalid_argument("ChannelParams: alpha and beta must lie in (0,1)");
    }
};

// floor for estimated rates when no flips were observed
inline constexpr double kMinFlipProbability = 1e-6;

inline BitString perturb(const BitString& key, const ChannelParams& params, std::uint64_t seed) {
    params.validate();
    std::mt19937_64 rng(seed);
    BitString out = key;
    for (std::size_t i = 0; i < key.size(); ++i) {
        const double p = key.get(i) ? params.beta : params.alpha;
        if (uniform_unit(rng) < p) out.flip(i);
    }
    return out;
}

// log P(noisy | candidate) under the channel; always < 0
inline double log_likelihood(const BitString& candidate, const BitString& noisy,
                             const ChannelParams& params) {
    params.validate();
    if (candidate.size() != noisy.size())
        throw std::invalid_argument("log_likelihood: length mismatch");
    std::size_t n01 = 0, n10 = 0, n11 = 0;  // n_xy: candidate bit x observed as y
    const auto& cb = candidate.bytes();
    const auto& nb = noisy.bytes();
    for (std::size_t i = 0; i < cb.size(); ++i) {
        n11 += static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(cb[i] & nb[i])));
        n01 += static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(~cb[i] & nb[i])));
        n10 += static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(cb[i] & ~nb[i])));
    }
    const std::size_t n00 = candidate.size() - n01 - n10 - n11;
    return static_cast<double>(n00) * std::log1p(-params.alpha) +
           static_cast<double>(n01) * std::log(params.alpha) +
           static_cast<double>(n10) * std::log(params.beta) +
           static_cast<double>(n11) * std::log1p(-params.beta);
}

// negate-scale-round a log-likelihood into an integer weight; lower = likelier
inline std::uint64_t to_weight(double score, double precision = 100.0) {
    if (!(precision > 0.0))
        throw std::invalid_argument("to_weight: precision must be positive");
    if (score > 0.0)
        throw std::invalid_argument("to_weight: log-likelihood must be <= 0");
    const double scaled = -score * precision;
    if (!(scaled < 9.2e18))
        throw std::invalid_argument("to_weight: weight overflows 64 bits");
    return static_cast<std::uint64_t>(std::llround(scaled));
}

// ML estimate of (alpha, beta) from an original/noisy pair, rates clamped
// away from {0,1} so the result always satisfies ChannelParams::validate()
inline ChannelParams estimate_params(const BitString& original, const BitString& noisy) {
    if (original.size() != noisy.size())
        throw std::invalid_argument("estimate_params: length mismatch");
    std::size_t zeros = 0, ones = 0, flips01 = 0, flips10 = 0;
    const auto& ob = original.bytes();
    const auto& nb = noisy.bytes();
    for (std::size_t i = 0; i < ob.size(); ++i) {
        ones += static_cast<std::size_t>(std::popcount(ob[i]));
        flips01 += static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(~ob[i] & nb[i])));
        flips10 += static_cast<std::size_t>(std::popcount(static_cast<std::uint8_t>(ob[i] & ~nb[i])));
    }
    zeros = original.size() - ones;
    if (zeros == 0 || ones == 0)
        throw std::invalid_argument("estimate_params: need both zero and one bits in the original");
    auto clamp = [](double p) {
        if (p < kMinFlipProbability) return kMinFlipProbability;
        if (p > 1.0 - kMinFlipProbability) return 1.0 - kMinFlipProbability;
        return p;
    };
    return ChannelParams{clamp(static_cast<double>(flips01) / static_cast<double>(zeros)),
                         clamp(static_cast<double>(flips10) / static_cast<double>(ones))};
}

}  // namespace keyrec
