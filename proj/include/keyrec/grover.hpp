#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "keyrec/prng.hpp"

namespace keyrec::grover {

// largest statevector the simulator will allocate (2^22 amplitudes = 64 MiB)
inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 22;

enum class SearchBackend { classical, grover_sim, cost_only };

struct SearchOutcome {
    std::optional<std::uint64_t> found;    // 1-based index into the search space
    std::uint64_t oracle_queries = 0;      // Grover iterations executed
    std::uint64_t iterations_executed = 0;
    std::uint64_t marked_count = 0;        // from the classical pre-scan
    std::uint64_t prescan_evaluations = 0; // classical predicate calls (not oracle queries)
    SearchBackend backend = SearchBackend::grover_sim;
};

inline std::uint64_t pad_to_power_of_two(std::uint64_t space_size) {
    if (space_size == 0)
        throw std::invalid_argument("grover: space must be non-empty");
    return std::bit_ceil(space_size);
}

// floor((pi/4) * sqrt(space/marked)), never below one iteration.  Callers
// simulating a padded register pass the padded size.
inline std::uint64_t iteration_count(std::uint64_t space_size, std::uint64_t marked) {
    if (space_size == 0)
        throw std::invalid_argument("grover::iteration_count: space must be non-empty");
    if (marked == 0)
        throw std::invalid_argument("grover::iteration_count: no marked elements");
    if (marked > space_size)
        throw std::invalid_argument("grover::iteration_count: more marked elements than states");
    const double k = std::floor(std::numbers::pi / 4.0 *
                                std::sqrt(static_cast<double>(space_size) /
                                          static_cast<double>(marked)));
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(k));
}

// closed-form success probability sin^2((2k+1) * asin(sqrt(M/N)))
inline double success_probability(std::uint64_t space_size, std::uint64_t marked,
                                  std::uint64_t iterations) {
    if (space_size == 0)
        throw std::invalid_argument("grover::success_probability: space must be non-empty");
    if (marked > space_size)
        throw std::invalid_argument("grover::success_probability: more marked elements than states");
    if (marked == 0) return 0.0;
    const double theta =
        std::asin(std::sqrt(static_cast<double>(marked) / static_cast<double>(space_size)));
    const double s = std::sin((2.0 * static_cast<double>(iterations) + 1.0) * theta);
    return s * s;
}

// Statevector after `iterations` Grover steps from the uniform superposition
// over the padded space; `marked` holds 0-based indices (sorted, unique).
// Padding states beyond space_size are never marked.
inline std::vector<std::complex<double>> evolve_statevector(std::uint64_t space_size,
                                                            std::span<const std::uint64_t> marked,
                                                            std::uint64_t iterations,
                                                            std::uint64_t state_cap = kDefaultStateCap) {
    const std::uint64_t n = pad_to_power_of_two(space_size);
    if (n > state_cap)
        throw std::invalid_argument("grover: padded space exceeds the statevector cap");
    for (std::uint64_t idx : marked)
        if (idx >= space_size)
            throw std::invalid_argument("grover: marked index outside the space");
    std::vector<std::complex<double>> amps(
        static_cast<std::size_t>(n),
        std::complex<double>(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    for (std::uint64_t it = 0; it < iterations; ++it) {
        // oracle: phase-flip marked amplitudes
        for (std::uint64_t idx : marked) amps[static_cast<std::size_t>(idx)] *= -1.0;
        // diffusion: inversion about the mean
        std::complex<double> mean(0.0, 0.0);
        for (const auto& a : amps) mean += a;
        mean /= static_cast<double>(n);
        for (auto& a : amps) a = 2.0 * mean - a;
    }
    return amps;
}

// Full simulated run: classical pre-scan for the marked set (flagged in the
// outcome as prescan work, not oracle queries), statevector evolution, one
// measurement by inverse-CDF sampling.  The predicate receives 1-based
// indices; `found` is 1-based as well.
inline SearchOutcome simulate(const std::function<bool(std::uint64_t)>& predicate,
                              std::uint64_t space_size, std::uint64_t seed,
                              std::uint64_t state_cap = kDefaultStateCap) {
    if (space_size == 0)
        throw std::invalid_argument("grover::simulate: space must be non-empty");
    SearchOutcome out;
    out.backend = SearchBackend::grover_sim;
    std::vector<std::uint64_t> marked;
    for (std::uint64_t i = 1; i <= space_size; ++i) {
        ++out.prescan_evaluations;
        if (predicate(i)) marked.push_back(i - 1);
    }
    out.marked_count = marked.size();
    if (marked.empty()) return out;

    // iteration count is taken on the padded register the simulator runs on
    const std::uint64_t k = iteration_count(pad_to_power_of_two(space_size), marked.size());
    const auto amps = evolve_statevector(space_size, marked, k, state_cap);
    out.iterations_executed = k;
    out.oracle_queries = k;

    std::mt19937_64 rng(seed);
    const double u = uniform_unit(rng);
    double cdf = 0.0;
    std::uint64_t sampled = amps.size() - 1;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        cdf += std::norm(amps[i]);
        if (u < cdf) {
            sampled = i;
            break;
        }
    }
    if (std::binary_search(marked.begin(), marked.end(), sampled))
        out.found = sampled + 1;
    return out;
}

}  // namespace keyrec::grover
