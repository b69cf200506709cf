#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "keyrec/channel.hpp"
#include "keyrec/enumeration.hpp"
#include "keyrec/lowmc.hpp"
#include "keyrec/prng.hpp"
#include "keyrec/rank.hpp"

namespace keyrec {

// Success-rate sweep: for each (beta, mu) grid point, run keygen -> perturb ->
// generate_candidates trials and record whether the true key survives the
// list cut and where its weight falls relative to the enumeration bounds B_e.
struct ExperimentSpec {
    PicnicParamSet paramset;
    double alpha = 0.001;
    std::vector<double> beta_grid;
    std::vector<std::uint64_t> mu_grid;
    std::vector<std::uint32_t> e_grid;  // exponents: bound B_e targets 2^e candidates
    std::uint32_t trials = 100;
    std::uint64_t base_seed = 0;
    std::uint32_t chunk_bits = 8;        // w
    std::uint32_t chunks_per_block = 0;  // eta
    double precision = 100.0;
    std::uint64_t counter_budget = kDefaultCounterBudget;

    // the key image is enumerated at its stored byte width; trailing pad bits
    // are significant-zero
    std::uint32_t image_bits() const { return 8 * paramset.state_bytes; }

    EnumerationParams enumeration_params(std::uint64_t mu) const {
        EnumerationParams params;
        params.key_bits = image_bits();
        params.chunk_bits = chunk_bits;
        params.chunks_per_block = chunks_per_block;
        params.list_size = mu;
        params.significant_bits = paramset.state_bits;
        return params;
    }

    void validate() const {
        if (trials == 0)
            throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
        if (beta_grid.empty() || mu_grid.empty() || e_grid.empty())
            throw std::invalid_argument("ExperimentSpec: grids must be non-empty");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("ExperimentSpec: alpha must lie in (0,1)");
        for (double beta : beta_grid)
            if (!(beta > 0.0 && beta < 1.0))
                throw std::invalid_argument("ExperimentSpec: beta values must lie in (0,1)");
        for (std::uint32_t e : e_grid)
            if (e >= 4096)
                throw std::invalid_argument("ExperimentSpec: unreasonable exponent");
        for (std::uint64_t mu : mu_grid) enumeration_params(mu).validate();
    }
};

struct TrialRecord {
    std::uint32_t trial_index = 0;
    double beta = 0.0;
    std::uint64_t mu = 0;
    bool full_enum_recoverable = false;
    std::uint64_t true_key_weight = 0;   // meaningful iff full_enum_recoverable
    std::uint64_t min_total_weight = 0;  // B_min
    std::vector<std::pair<std::uint32_t, std::uint64_t>> bound_weights;  // e -> B_e
    std::vector<std::pair<std::uint32_t, bool>> within_e;                // e -> weight check
    std::vector<std::pair<std::uint32_t, bool>> within_e_by_rank;        // cross-validation
};

// One keygen/perturb/enumerate trial at a fixed grid point.  Deterministic in
// trial_seed; the cipher instance is shared across trials (it depends only on
// the parameter set).
inline TrialRecord run_trial(const ExperimentSpec& spec, const LowMCInstance& instance,
                             double beta, std::uint64_t mu, std::uint32_t trial_index,
                             std::uint64_t trial_seed) {
    const KeyPair pair = keygen(spec.paramset, instance, derive_seed(trial_seed, 0));
    const ChannelParams channel{spec.alpha, beta};
    const BitString noisy = perturb(pair.secret_key, channel, derive_seed(trial_seed, 1));
    const EnumerationParams params = spec.enumeration_params(mu);
    const CandidateTable table = generate_candidates(noisy, params, channel, spec.precision);

    TrialRecord record;
    record.trial_index = trial_index;
    record.beta = beta;
    record.mu = mu;

    // the key is recoverable by full enumeration iff every true block value
    // survived the per-block list cut
    record.full_enum_recoverable = true;
    std::uint64_t true_weight = 0;
    for (std::uint32_t b = 0; b < params.num_blocks(); ++b) {
        const BitString block =
            pair.secret_key.slice(std::size_t{b} * params.block_bits(), params.block_bits());
        bool present = false;
        for (const auto& cand : table.lists[b]) {
            if (cand.value == block) {
                true_weight += cand.weight;
                present = true;
                break;
            }
        }
        if (!present) {
            record.full_enum_recoverable = false;
            break;
        }
    }
    if (record.full_enum_recoverable) record.true_key_weight = true_weight;

    record.min_total_weight = min_weight(table);
    const WeightDistribution dist(table, spec.counter_budget);
    for (std::uint32_t e : spec.e_grid) {
        const std::uint64_t bound = dist.bound_for(record.min_total_weight, BigCount(1) << e);
        record.bound_weights.emplace_back(e, bound);
        record.within_e.emplace_back(
            e, record.full_enum_recoverable && record.true_key_weight < bound);
        const bool by_rank =
            record.full_enum_recoverable &&
            dist.count_in({record.min_total_weight, record.true_key_weight + 1}) <=
                (BigCount(1) << e);
        record.within_e_by_rank.emplace_back(e, by_rank);
    }
    return record;
}

struct GridPointSummary {
    double beta = 0.0;
    std::uint64_t mu = 0;
    std::uint32_t trials = 0;
    double rate_full = 0.0;
    std::vector<std::pair<std::uint32_t, double>> rate_e;
};

struct ExperimentResult {
    std::vector<std::uint32_t> e_grid;
    std::vector<GridPointSummary> points;
};

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const LowMCInstance instance = instantiate(spec.paramset.lowmc);
    ExperimentResult result;
    result.e_grid = spec.e_grid;
    std::uint64_t point_index = 0;
    for (double beta : spec.beta_grid) {
        for (std::uint64_t mu : spec.mu_grid) {
            GridPointSummary summary;
            summary.beta = beta;
            summary.mu = mu;
            summary.trials = spec.trials;
            std::vector<std::uint32_t> within_counts(spec.e_grid.size(), 0);
            std::uint32_t full_count = 0;
            for (std::uint32_t t = 0; t < spec.trials; ++t) {
                const std::uint64_t trial_seed = derive_seed(spec.base_seed, point_index, t);
                const TrialRecord record = run_trial(spec, instance, beta, mu, t, trial_seed);
                if (record.full_enum_recoverable) ++full_count;
                for (std::size_t i = 0; i < spec.e_grid.size(); ++i)
                    if (record.within_e[i].second) ++within_counts[i];
            }
            summary.rate_full = static_cast<double>(full_count) / spec.trials;
            for (std::size_t i = 0; i < spec.e_grid.size(); ++i)
                summary.rate_e.emplace_back(spec.e_grid[i],
                                            static_cast<double>(within_counts[i]) / spec.trials);
            result.points.push_back(std::move(summary));
            ++point_index;
        }
    }
    return result;
}

namespace detail {

// shortest round-trip decimal form, locale-independent
inline std::string format_double(double v) {
    char buf[64];
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace detail

inline void write_csv(const ExperimentResult& result, std::ostream& os) {
    os << "beta,mu,trials,rate_full";
    for (std::uint32_t e : result.e_grid) os << ",rate_e" << e;
    os << '\n';
    for (const auto& point : result.points) {
        os << detail::format_double(point.beta) << ',' << point.mu << ',' << point.trials << ','
           << detail::format_double(point.rate_full);
        for (const auto& [e, rate] : point.rate_e) os << ',' << detail::format_double(rate);
        os << '\n';
    }
}

// the embedded parameter sets, exposed under the harness's name as well
inline const std::vector<PicnicParamSet>& paramset_table() { return picnic_parameter_sets(); }

}  // namespace keyrec
