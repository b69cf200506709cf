#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "keyrec/channel.hpp"
#include "keyrec/costs.hpp"
#include "keyrec/enumeration.hpp"
#include "keyrec/grover.hpp"
#include "keyrec/lowmc.hpp"
#include "keyrec/prng.hpp"
#include "keyrec/rank.hpp"

namespace keyrec {

using grover::SearchBackend;

// Acceptance test T(k): k is accepted iff it encrypts every known plaintext
// to its ciphertext.  Candidates may carry trailing pad bits beyond the
// cipher's key length; they are truncated before encryption.
class TestOracle {
public:
    TestOracle(const LowMCInstance& instance,
               std::vector<std::pair<BitString, BitString>> pairs)
        : instance_(&instance), pairs_(std::move(pairs)) {
        if (pairs_.empty())
            throw std::invalid_argument("TestOracle: need at least one plaintext/ciphertext pair");
        for (const auto& [m, c] : pairs_)
            if (m.size() != instance.params.block_bits || c.size() != instance.params.block_bits)
                throw std::invalid_argument("TestOracle: pair length mismatch");
    }

    static TestOracle single(const LowMCInstance& instance, BitString m, BitString c) {
        std::vector<std::pair<BitString, BitString>> pairs;
        pairs.emplace_back(std::move(m), std::move(c));
        return TestOracle(instance, std::move(pairs));
    }

    std::uint32_t key_bits() const { return instance_->params.key_bits; }

    bool accepts(const BitString& candidate) const {
        if (candidate.size() < key_bits())
            throw std::invalid_argument("TestOracle: candidate shorter than the key");
        const BitString key = candidate.size() == key_bits()
                                  ? candidate
                                  : candidate.prefix(key_bits());
        for (const auto& [m, c] : pairs_)
            if (!(encrypt(*instance_, key, m) == c)) return false;
        return true;
    }

private:
    const LowMCInstance* instance_;
    std::vector<std::pair<BitString, BitString>> pairs_;
};

struct SearchPlan {
    std::uint64_t target_count = 0;  // e: rough size of the searched interval
    SearchBackend backend = SearchBackend::classical;
    EnumerationParams enumeration;
    ChannelParams channel;
    double precision = 100.0;
    std::uint64_t seed = 0;                 // grover-sim measurement seeds derive from this
    std::uint32_t max_grover_retries = 10;  // re-runs per interval when marked states exist
    std::uint64_t simulator_cap = grover::kDefaultStateCap;
    std::uint64_t counter_budget = kDefaultCounterBudget;
    std::optional<GateCounts> per_query_gates;  // when set, gate totals are accumulated

    void validate() const {
        if (target_count == 0)
            throw std::invalid_argument("SearchPlan: target_count must be positive");
        enumeration.validate();
        channel.validate();
    }
};

struct IntervalRecord {
    std::uint32_t step = 0;  // s
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;
    BigCount candidates;           // entries(0,0) of this interval's matrix
    std::uint64_t queries = 0;     // oracle queries spent here (all runs)
    std::uint32_t runs = 0;        // Grover invocations (1 + retries)
    bool found = false;
};

struct QksOutcome {
    std::optional<BitString> key;
    SearchBackend backend = SearchBackend::classical;
    std::uint64_t min_total_weight = 0;        // B_min
    std::uint64_t bound_weight = 0;            // B_e
    BigCount candidates_covered;               // sum of interval populations
    BigCount oracle_queries;                   // total oracle/query accounting
    std::uint64_t prescan_evaluations = 0;     // grover-sim classical pre-scan work
    std::vector<IntervalRecord> intervals;
    // single-interval equivalent accounting: floor(pi/4 * sqrt(rank[B_min,B_e)))
    BigCount single_interval_queries;
    std::optional<RealGateCounts> gate_totals;  // per-query gates x oracle_queries
};

// Algorithm-6 style scan: enumerate the interval in rank order, test each key
inline std::optional<BitString> key_search_classical(const BitString& noisy,
                                                     WeightInterval interval,
                                                     const EnumerationParams& params,
                                                     const ChannelParams& channel,
                                                     double precision, const TestOracle& oracle,
                                                     std::uint64_t counter_budget = kDefaultCounterBudget) {
    const CandidateTable table = generate_candidates(noisy, params, channel, precision);
    const RankMatrix matrix = create(table, interval, counter_budget);
    for (BigCount r = 1; r <= matrix.total(); ++r) {
        auto key = get_key(table, matrix, interval, r);
        if (!key) break;
        if (oracle.accepts(*key)) return key;
    }
    return std::nullopt;
}

namespace detail {

// integer floor(sqrt(x)) for arbitrary-precision counts
inline BigCount isqrt_big(const BigCount& x) {
    if (x < 0) throw std::invalid_argument("isqrt_big: negative");
    if (x == 0) return 0;
    BigCount lo = 0, hi = 1;
    while (hi * hi <= x) hi <<= 1;
    lo = hi >> 1;
    while (lo < hi) {
        const BigCount mid = (lo + hi + 1) >> 1;
        if (mid * mid <= x) lo = mid;
        else hi = mid - 1;
    }
    return lo;
}

// floor(pi/4 * sqrt(count)), at least one query for a non-empty space;
// pi/4 held as an 18-digit fixed-point ratio so the floor is computed exactly
inline BigCount grover_query_budget(const BigCount& count) {
    if (count <= 0) return 0;
    static const BigCount num("785398163397448310");
    static const BigCount den("1000000000000000000");
    const BigCount queries = isqrt_big(num * num * count) / den;
    return queries > 0 ? queries : BigCount(1);
}

}  // namespace detail

// Algorithm-7 hybrid search: sub-intervals [B_min,B_min+1), then ~2^s-sized
// slabs via find_bound, each searched over its rank space [1, entries(0,0)]
// with the configured backend.  cost-only runs the full schedule without
// touching the oracle and reports the accumulated query budget.
inline QksOutcome qks(const BitString& noisy, const SearchPlan& plan, const TestOracle& oracle) {
    plan.validate();
    const CandidateTable table =
        generate_candidates(noisy, plan.enumeration, plan.channel, plan.precision);
    const WeightDistribution dist(table, plan.counter_budget);

    QksOutcome out;
    out.backend = plan.backend;
    out.min_total_weight = min_weight(table);
    out.bound_weight = dist.bound_for(out.min_total_weight, BigCount(plan.target_count));
    out.single_interval_queries = detail::grover_query_budget(
        dist.count_in({out.min_total_weight, out.bound_weight}));

    std::uint64_t b1 = out.min_total_weight;
    std::uint64_t b2 = out.min_total_weight + 1;
    std::uint32_t s = 0;
    while (b1 <= out.bound_weight) {
        const WeightInterval interval{b1, b2};
        const RankMatrix matrix = create(table, interval, plan.counter_budget);
        const BigCount& count = matrix.total();
        // cross-check the distribution against the literal matrix census
        if (count != dist.count_in(interval))
            throw std::logic_error("qks: weight distribution disagrees with the rank matrix");

        IntervalRecord record;
        record.step = s;
        record.lower = b1;
        record.upper = b2;
        record.candidates = count;
        out.candidates_covered += count;

        if (count > 0) {
            switch (plan.backend) {
                case SearchBackend::classical: {
                    record.runs = 1;
                    for (BigCount r = 1; r <= count; ++r) {
                        auto key = get_key(table, matrix, interval, r);
                        if (!key) throw std::logic_error("qks: rank space ended early");
                        ++record.queries;
                        if (oracle.accepts(*key)) {
                            record.found = true;
                            out.key = std::move(*key);
                            break;
                        }
                    }
                    break;
                }
                case SearchBackend::grover_sim: {
                    if (count > plan.simulator_cap)
                        throw std::runtime_error(
                            "qks: interval at step s=" + std::to_string(s) + " holds " +
                            count.str() + " candidates, beyond the simulator cap");
                    const std::uint64_t space = count.convert_to<std::uint64_t>();
                    auto predicate = [&](std::uint64_t r) {
                        auto key = get_key(table, matrix, interval, BigCount(r));
                        if (!key) throw std::logic_error("qks: rank space ended early");
                        return oracle.accepts(*key);
                    };
                    for (std::uint32_t attempt = 0; attempt <= plan.max_grover_retries; ++attempt) {
                        const auto run = grover::simulate(
                            predicate, space, derive_seed(plan.seed, s, attempt),
                            plan.simulator_cap);
                        ++record.runs;
                        record.queries += run.oracle_queries;
                        out.prescan_evaluations += run.prescan_evaluations;
                        if (run.found) {
                            record.found = true;
                            out.key = get_key(table, matrix, interval, BigCount(*run.found));
                            break;
                        }
                        if (run.marked_count == 0) break;  // nothing to find here
                    }
                    break;
                }
                case SearchBackend::cost_only: {
                    // abstract pi/4*sqrt(population) budget; no oracle calls
                    record.runs = 1;
                    record.queries =
                        detail::grover_query_budget(count).convert_to<std::uint64_t>();
                    break;
                }
            }
        }
        out.oracle_queries += record.queries;
        out.intervals.push_back(std::move(record));
        if (out.key) break;

        s += 1;
        b1 = b2;
        b2 = dist.bound_for(b1, BigCount(1) << s);
    }

    if (plan.per_query_gates) {
        const double total = out.oracle_queries.convert_to<double>();
        out.gate_totals = scale_gates(*plan.per_query_gates, total);
    }
    return out;
}

}  // namespace keyrec
