#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "keyrec/enumeration.hpp"

namespace keyrec {

// Exact candidate counter.  Interval populations reach mu^xi (2^160 and more
// at the picnic parameter sets), far past any fixed-width integer.
using BigCount = boost::multiprecision::cpp_int;

// half-open total-weight interval [lower, upper)
struct WeightInterval {
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;

    void validate() const {
        if (lower >= upper)
            throw std::invalid_argument("WeightInterval: require lower < upper");
    }
};

// default ceiling on xi * upper counters a single matrix may allocate
inline constexpr std::uint64_t kDefaultCounterBudget = std::uint64_t{1} << 26;

inline std::uint64_t min_weight(const CandidateTable& table) {
    std::uint64_t total = 0;
    for (const auto& list : table.lists) {
        if (list.empty()) throw std::invalid_argument("min_weight: empty candidate list");
        total += list.front().weight;
    }
    return total;
}

inline std::uint64_t max_weight(const CandidateTable& table) {
    std::uint64_t total = 0;
    for (const auto& list : table.lists) {
        if (list.empty()) throw std::invalid_argument("max_weight: empty candidate list");
        std::uint64_t best = 0;
        for (const auto& cand : list) best = std::max(best, cand.weight);
        total += best;
    }
    return total;
}

// Partial-sum count matrix over the table's block lists.  entries(i, b) counts
// the combinations of blocks i..xi-1 whose weights sum into [lower-b, upper-b)
// relative to the interval; entries(0, 0) is the interval's full population.
class RankMatrix {
public:
    RankMatrix(const CandidateTable& table, WeightInterval interval, std::uint64_t counter_budget) {
        interval.validate();
        if (table.lists.empty())
            throw std::invalid_argument("RankMatrix: table has no block lists");
        for (const auto& list : table.lists)
            if (list.empty()) throw std::invalid_argument("RankMatrix: empty candidate list");
        const std::size_t xi = table.lists.size();
        const std::uint64_t width = interval.upper;
        if (counter_budget == 0 || width > counter_budget / xi)
            throw std::invalid_argument("RankMatrix: xi*upper exceeds the counter budget");
        interval_ = interval;
        rows_.assign(xi, std::vector<BigCount>(static_cast<std::size_t>(width)));

        // weights flattened out of the candidate structs for the hot loops
        std::vector<std::vector<std::uint64_t>> weights(xi);
        for (std::size_t i = 0; i < xi; ++i) {
            weights[i].reserve(table.lists[i].size());
            for (const auto& cand : table.lists[i]) weights[i].push_back(cand.weight);
        }

        // every entry is bounded by the product of the list sizes; when that
        // fits a machine word the whole build runs in uint64
        bool narrow = true;
        std::uint64_t bound = 1;
        for (const auto& list : table.lists) {
            if (list.size() != 0 && bound > (std::uint64_t{1} << 62) / list.size()) {
                narrow = false;
                break;
            }
            bound *= list.size();
        }
        if (narrow) {
            narrow_ = true;
            urows_.assign(xi, std::vector<std::uint64_t>(static_cast<std::size_t>(width)));
            for (std::uint64_t b = 0; b < width; ++b) {
                std::uint64_t count = 0;
                for (const std::uint64_t s : weights[xi - 1])
                    count += (b + s >= interval.lower && b + s < interval.upper) ? 1 : 0;
                urows_[xi - 1][static_cast<std::size_t>(b)] = count;
            }
            for (std::size_t i = xi - 1; i-- > 0;) {
                for (std::uint64_t b = 0; b < width; ++b) {
                    std::uint64_t count = 0;
                    for (const std::uint64_t s : weights[i])
                        if (b + s < interval.upper)
                            count += urows_[i + 1][static_cast<std::size_t>(b + s)];
                    urows_[i][static_cast<std::size_t>(b)] = count;
                }
            }
            for (std::size_t i = 0; i < xi; ++i) assign_row(i, urows_[i]);
            return;
        }

        // last block: indicator censuses of single weights landing inside
        for (std::uint64_t b = 0; b < width; ++b) {
            BigCount count = 0;
            for (const std::uint64_t s : weights[xi - 1])
                if (b + s >= interval.lower && b + s < interval.upper) ++count;
            rows_[xi - 1][static_cast<std::size_t>(b)] = std::move(count);
        }
        // earlier blocks: sum successor row at the shifted base weight
        for (std::size_t i = xi - 1; i-- > 0;) {
            for (std::uint64_t b = 0; b < width; ++b) {
                BigCount count = 0;
                for (const std::uint64_t s : weights[i])
                    if (b + s < interval.upper)
                        count += rows_[i + 1][static_cast<std::size_t>(b + s)];
                rows_[i][static_cast<std::size_t>(b)] = std::move(count);
            }
        }
    }

    const WeightInterval& interval() const { return interval_; }
    std::size_t blocks() const { return rows_.size(); }
    std::uint64_t width() const { return interval_.upper; }

    const BigCount& entries(std::size_t i, std::uint64_t b) const {
        if (i >= rows_.size() || b >= interval_.upper)
            throw std::out_of_range("RankMatrix::entries: index out of range");
        return rows_[i][static_cast<std::size_t>(b)];
    }

    // successor-row lookup used during descent; base weights at or past the
    // upper bound contribute nothing
    const BigCount& entries_or_zero(std::size_t i, std::uint64_t b) const {
        static const BigCount zero = 0;
        if (b >= interval_.upper) return zero;
        return rows_[i][static_cast<std::size_t>(b)];
    }

    // true when every count fits a machine word; descents then run on the
    // uint64 mirror instead of big integers
    bool narrow() const { return narrow_; }

    std::uint64_t entries_or_zero_u64(std::size_t i, std::uint64_t b) const {
        if (b >= interval_.upper) return 0;
        return urows_[i][static_cast<std::size_t>(b)];
    }

    const BigCount& total() const { return rows_[0][0]; }

private:
    void assign_row(std::size_t i, const std::vector<std::uint64_t>& row) {
        for (std::size_t b = 0; b < row.size(); ++b) rows_[i][b] = row[b];
    }

    WeightInterval interval_;
    std::vector<std::vector<BigCount>> rows_;
    std::vector<std::vector<std::uint64_t>> urows_;
    bool narrow_ = false;
};

inline RankMatrix create(const CandidateTable& table, WeightInterval interval,
                         std::uint64_t counter_budget = kDefaultCounterBudget) {
    return RankMatrix(table, interval, counter_budget);
}

// population of the interval; the matrix is built and discarded
inline BigCount rank(const CandidateTable& table, WeightInterval interval,
                     std::uint64_t counter_budget = kDefaultCounterBudget) {
    return create(table, interval, counter_budget).total();
}

namespace detail {

// shared descent: pick the block candidate whose successor census first
// covers r, then scan the last block's inside-interval candidates
template <typename Count, typename BelowAt>
std::optional<BitString> descend_rank(const CandidateTable& table, WeightInterval interval,
                                      Count r, BelowAt&& below_at) {
    const std::size_t xi = table.lists.size();
    std::size_t key_bits = 0;
    for (const auto& list : table.lists) key_bits += list.front().value.size();
    BitString key(0);
    key.reserve(key_bits);
    std::uint64_t base = 0;
    for (std::size_t i = 0; i + 1 < xi; ++i) {
        bool advanced = false;
        for (const auto& cand : table.lists[i]) {
            decltype(auto) below = below_at(i + 1, base + cand.weight);
            if (r <= below) {
                key.append(cand.value);
                base += cand.weight;
                advanced = true;
                break;
            }
            r -= below;
        }
        if (!advanced)
            throw std::logic_error("get_key: matrix inconsistent with table");
    }
    for (const auto& cand : table.lists[xi - 1]) {
        const std::uint64_t total = base + cand.weight;
        const bool inside = total >= interval.lower && total < interval.upper;
        if (inside) {
            if (r <= 1) {
                key.append(cand.value);
                return key;
            }
            r -= 1;
        }
    }
    throw std::logic_error("get_key: matrix inconsistent with table");
}

}  // namespace detail

// r-th key (1-based) of the interval in enumeration order: candidates sorted
// by the lexicographic order of their per-block list indices.  nullopt when r
// exceeds the interval population.
inline std::optional<BitString> get_key(const CandidateTable& table, const RankMatrix& matrix,
                                        WeightInterval interval, BigCount r) {
    interval.validate();
    if (matrix.interval().lower != interval.lower || matrix.interval().upper != interval.upper)
        throw std::invalid_argument("get_key: matrix was built for a different interval");
    if (matrix.blocks() != table.lists.size())
        throw std::invalid_argument("get_key: matrix was built for a different table");
    if (r <= 0)
        throw std::invalid_argument("get_key: rank r must be positive");
    if (r > matrix.total()) return std::nullopt;

    if (matrix.narrow())
        return detail::descend_rank(table, interval, r.convert_to<std::uint64_t>(),
                                    [&matrix](std::size_t i, std::uint64_t b) {
                                        return matrix.entries_or_zero_u64(i, b);
                                    });
    return detail::descend_rank(table, interval, std::move(r),
                                [&matrix](std::size_t i, std::uint64_t b) -> const BigCount& {
                                    return matrix.entries_or_zero(i, b);
                                });
}

// Cumulative distribution of total weight over the full product space: one
// convolution of the per-block weight histograms.  Supplies interval
// populations (equal to rank()) and bound searches without per-query matrix
// builds.
class WeightDistribution {
public:
    explicit WeightDistribution(const CandidateTable& table,
                                std::uint64_t counter_budget = kDefaultCounterBudget) {
        if (table.lists.empty())
            throw std::invalid_argument("WeightDistribution: table has no block lists");
        max_total_ = max_weight(table);
        const std::uint64_t width = max_total_ + 1;
        if (counter_budget == 0 || width > counter_budget)
            throw std::invalid_argument("WeightDistribution: weight range exceeds the counter budget");
        // density of total weight, convolved block by block
        std::vector<BigCount> density(1, BigCount(1));
        for (const auto& list : table.lists) {
            if (list.empty())
                throw std::invalid_argument("WeightDistribution: empty candidate list");
            std::map<std::uint64_t, std::uint64_t> histogram;
            for (const auto& cand : list) ++histogram[cand.weight];
            std::vector<BigCount> next(density.size() + histogram.rbegin()->first);
            for (std::size_t b = 0; b < density.size(); ++b) {
                if (density[b] == 0) continue;
                for (const auto& [s, mult] : histogram)
                    next[b + s] += density[b] * mult;
            }
            density = std::move(next);
        }
        cumulative_.assign(density.size() + 1, BigCount(0));
        for (std::size_t x = 0; x < density.size(); ++x)
            cumulative_[x + 1] = cumulative_[x] + density[x];
    }

    std::uint64_t max_total() const { return max_total_; }

    // number of candidates with total weight < x
    const BigCount& count_below(std::uint64_t x) const {
        const std::uint64_t clamped = std::min<std::uint64_t>(x, cumulative_.size() - 1);
        return cumulative_[static_cast<std::size_t>(clamped)];
    }

    BigCount count_in(WeightInterval interval) const {
        interval.validate();
        return count_below(interval.upper) - count_below(interval.lower);
    }

    // smallest b2 > b1 with |[b1, b2)| >= target; when even the full tail
    // falls short, max(b1+1, max_total+1) keeps the interval non-empty
    std::uint64_t bound_for(std::uint64_t b1, const BigCount& target) const {
        if (target <= 0)
            throw std::invalid_argument("WeightDistribution::bound_for: target must be positive");
        const BigCount& floor_count = count_below(b1);
        if (count_below(max_total_ + 1) - floor_count < target)
            return std::max(b1 + 1, max_total_ + 1);
        std::uint64_t lo = b1 + 1, hi = max_total_ + 1;
        while (lo < hi) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (count_below(mid) - floor_count >= target) hi = mid;
            else lo = mid + 1;
        }
        return lo;
    }

private:
    std::uint64_t max_total_ = 0;
    std::vector<BigCount> cumulative_;
};

// smallest b2 > b1 such that [b1, b2) holds at least `target` candidates
inline std::uint64_t find_bound(const CandidateTable& table, std::uint64_t b1,
                                const BigCount& target,
                                std::uint64_t counter_budget = kDefaultCounterBudget) {
    return WeightDistribution(table, counter_budget).bound_for(b1, target);
}

}  // namespace keyrec
