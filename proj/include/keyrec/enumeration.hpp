#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "keyrec/bitstring.hpp"
#include "keyrec/channel.hpp"

namespace keyrec {

// Key layout: W key bits split into W/w chunks of w bits each; eta consecutive
// chunks form a block, so there are W/(w*eta) blocks of w*eta bits.  When the
// in-memory image is wider than the cipher key (significant_bits < key_bits),
// the trailing pad bits are known zero and candidates that set them are never
// listed.
struct EnumerationParams {
    std::uint32_t key_bits = 0;          // W
    std::uint32_t chunk_bits = 0;        // w
    std::uint32_t chunks_per_block = 0;  // eta
    std::uint64_t list_size = 0;         // mu
    std::uint32_t significant_bits = 0;  // 0 means all key_bits are significant

    std::uint32_t effective_significant_bits() const {
        return significant_bits == 0 ? key_bits : significant_bits;
    }
    std::uint32_t num_chunks() const { return key_bits / chunk_bits; }
    std::uint32_t block_bits() const { return chunk_bits * chunks_per_block; }
    std::uint32_t num_blocks() const { return num_chunks() / chunks_per_block; }

    void validate() const {
        if (key_bits == 0 || chunk_bits == 0 || chunks_per_block == 0 || list_size == 0)
            throw std::invalid_argument("EnumerationParams: all parameters must be positive");
        if (chunk_bits > 63)
            throw std::invalid_argument("EnumerationParams: chunk_bits must be <= 63");
        if (key_bits % chunk_bits != 0)
            throw std::invalid_argument("EnumerationParams: chunk_bits must divide key_bits");
        if (num_chunks() % chunks_per_block != 0)
            throw std::invalid_argument("EnumerationParams: chunks_per_block must divide the chunk count");
        if (significant_bits > key_bits)
            throw std::invalid_argument("EnumerationParams: significant_bits exceeds key_bits");
        const std::uint32_t bb = block_bits();
        if (bb < 64 && list_size > (std::uint64_t{1} << bb))
            throw std::invalid_argument("EnumerationParams: list_size exceeds the block value space");
    }
};

struct ChunkCandidate {
    std::uint64_t weight = 0;
    BitString value;
};

// canonical list order: weight ascending, then value as unsigned integer
inline bool canonical_less(const ChunkCandidate& a, const ChunkCandidate& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.value.compare_unsigned(b.value) < 0;
}

struct CandidateTable {
    EnumerationParams params;
    ChannelParams channel;
    double precision = 100.0;
    std::vector<std::vector<ChunkCandidate>> lists;  // one per block, canonical order
};

// Score every w-bit pattern against each noisy chunk.  Patterns touching a
// known-zero pad position are dropped, so a fully padded chunk keeps only the
// all-zero candidate.  Output lists are in canonical order.
inline std::vector<std::vector<ChunkCandidate>> build_chunk_lists(const BitString& noisy,
                                                                  const EnumerationParams& params,
                                                                  const ChannelParams& channel,
                                                                  double precision = 100.0) {
    params.validate();
    channel.validate();
    if (noisy.size() != params.key_bits)
        throw std::invalid_argument("build_chunk_lists: noisy image length != key_bits");
    const std::uint32_t w = params.chunk_bits;
    const std::uint32_t sig = params.effective_significant_bits();
    std::vector<std::vector<ChunkCandidate>> lists(params.num_chunks());
    for (std::uint32_t i = 0; i < params.num_chunks(); ++i) {
        const BitString chunk = noisy.slice(std::size_t{i} * w, w);
        // local bit j is forced to zero when its global position is padding
        std::uint64_t allowed_mask = (w == 63) ? ~std::uint64_t{0} >> 1 : (std::uint64_t{1} << w) - 1;
        for (std::uint32_t j = 0; j < w; ++j)
            if (std::uint64_t{i} * w + j >= sig) allowed_mask &= ~(std::uint64_t{1} << j);
        auto& list = lists[i];
        list.reserve(std::size_t{1} << std::popcount(allowed_mask));
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << w); ++v) {
            if ((v & ~allowed_mask) != 0) continue;
            BitString value = BitString::from_uint(v, w);
            list.push_back({to_weight(log_likelihood(value, chunk, channel), precision),
                            std::move(value)});
        }
        std::sort(list.begin(), list.end(), canonical_less);
    }
    return lists;
}

// Optimal key enumeration over the product of eta sorted chunk lists: a
// best-first walk of the index lattice emitting combined candidates in
// non-decreasing weight order (ties broken by lexicographic index tuple).
class BlockEnumerator {
public:
    explicit BlockEnumerator(std::span<const std::vector<ChunkCandidate>> lists) {
        lists_.reserve(lists.size());
        for (const auto& list : lists) lists_.push_back(&list);
        if (lists_.empty())
            throw std::invalid_argument("BlockEnumerator: no chunk lists");
        for (const auto* list : lists_) {
            if (list->empty())
                throw std::invalid_argument("BlockEnumerator: empty chunk list");
            if (!std::is_sorted(list->begin(), list->end(), canonical_less))
                throw std::invalid_argument("BlockEnumerator: chunk list not in canonical order");
        }
        Node root;
        root.indices.assign(lists_.size(), 0);
        root.weight = 0;
        for (const auto* list : lists_) root.weight += list->front().weight;
        frontier_.push(std::move(root));
        seen_.insert(frontier_.top().indices);
    }

    // next emission, or nullopt once the whole product space is exhausted
    std::optional<ChunkCandidate> next() {
        if (frontier_.empty()) return std::nullopt;
        Node node = frontier_.top();
        frontier_.pop();
        for (std::size_t d = 0; d < lists_.size(); ++d) {
            const std::size_t j = node.indices[d];
            if (j + 1 >= lists_[d]->size()) continue;
            Node child = node;
            child.indices[d] = static_cast<std::uint32_t>(j + 1);
            child.weight = node.weight - (*lists_[d])[j].weight + (*lists_[d])[j + 1].weight;
            if (seen_.insert(child.indices).second) frontier_.push(std::move(child));
        }
        ChunkCandidate out;
        out.weight = node.weight;
        out.value = BitString(0);
        for (std::size_t d = 0; d < lists_.size(); ++d)
            out.value.append((*lists_[d])[node.indices[d]].value);
        return out;
    }

private:
    struct Node {
        std::uint64_t weight = 0;
        std::vector<std::uint32_t> indices;
    };
    struct NodeGreater {
        bool operator()(const Node& a, const Node& b) const {
            if (a.weight != b.weight) return a.weight > b.weight;
            return a.indices > b.indices;
        }
    };

    std::vector<const std::vector<ChunkCandidate>*> lists_;
    std::priority_queue<Node, std::vector<Node>, NodeGreater> frontier_;
    std::set<std::vector<std::uint32_t>> seen_;
};

// per-block candidate lists: first mu emissions of the block's enumerator,
// re-sorted into canonical order
inline CandidateTable generate_candidates(const BitString& noisy, const EnumerationParams& params,
                                          const ChannelParams& channel, double precision = 100.0) {
    auto chunk_lists = build_chunk_lists(noisy, params, channel, precision);
    CandidateTable table;
    table.params = params;
    table.channel = channel;
    table.precision = precision;
    table.lists.resize(params.num_blocks());
    for (std::uint32_t b = 0; b < params.num_blocks(); ++b) {
        const std::span<const std::vector<ChunkCandidate>> all(chunk_lists);
        BlockEnumerator en(all.subspan(std::size_t{b} * params.chunks_per_block,
                                       params.chunks_per_block));
        auto& list = table.lists[b];
        for (std::uint64_t k = 0; k < params.list_size; ++k) {
            auto cand = en.next();
            if (!cand) break;
            list.push_back(std::move(*cand));
        }
        std::sort(list.begin(), list.end(), canonical_less);
    }
    return table;
}

// text form: header "W w eta mu precision alpha beta" (plus a trailing
// significant-bits field when padding is active), then one
// "list weight hexvalue" line per entry
inline void write_table(const CandidateTable& table, std::ostream& os) {
    std::ostringstream header;
    header.precision(std::numeric_limits<double>::max_digits10);
    header << table.params.key_bits << ' ' << table.params.chunk_bits << ' '
           << table.params.chunks_per_block << ' ' << table.params.list_size << ' '
           << table.precision << ' ' << table.channel.alpha << ' ' << table.channel.beta;
    if (table.params.significant_bits != 0)
        header << ' ' << table.params.significant_bits;
    os << header.str() << '\n';
    for (std::size_t b = 0; b < table.lists.size(); ++b)
        for (const auto& cand : table.lists[b])
            os << b << ' ' << cand.weight << ' ' << cand.value.to_hex() << '\n';
}

inline CandidateTable read_table(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_table: missing header");
    CandidateTable table;
    {
        std::istringstream hs(line);
        if (!(hs >> table.params.key_bits >> table.params.chunk_bits >>
              table.params.chunks_per_block >> table.params.list_size >> table.precision >>
              table.channel.alpha >> table.channel.beta))
            throw std::runtime_error("read_table: malformed header");
        hs >> table.params.significant_bits;  // optional trailing field
    }
    table.params.validate();
    table.channel.validate();
    table.lists.resize(table.params.num_blocks());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::size_t block;
        std::uint64_t weight;
        std::string hex;
        if (!(ls >> block >> weight >> hex))
            throw std::runtime_error("read_table: malformed entry");
        if (block >= table.lists.size())
            throw std::runtime_error("read_table: block index out of range");
        table.lists[block].push_back({weight, BitString::from_hex(hex, table.params.block_bits())});
    }
    for (const auto& list : table.lists) {
        if (list.empty())
            throw std::runtime_error("read_table: empty candidate list");
        if (list.size() > table.params.list_size)
            throw std::runtime_error("read_table: list longer than mu");
        if (!std::is_sorted(list.begin(), list.end(), canonical_less))
            throw std::runtime_error("read_table: list not in canonical order");
    }
    return table;
}

}  // namespace keyrec
