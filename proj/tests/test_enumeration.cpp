#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "keyrec/enumeration.hpp"
#include "oracles.hpp"

using namespace keyrec;

namespace {

// the worked two-list example: [(0,a),(3,b)] x [(1,c),(2,d)]
std::vector<std::vector<ChunkCandidate>> example_lists() {
    const auto a = BitString::from_uint(0x3, 4), b = BitString::from_uint(0x5, 4);
    const auto c = BitString::from_uint(0x9, 4), d = BitString::from_uint(0x6, 4);
    return {{{0, a}, {3, b}}, {{1, c}, {2, d}}};
}

}  // namespace

TEST_CASE("params validation", "[enumeration]") {
    EnumerationParams p{16, 4, 2, 16, 0};
    CHECK_NOTHROW(p.validate());
    CHECK(p.num_chunks() == 4);
    CHECK(p.num_blocks() == 2);
    CHECK(p.block_bits() == 8);
    CHECK_THROWS_AS((EnumerationParams{16, 5, 2, 16, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((EnumerationParams{16, 4, 3, 16, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((EnumerationParams{16, 4, 2, 0, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((EnumerationParams{16, 4, 2, 257, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((EnumerationParams{16, 4, 2, 16, 17}).validate(), std::invalid_argument);
}

TEST_CASE("build_chunk_lists single-bit example", "[enumeration]") {
    const EnumerationParams params{1, 1, 1, 2, 0};
    const ChannelParams channel{0.1, 0.1};
    const auto lists = build_chunk_lists(BitString::from_bits("0"), params, channel);
    REQUIRE(lists.size() == 1);
    REQUIRE(lists[0].size() == 2);
    CHECK(lists[0][0].value == BitString::from_bits("0"));
    CHECK(lists[0][0].weight == to_weight(std::log(0.9)));
    CHECK(lists[0][1].value == BitString::from_bits("1"));
    CHECK(lists[0][1].weight == to_weight(std::log(0.1)));
}

TEST_CASE("chunk lists are canonical, complete, and ML-headed", "[enumeration]") {
    std::mt19937_64 rng(31);
    const EnumerationParams params{32, 4, 2, 16, 0};
    const ChannelParams channel{0.02, 0.3};
    const auto noisy = BitString::random(32, rng);
    const auto lists = build_chunk_lists(noisy, params, channel);
    REQUIRE(lists.size() == 8);
    for (std::size_t i = 0; i < lists.size(); ++i) {
        REQUIRE(lists[i].size() == 16);
        CHECK(std::is_sorted(lists[i].begin(), lists[i].end(), canonical_less));
        // ML estimate is the observation itself when alpha, beta < 0.5
        CHECK(lists[i][0].value == noisy.slice(4 * i, 4));
        for (const auto& cand : lists[i]) {
            const auto recomputed =
                to_weight(log_likelihood(cand.value, noisy.slice(4 * i, 4), channel), 100.0);
            CHECK(cand.weight == recomputed);
        }
    }
}

TEST_CASE("sum of minimal chunk weights tracks the whole-string weight", "[enumeration]") {
    std::mt19937_64 rng(37);
    const EnumerationParams params{64, 8, 2, 4, 0};
    const ChannelParams channel{0.001, 0.05};
    const auto noisy = BitString::random(64, rng);
    const auto lists = build_chunk_lists(noisy, params, channel);
    std::uint64_t sum = 0;
    for (const auto& list : lists) sum += list[0].weight;
    const auto direct = to_weight(log_likelihood(noisy, noisy, channel), 100.0);
    CHECK(static_cast<double>(sum) ==
          Catch::Approx(static_cast<double>(direct)).margin(params.num_chunks() / 2.0));
}

TEST_CASE("padding excludes candidates with forced bits set", "[enumeration]") {
    std::mt19937_64 rng(41);
    // 16 stored bits, only 13 significant: chunk 3 has 3 forced positions
    EnumerationParams params{16, 4, 2, 256, 13};
    const auto noisy = BitString::random(16, rng).resized(13).resized(16);
    const auto lists = build_chunk_lists(noisy, params, ChannelParams{0.001, 0.05});
    REQUIRE(lists.size() == 4);
    CHECK(lists[0].size() == 16);
    CHECK(lists[2].size() == 16);
    CHECK(lists[3].size() == 2);  // 2^(4-3) survivors
    for (const auto& cand : lists[3])
        for (std::size_t j = 1; j < 4; ++j) CHECK_FALSE(cand.value.get(j));
}

TEST_CASE("okea worked example emits 1,2,4,5", "[enumeration]") {
    const auto lists = example_lists();
    BlockEnumerator en(lists);
    const std::uint64_t expect_weights[] = {1, 2, 4, 5};
    const std::uint64_t expect_values[] = {0x93, 0x63, 0x95, 0x65};
    for (int i = 0; i < 4; ++i) {
        auto cand = en.next();
        REQUIRE(cand.has_value());
        CHECK(cand->weight == expect_weights[i]);
        CHECK(cand->value.to_uint() == expect_values[i]);
    }
    CHECK_FALSE(en.next().has_value());
}

TEST_CASE("okea degenerate single-list merge replays the list", "[enumeration]") {
    std::mt19937_64 rng(43);
    auto table = oracles::random_table(rng);
    std::vector<std::vector<ChunkCandidate>> lists = {table.lists[0]};
    BlockEnumerator en(lists);
    for (const auto& cand : table.lists[0]) {
        auto got = en.next();
        REQUIRE(got.has_value());
        CHECK(got->weight == cand.weight);
        CHECK(got->value == cand.value);
    }
    CHECK_FALSE(en.next().has_value());
}

TEST_CASE("okea re-init replays the identical stream", "[enumeration]") {
    const auto lists = example_lists();
    BlockEnumerator a(lists), b(lists);
    for (;;) {
        auto x = a.next(), y = b.next();
        REQUIRE(x.has_value() == y.has_value());
        if (!x) break;
        CHECK(x->weight == y->weight);
        CHECK(x->value == y->value);
    }
}

TEST_CASE("okea rejects empty or unsorted lists", "[enumeration]") {
    std::vector<std::vector<ChunkCandidate>> empty = {{}};
    CHECK_THROWS_AS(BlockEnumerator(empty), std::invalid_argument);
    std::vector<std::vector<ChunkCandidate>> unsorted = {
        {{5, BitString::from_uint(0, 4)}, {1, BitString::from_uint(1, 4)}}};
    CHECK_THROWS_AS(BlockEnumerator(unsorted), std::invalid_argument);
}

TEST_CASE("okea equals the exhaustive cartesian sort on random instances", "[enumeration]") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 30; ++trial) {
        const auto table = oracles::random_table(rng, 4, 8);
        const auto expect = oracles::sorted_product(table.lists);
        BlockEnumerator en(table.lists);
        std::size_t count = 0;
        std::uint64_t last = 0;
        for (const auto& entry : expect) {
            auto got = en.next();
            REQUIRE(got.has_value());
            CHECK(got->weight == entry.weight);
            CHECK(got->value == entry.value);
            CHECK(got->weight >= last);  // non-decreasing stream
            last = got->weight;
            ++count;
        }
        CHECK_FALSE(en.next().has_value());  // permutation of the full product
        CHECK(count == expect.size());
    }
}

TEST_CASE("generate_candidates keeps the mu best per block", "[enumeration]") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const EnumerationParams params{16, 4, 2, 16, 0};
        const ChannelParams channel{0.001, 0.05};
        const auto noisy = BitString::random(16, rng);
        const auto table = generate_candidates(noisy, params, channel);
        const auto chunk_lists = build_chunk_lists(noisy, params, channel);
        REQUIRE(table.lists.size() == 2);
        for (std::uint32_t b = 0; b < 2; ++b) {
            std::vector<std::vector<ChunkCandidate>> block(chunk_lists.begin() + 2 * b,
                                                           chunk_lists.begin() + 2 * b + 2);
            auto expect = oracles::sorted_product(block);
            expect.resize(16);
            std::vector<ChunkCandidate> expect_list;
            for (const auto& entry : expect) expect_list.push_back({entry.weight, entry.value});
            std::sort(expect_list.begin(), expect_list.end(), canonical_less);
            REQUIRE(table.lists[b].size() == 16);
            for (std::size_t i = 0; i < 16; ++i) {
                CHECK(table.lists[b][i].weight == expect_list[i].weight);
                CHECK(table.lists[b][i].value == expect_list[i].value);
            }
        }
    }
}

TEST_CASE("generate_candidates single exhaustive block is the sorted keyspace", "[enumeration]") {
    std::mt19937_64 rng(59);
    const EnumerationParams params{8, 4, 2, 256, 0};
    const ChannelParams channel{0.01, 0.2};
    const auto noisy = BitString::random(8, rng);
    const auto table = generate_candidates(noisy, params, channel);
    REQUIRE(table.lists.size() == 1);
    REQUIRE(table.lists[0].size() == 256);
    CHECK(std::is_sorted(table.lists[0].begin(), table.lists[0].end(), canonical_less));
    // every 8-bit value appears exactly once
    std::vector<bool> seen(256, false);
    for (const auto& cand : table.lists[0]) {
        const auto v = cand.value.to_uint();
        CHECK_FALSE(seen[v]);
        seen[v] = true;
        // block weight is the sum of the per-chunk quantized weights
        const auto lo = to_weight(log_likelihood(cand.value.slice(0, 4), noisy.slice(0, 4), channel), 100.0);
        const auto hi = to_weight(log_likelihood(cand.value.slice(4, 4), noisy.slice(4, 4), channel), 100.0);
        CHECK(cand.weight == lo + hi);
    }
    // the unperturbed observation heads the list
    CHECK(table.lists[0][0].value == noisy);
}

TEST_CASE("generate_candidates is deterministic", "[enumeration]") {
    std::mt19937_64 rng(61);
    const EnumerationParams params{32, 4, 4, 64, 0};
    const ChannelParams channel{0.001, 0.1};
    const auto noisy = BitString::random(32, rng);
    const auto a = generate_candidates(noisy, params, channel);
    const auto b = generate_candidates(noisy, params, channel);
    REQUIRE(a.lists.size() == b.lists.size());
    for (std::size_t i = 0; i < a.lists.size(); ++i) {
        REQUIRE(a.lists[i].size() == b.lists[i].size());
        for (std::size_t j = 0; j < a.lists[i].size(); ++j) {
            CHECK(a.lists[i][j].weight == b.lists[i][j].weight);
            CHECK(a.lists[i][j].value == b.lists[i][j].value);
        }
    }
}

TEST_CASE("table serialization round trip", "[enumeration]") {
    std::mt19937_64 rng(67);
    const EnumerationParams params{16, 4, 2, 16, 13};
    const ChannelParams channel{0.001, 0.05};
    const auto noisy = BitString::random(16, rng).resized(13).resized(16);
    const auto table = generate_candidates(noisy, params, channel);
    std::stringstream ss;
    write_table(table, ss);
    const auto back = read_table(ss);
    CHECK(back.params.key_bits == table.params.key_bits);
    CHECK(back.params.significant_bits == table.params.significant_bits);
    CHECK(back.precision == table.precision);
    CHECK(back.channel.alpha == table.channel.alpha);
    CHECK(back.channel.beta == table.channel.beta);
    REQUIRE(back.lists.size() == table.lists.size());
    for (std::size_t i = 0; i < table.lists.size(); ++i) {
        REQUIRE(back.lists[i].size() == table.lists[i].size());
        for (std::size_t j = 0; j < table.lists[i].size(); ++j) {
            CHECK(back.lists[i][j].weight == table.lists[i][j].weight);
            CHECK(back.lists[i][j].value == table.lists[i][j].value);
        }
    }
}

TEST_CASE("read_table rejects malformed input", "[enumeration]") {
    std::stringstream empty;
    CHECK_THROWS_AS(read_table(empty), std::runtime_error);
    std::stringstream bad_header("16 4 2\n");
    CHECK_THROWS_AS(read_table(bad_header), std::runtime_error);
    std::stringstream bad_block("16 4 2 16 100 0.001 0.05\n7 3 aa\n");
    CHECK_THROWS_AS(read_table(bad_block), std::runtime_error);
    std::stringstream unsorted("16 4 2 16 100 0.001 0.05\n0 9 aa\n0 3 bb\n1 1 cc\n");
    CHECK_THROWS_AS(read_table(unsorted), std::runtime_error);
}
