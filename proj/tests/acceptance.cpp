// Acceptance gate: one PASS/FAIL line per criterion, exit 1 on any failure.
// Every check runs against brute-force oracles or frozen reference values.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "keyrec/keyrec.hpp"
#include "oracles.hpp"

using namespace keyrec;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, double seconds,
            const std::string& detail) {
    std::printf("%s  criterion %d: %-34s (%6.2fs)  %s\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), seconds, detail.c_str());
    if (!pass) ++failures;
}

template <typename Fn>
void run(int number, const std::string& name, double budget_seconds, Fn fn) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
        pass = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (pass && seconds >= budget_seconds) {
        pass = false;
        detail += " [over the " + std::to_string(static_cast<int>(budget_seconds)) + "s budget]";
    }
    report(number, name, pass, seconds, detail);
}

// --- criterion 1: rank + get_key vs exhaustive interval census ---------------

bool rank_census_equivalence(std::string& detail) {
    std::mt19937_64 rng(1001);
    std::uint64_t instances = 0, intervals = 0, keys = 0, mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto table = oracles::random_table(rng);  // xi <= 4, mu <= 8, weights <= 15
        const auto products = oracles::full_product(table.lists);
        std::vector<std::uint64_t> pweights;
        pweights.reserve(products.size());
        for (const auto& entry : products) pweights.push_back(entry.weight);
        ++instances;
        std::vector<const oracles::ProductEntry*> expect;
        for (std::uint64_t b2 = 1; b2 <= 64; ++b2) {
            for (std::uint64_t b1 = 0; b1 < b2; ++b1) {
                const WeightInterval interval{b1, b2};
                expect.clear();
                for (std::size_t p = 0; p < pweights.size(); ++p)
                    if (pweights[p] >= b1 && pweights[p] < b2) expect.push_back(&products[p]);
                const auto matrix = create(table, interval);
                ++intervals;
                if (matrix.total() != expect.size()) {
                    ++mismatches;
                    continue;
                }
                for (std::size_t r = 1; r <= expect.size(); ++r) {
                    const auto key = get_key(table, matrix, interval, BigCount(r));
                    ++keys;
                    if (!key || !(*key == expect[r - 1]->value)) ++mismatches;
                }
                if (get_key(table, matrix, interval, BigCount(expect.size() + 1))) ++mismatches;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%llu instances, %llu intervals, %llu keys, %llu mismatches",
                  static_cast<unsigned long long>(instances),
                  static_cast<unsigned long long>(intervals),
                  static_cast<unsigned long long>(keys),
                  static_cast<unsigned long long>(mismatches));
    detail = buf;
    return mismatches == 0;
}

// --- criterion 2: best-first enumeration vs fully sorted product -------------

bool enumeration_optimality(std::string& detail) {
    std::mt19937_64 rng(2002);
    std::uint64_t instances = 0, emissions = 0, mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t eta = 2 + static_cast<std::uint32_t>(rng() % 3);
        const std::uint32_t w = 1 + static_cast<std::uint32_t>(rng() % (16 / eta));
        std::vector<std::vector<ChunkCandidate>> lists(eta);
        for (auto& list : lists) {
            const std::uint64_t cap = std::min<std::uint64_t>(std::uint64_t{1} << w, 8);
            const std::size_t size = 1 + rng() % cap;
            for (std::size_t j = 0; j < size; ++j)
                list.push_back({rng() % 1000, BitString::from_uint(rng() & ((std::uint64_t{1} << w) - 1), w)});
            std::sort(list.begin(), list.end(), canonical_less);
        }
        ++instances;
        const auto expect = oracles::sorted_product(lists);
        BlockEnumerator en(lists);
        for (const auto& entry : expect) {
            const auto got = en.next();
            ++emissions;
            if (!got || got->weight != entry.weight || !(got->value == entry.value)) ++mismatches;
        }
        if (en.next().has_value()) ++mismatches;  // must be exhausted exactly here
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu instances, %llu emissions, %llu mismatches",
                  static_cast<unsigned long long>(instances),
                  static_cast<unsigned long long>(emissions),
                  static_cast<unsigned long long>(mismatches));
    detail = buf;
    return mismatches == 0;
}

// --- criterion 3: simulated Grover success probability ------------------------

bool grover_success(std::string& detail) {
    const std::uint64_t space = 1024, needle0 = 511;  // 0-based marked index
    const std::vector<std::uint64_t> marked = {needle0};
    const std::uint64_t k = grover::iteration_count(space, 1);
    const double reference = std::pow(std::sin(51.0 * std::asin(1.0 / 32.0)), 2.0);

    bool pass = (k == 25);
    const auto amps = grover::evolve_statevector(space, marked, k);
    const double measured = std::norm(amps[needle0]);
    pass = pass && std::fabs(measured - reference) < 1e-6;
    pass = pass && std::fabs(grover::success_probability(space, 1, k) - reference) < 1e-9;

    int hits = 0;
    auto predicate = [&](std::uint64_t i) { return i == needle0 + 1; };
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        if (grover::simulate(predicate, space, seed).found) ++hits;
    pass = pass && hits >= 990;

    char buf[160];
    std::snprintf(buf, sizeof buf, "P(marked)=%.10f vs %.10f, empirical %d/1000", measured,
                  reference, hits);
    detail = buf;
    return pass;
}

// --- criterion 4: gate-cost tables against the published totals --------------

bool cost_tables(std::string& detail) {
    // the embedded circuit table must round-trip the reference data exactly
    static const CipherCircuitEntry reference[] = {
        {"aes-128", {291150, 83116, 54400}},
        {"aes-192", {328612, 93160, 60928}},
        {"aes-256", {402878, 114778, 75072}},
        {"present-64/80", {18892, 67456, 59024}},
        {"present-64/128", {19608, 71424, 62496}},
        {"gift-64/128", {7424, 57344, 50176}},
        {"gift-128/128", {12288, 98304, 86016}},
        {"lowmc-L1", {689944, 4932, 8400}},
        {"lowmc-L3", {2271870, 9398, 12600}},
        {"lowmc-L5", {5070324, 14274, 15960}},
    };
    bool pass = cipher_circuit_table().size() == std::size(reference);
    for (const auto& row : reference) {
        const auto got = builtin_gate_counts(row.cipher_id);
        pass = pass && got.cnot == row.gates.cnot && got.cliff1q == row.gates.cliff1q &&
               got.t == row.gates.t;
    }

    double worst_cnot = 0.0, worst_t = 0.0, worst_cliff = 0.0;
    for (const char* level : {"lowmc-L1", "lowmc-L3", "lowmc-L5"}) {
        const auto per_query = builtin_gate_counts(level);
        for (std::uint32_t e : {30u, 40u, 50u}) {
            const auto computed = grover_cost(per_query, e);
            const auto published = published_attack_total(level, e);
            if (!published) return false;
            const double dc = std::fabs(computed.cnot / published->cnot - 1.0);
            const double dt = std::fabs(computed.t / published->t - 1.0);
            const double rq = computed.cliff1q / published->cliff1q;
            worst_cnot = std::max(worst_cnot, dc);
            worst_t = std::max(worst_t, dt);
            worst_cliff = std::max(worst_cliff, std::max(rq, 1.0 / rq));
            pass = pass && dc < 0.01 && dt < 0.01 && rq < 1.3 && rq > 1.0 / 1.3;
        }
    }
    std::printf("      note: published 1qCliff totals do not follow per_query*(pi/4)*2^(e/2);\n"
                "      worst ratio %.4f is accepted within a factor of 1.3 (CNOT/T within 1%%)\n",
                worst_cliff);
    char buf[160];
    std::snprintf(buf, sizeof buf, "CNOT max err %.4f%%, T max err %.4f%%, 1qCliff max ratio %.3f",
                  100.0 * worst_cnot, 100.0 * worst_t, worst_cliff);
    detail = buf;
    return pass;
}

// --- criterion 5: end-to-end recovery, classical vs simulated Grover ---------

bool end_to_end_recovery(std::string& detail) {
    const LowMCInstance cipher = instantiate(LowMCParams{16, 16, 5, 4, 515151});
    const ChannelParams channel{0.001, 0.05};
    EnumerationParams params;
    params.key_bits = 16;
    params.chunk_bits = 4;
    params.chunks_per_block = 2;
    params.list_size = 16;

    int agreements = 0, recoveries = 0, in_bound = 0;
    bool pass = true;
    for (std::uint64_t instance = 0; instance < 100; ++instance) {
        std::mt19937_64 rng(derive_seed(5005, instance));
        const BitString key = BitString::random(16, rng);
        std::vector<std::pair<BitString, BitString>> pairs;
        for (int i = 0; i < 2; ++i) {
            const BitString m = BitString::random(16, rng);
            pairs.emplace_back(m, encrypt(cipher, key, m));
        }
        const TestOracle oracle(cipher, pairs);
        const BitString noisy = perturb(key, channel, rng());

        SearchPlan plan;
        plan.target_count = std::uint64_t{1} << 12;
        plan.enumeration = params;
        plan.channel = channel;
        plan.seed = derive_seed(6006, instance);
        plan.backend = SearchBackend::classical;
        const auto classical = qks(noisy, plan, oracle);
        plan.backend = SearchBackend::grover_sim;
        const auto quantum = qks(noisy, plan, oracle);

        const bool agree = classical.key.has_value() == quantum.key.has_value() &&
                           (!classical.key || *classical.key == *quantum.key);
        if (agree) ++agreements;

        // when the true key survives the list cut and its weight lies inside
        // [B_min, B_e), both backends must deliver it
        const auto table = generate_candidates(noisy, params, channel);
        bool in_lists = true;
        std::uint64_t true_weight = 0;
        for (std::uint32_t b = 0; b < params.num_blocks() && in_lists; ++b) {
            const auto block = key.slice(std::size_t{b} * 8, 8);
            bool present = false;
            for (const auto& cand : table.lists[b])
                if (cand.value == block) {
                    true_weight += cand.weight;
                    present = true;
                    break;
                }
            in_lists = present;
        }
        if (in_lists && true_weight >= classical.min_total_weight &&
            true_weight < classical.bound_weight) {
            ++in_bound;
            const bool both = classical.key && quantum.key && *classical.key == key &&
                              *quantum.key == key;
            if (both) ++recoveries;
            pass = pass && both;
        }
        pass = pass && agree;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "agreement %d/100, recovered %d/%d keys inside [B_min,B_e)",
                  agreements, recoveries, in_bound);
    detail = buf;
    return pass && agreements == 100;
}

// --- criterion 6: success-rate sweep properties -------------------------------

bool success_rate_properties(std::string& detail) {
    ExperimentSpec spec;
    spec.paramset = *find_paramset("picnic-L1-FS");
    spec.alpha = 0.001;
    spec.beta_grid = {0.001, 0.05, 0.1, 0.2, 0.3, 0.4};
    spec.mu_grid = {256};
    spec.e_grid = {30, 40, 50};
    spec.trials = 20;
    spec.base_seed = 6006;
    spec.chunk_bits = 8;
    spec.chunks_per_block = 2;

    const auto result = run_experiment(spec);
    bool pass = result.points.size() == 6;

    // binomial 3-sigma allowance at the worst-case variance p(1-p) = 1/4
    const double slack = 3.0 * std::sqrt(0.25 / spec.trials);
    double first_rate_full = result.points.empty() ? 0.0 : result.points.front().rate_full;
    pass = pass && first_rate_full >= 0.95;
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const auto& point = result.points[i];
        pass = pass && point.rate_e.size() == 3;
        // nested bounds nest the success rates, exactly, at every point
        pass = pass && point.rate_e[0].second <= point.rate_e[1].second;
        pass = pass && point.rate_e[1].second <= point.rate_e[2].second;
        pass = pass && point.rate_e[2].second <= point.rate_full;
        if (i > 0) {
            const auto& prev = result.points[i - 1];
            pass = pass && point.rate_full <= prev.rate_full + slack;
            for (std::size_t j = 0; j < 3; ++j)
                pass = pass && point.rate_e[j].second <= prev.rate_e[j].second + slack;
        }
    }
    std::string rates = "rate_full by beta:";
    for (const auto& point : result.points) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.2f", point.rate_full);
        rates += buf;
    }
    detail = rates;
    return pass;
}

// --- criterion 7: cipher round trips ------------------------------------------

bool cipher_sanity(std::string& detail) {
    std::uint64_t checked = 0, mismatches = 0;

    // s-box bijectivity
    bool sbox_ok = true;
    std::set<std::uint8_t> image;
    for (std::uint8_t x = 0; x < 8; ++x) {
        image.insert(sbox(x));
        sbox_ok = sbox_ok && inv_sbox(sbox(x)) == x;
    }
    sbox_ok = sbox_ok && image.size() == 8;

    // padded-width instantiation: 129-bit state in 17 stored bytes
    const auto inst = instantiate(LowMCParams{129, 129, 43, 4, 707});
    std::mt19937_64 rng(708);
    for (int trial = 0; trial < 100; ++trial) {
        const auto key = BitString::random(129, rng);
        const auto msg = BitString::random(129, rng);
        ++checked;
        if (!(decrypt(inst, key, encrypt(inst, key, msg)) == msg)) ++mismatches;
    }

    // exhaustive bijection at n = 12
    const auto small = instantiate(LowMCParams{12, 12, 4, 3, 709});
    const auto key = BitString::random(12, rng);
    std::set<std::uint64_t> images;
    for (std::uint64_t m = 0; m < 4096; ++m) {
        const auto ct = encrypt(small, key, BitString::from_uint(m, 12));
        images.insert(ct.to_uint());
        ++checked;
        if (decrypt(small, key, ct).to_uint() != m) ++mismatches;
    }
    const bool bijective = images.size() == 4096;

    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu round trips, %llu mismatches, bijective=%s, sbox=%s",
                  static_cast<unsigned long long>(checked),
                  static_cast<unsigned long long>(mismatches), bijective ? "yes" : "no",
                  sbox_ok ? "ok" : "BAD");
    detail = buf;
    return mismatches == 0 && bijective && sbox_ok;
}

// --- criterion 8: channel statistics -------------------------------------------

bool channel_statistics(std::string& detail) {
    const ChannelParams truth{0.001, 0.05};
    int within = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        std::mt19937_64 rng(derive_seed(8008, seed));
        const BitString original = BitString::random(1000000, rng);
        const BitString noisy = perturb(original, truth, rng());
        const ChannelParams est = estimate_params(original, noisy);
        const double ea = std::fabs(est.alpha / truth.alpha - 1.0);
        const double eb = std::fabs(est.beta / truth.beta - 1.0);
        worst = std::max({worst, ea, eb});
        if (ea <= 0.20 && eb <= 0.20) ++within;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d/10 seeds within 20%% (worst relative error %.2f%%)", within,
                  100.0 * worst);
    detail = buf;
    return within == 10;
}

}  // namespace

int main() {
    std::printf("acceptance gate: noisy-key recovery toolkit\n");
    run(1, "rank/index census equivalence", 10.0, rank_census_equivalence);
    run(2, "best-first enumeration order", 30.0, enumeration_optimality);
    run(3, "grover simulator fidelity", 60.0, grover_success);
    run(4, "gate-cost tables", 1.0, cost_tables);
    run(5, "end-to-end key recovery", 300.0, end_to_end_recovery);
    run(6, "success-rate sweep properties", 1200.0, success_rate_properties);
    run(7, "cipher round trips", 10.0, cipher_sanity);
    run(8, "channel statistics", 10.0, channel_statistics);
    if (failures == 0) {
        std::printf("all 8 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", failures);
    return 1;
}
