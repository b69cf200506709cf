#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "keyrec/bitstring.hpp"
#include "keyrec/prng.hpp"

namespace keyrec {

// dense GF(2) matrix, rows packed into 64-bit words
class BitMatrix {
public:
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_(rows * words_, 0) {}

    static BitMatrix random(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
        BitMatrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t w = 0; w < m.words_; ++w) m.word(r, w) = rng();
            m.mask_row(r);
        }
        return m;
    }

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        return (word(r, c / 64) >> (c % 64)) & 1u;
    }

    void set(std::size_t r, std::size_t c, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (c % 64);
        if (v) word(r, c / 64) |= mask; else word(r, c / 64) &= ~mask;
    }

    // y = M * v over GF(2); v.size() == cols, result size == rows
    BitString multiply(const BitString& v) const {
        if (v.size() != cols_)
            throw std::invalid_argument("BitMatrix::multiply: dimension mismatch");
        std::vector<std::uint64_t> vw(words_, 0);
        const auto& bytes = v.bytes();
        for (std::size_t i = 0; i < bytes.size(); ++i)
            vw[i / 8] |= static_cast<std::uint64_t>(bytes[i]) << (8 * (i % 8));
        BitString out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            std::uint64_t acc = 0;
            for (std::size_t w = 0; w < words_; ++w) acc ^= word(r, w) & vw[w];
            if (std::popcount(acc) & 1) out.set(r, true);
        }
        return out;
    }

    std::size_t rank() const {
        BitMatrix m = *this;
        std::size_t rank = 0;
        for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
            std::size_t pivot = rank;
            while (pivot < rows_ && !m.get(pivot, c)) ++pivot;
            if (pivot == rows_) continue;
            m.swap_rows(rank, pivot);
            for (std::size_t r = 0; r < rows_; ++r)
                if (r != rank && m.get(r, c)) m.xor_row(r, rank);
            ++rank;
        }
        return rank;
    }

    // Gauss-Jordan inverse; nullopt when singular (square matrices only)
    std::optional<BitMatrix> inverted() const {
        if (rows_ != cols_)
            throw std::invalid_argument("BitMatrix::inverted: matrix must be square");
        BitMatrix m = *this;
        BitMatrix inv = identity(rows_);
        for (std::size_t c = 0; c < cols_; ++c) {
            std::size_t pivot = c;
            while (pivot < rows_ && !m.get(pivot, c)) ++pivot;
            if (pivot == rows_) return std::nullopt;
            m.swap_rows(c, pivot);
            inv.swap_rows(c, pivot);
            for (std::size_t r = 0; r < rows_; ++r) {
                if (r != c && m.get(r, c)) {
                    m.xor_row(r, c);
                    inv.xor_row(r, c);
                }
            }
        }
        return inv;
    }

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::uint64_t& word(std::size_t r, std::size_t w) { return data_[r * words_ + w]; }
    const std::uint64_t& word(std::size_t r, std::size_t w) const { return data_[r * words_ + w]; }

    void mask_row(std::size_t r) {
        if (cols_ % 64 != 0)
            word(r, words_ - 1) &= ~std::uint64_t{0} >> (64 - cols_ % 64);
    }

    void swap_rows(std::size_t a, std::size_t b) {
        for (std::size_t w = 0; w < words_; ++w) std::swap(word(a, w), word(b, w));
    }

    void xor_row(std::size_t dst, std::size_t src) {
        for (std::size_t w = 0; w < words_; ++w) word(dst, w) ^= word(src, w);
    }

    std::size_t rows_, cols_, words_;
    std::vector<std::uint64_t> data_;
};

// Parametric LowMC-style SPN: n-bit state, k-bit key, m 3-bit s-boxes per
// round, r rounds.  All linear layers, round constants and key matrices are
// pseudorandomly derived from the seed.
struct LowMCParams {
    std::uint32_t block_bits = 0;  // n
    std::uint32_t key_bits = 0;    // k
    std::uint32_t sbox_count = 0;  // m
    std::uint32_t rounds = 0;      // r
    std::uint64_t seed = 0;

    void validate() const {
        if (block_bits == 0 || key_bits == 0)
            throw std::invalid_argument("LowMCParams: block_bits and key_bits must be positive");
        if (3u * sbox_count > block_bits)
            throw std::invalid_argument("LowMCParams: 3*sbox_count exceeds block_bits");
    }
};

// 3-bit s-box, packed as bit0=a, bit1=b, bit2=c
constexpr std::uint8_t sbox(std::uint8_t x) {
    const std::uint8_t a = x & 1, b = (x >> 1) & 1, c = (x >> 2) & 1;
    const std::uint8_t oa = a ^ (b & c);
    const std::uint8_t ob = a ^ b ^ (a & c);
    const std::uint8_t oc = a ^ b ^ c ^ (a & b);
    return static_cast<std::uint8_t>(oa | (ob << 1) | (oc << 2));
}

constexpr std::uint8_t inv_sbox(std::uint8_t y) {
    for (std::uint8_t x = 0; x < 8; ++x)
        if (sbox(x) == y) return x;
    return 0;  // unreachable: sbox is a bijection on 3 bits
}

struct LowMCInstance {
    LowMCParams params;
    std::vector<BitMatrix> linear;        // L_1..L_r, invertible n x n
    std::vector<BitMatrix> linear_inv;    // inverses of the above
    std::vector<BitString> constants;     // C_1..C_r, n bits
    std::vector<BitMatrix> key_matrices;  // M_0..M_r, n x k, rank min(n,k)
};

// derive all round material from params.seed by rejection sampling
inline LowMCInstance instantiate(const LowMCParams& params) {
    params.validate();
    std::mt19937_64 rng(params.seed);
    LowMCInstance inst;
    inst.params = params;
    const std::size_t n = params.block_bits, k = params.key_bits;
    const std::size_t full_rank = n < k ? n : k;
    auto next_key_matrix = [&] {
        for (;;) {
            BitMatrix m = BitMatrix::random(n, k, rng);
            if (m.rank() == full_rank) return m;
        }
    };
    inst.key_matrices.push_back(next_key_matrix());  // M_0 (whitening)
    for (std::uint32_t i = 0; i < params.rounds; ++i) {
        for (;;) {
            BitMatrix l = BitMatrix::random(n, n, rng);
            if (auto inv = l.inverted()) {
                inst.linear.push_back(std::move(l));
                inst.linear_inv.push_back(std::move(*inv));
                break;
            }
        }
        inst.constants.push_back(BitString::random(n, rng));
        inst.key_matrices.push_back(next_key_matrix());
    }
    return inst;
}

namespace detail {

inline void apply_sbox_layer(BitString& state, std::uint32_t sbox_count, bool inverse) {
    for (std::uint32_t j = 0; j < sbox_count; ++j) {
        const std::size_t base = 3 * static_cast<std::size_t>(j);
        std::uint8_t x = static_cast<std::uint8_t>(state.get(base) | (state.get(base + 1) << 1) |
                                                   (state.get(base + 2) << 2));
        x = inverse ? inv_sbox(x) : sbox(x);
        state.set(base, x & 1);
        state.set(base + 1, (x >> 1) & 1);
        state.set(base + 2, (x >> 2) & 1);
    }
}

}  // namespace detail

inline BitString encrypt(const LowMCInstance& inst, const BitString& key, const BitString& msg) {
    if (key.size() != inst.params.key_bits)
        throw std::invalid_argument("encrypt: key length mismatch");
    if (msg.size() != inst.params.block_bits)
        throw std::invalid_argument("encrypt: message length mismatch");
    BitString state = msg ^ inst.key_matrices[0].multiply(key);
    for (std::uint32_t i = 0; i < inst.params.rounds; ++i) {
        detail::apply_sbox_layer(state, inst.params.sbox_count, false);
        state = inst.linear[i].multiply(state);
        state ^= inst.constants[i];
        state ^= inst.key_matrices[i + 1].multiply(key);
    }
    return state;
}

inline BitString decrypt(const LowMCInstance& inst, const BitString& key, const BitString& ct) {
    if (key.size() != inst.params.key_bits)
        throw std::invalid_argument("decrypt: key length mismatch");
    if (ct.size() != inst.params.block_bits)
        throw std::invalid_argument("decrypt: ciphertext length mismatch");
    BitString state = ct;
    for (std::uint32_t i = inst.params.rounds; i-- > 0;) {
        state ^= inst.key_matrices[i + 1].multiply(key);
        state ^= inst.constants[i];
        state = inst.linear_inv[i].multiply(state);
        detail::apply_sbox_layer(state, inst.params.sbox_count, true);
    }
    return state ^ inst.key_matrices[0].multiply(key);
}

// Picnic-style instantiation: state (= key = block) size in bits plus the
// byte width it occupies in serialized/in-memory form
struct PicnicParamSet {
    std::string name;
    std::uint32_t state_bits = 0;
    std::uint32_t state_bytes = 0;
    LowMCParams lowmc;
};

inline const std::vector<PicnicParamSet>& picnic_parameter_sets() {
    auto make = [](std::string name, std::uint32_t bits, std::uint32_t bytes,
                   std::uint32_t sboxes, std::uint32_t rounds) {
        PicnicParamSet set;
        set.name = std::move(name);
        set.state_bits = bits;
        set.state_bytes = bytes;
        set.lowmc = LowMCParams{bits, bits, sboxes, rounds, 0};
        // instance seed fixed per named set so all parties derive one cipher
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the name
        for (char c : set.name) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
        set.lowmc.seed = h;
        return set;
    };
    // r=4 is the desk-scale default; deeper round counts are accepted via
    // LowMCParams when security-realistic instances are wanted
    static const std::vector<PicnicParamSet> sets = {
        make("picnic-L1-FS", 128, 16, 10, 4),
        make("picnic-L1-UR", 128, 16, 10, 4),
        make("picnic-L1-full", 129, 17, 43, 4),
        make("picnic3-L1", 129, 17, 43, 4),
        make("picnic-L3-FS", 192, 24, 10, 4),
        make("picnic-L3-UR", 192, 24, 10, 4),
        make("picnic-L3-full", 192, 24, 64, 4),
        make("picnic3-L3", 192, 24, 64, 4),
        make("picnic-L5-FS", 256, 32, 10, 4),
        make("picnic-L5-UR", 256, 32, 10, 4),
        make("picnic-L5-full", 255, 32, 85, 4),
        make("picnic3-L5", 255, 32, 85, 4),
    };
    return sets;
}

inline const PicnicParamSet* find_paramset(std::string_view name) {
    for (const auto& set : picnic_parameter_sets())
        if (set.name == name) return &set;
    return nullptr;
}

struct KeyPair {
    BitString secret_key;  // stored width 8*state_bytes; bits >= state_bits are zero
    BitString plaintext;   // state_bits
    BitString ciphertext;  // state_bits
};

// Draw stateSizeBytes random bytes for sk and m, zero the trailing pad bits,
// and publish (m, c = Enc_sk(m)).  sk keeps its full in-memory byte width --
// that padded image is what the recovery pipeline sees.
inline KeyPair keygen(const PicnicParamSet& set, const LowMCInstance& inst, std::uint64_t seed) {
    if (inst.params.block_bits != set.state_bits || inst.params.key_bits != set.state_bits)
        throw std::invalid_argument("keygen: instance does not match the parameter set");
    std::mt19937_64 rng(seed);
    auto rand_bytes = [&] {
        std::vector<std::uint8_t> bytes(set.state_bytes);
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
        return bytes;
    };
    const std::size_t stored_bits = 8 * static_cast<std::size_t>(set.state_bytes);
    BitString sk = BitString::from_bytes(rand_bytes(), stored_bits).resized(set.state_bits)
                       .resized(stored_bits);
    BitString m = BitString::from_bytes(rand_bytes(), stored_bits).resized(set.state_bits);
    KeyPair pair;
    pair.ciphertext = encrypt(inst, sk.prefix(set.state_bits), m);
    pair.secret_key = std::move(sk);
    pair.plaintext = std::move(m);
    return pair;
}

inline KeyPair keygen(const PicnicParamSet& set, std::uint64_t seed) {
    return keygen(set, instantiate(set.lowmc), seed);
}

}  // namespace keyrec
