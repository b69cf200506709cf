#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <bit>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "keyrec/prng.hpp"

namespace keyrec {

// Bit string of explicit length over byte storage.  Bit i lives in byte i/8
// at LSB position i%8, so byte 0 holds bits 0..7 and the hex form lists byte 0
// first.  Unused bits of the last byte are kept at zero (class invariant).
class BitString {
public:
    BitString() = default;

    explicit BitString(std::size_t bit_count)
        : bits_(bit_count), bytes_((bit_count + 7) / 8, 0) {}

    static BitString from_bytes(std::vector<std::uint8_t> bytes, std::size_t bit_count) {
        if (bytes.size() != (bit_count + 7) / 8)
            throw std::invalid_argument("BitString::from_bytes: byte count does not match bit count");
        BitString out;
        out.bits_ = bit_count;
        out.bytes_ = std::move(bytes);
        out.mask_tail();
        return out;
    }

    static BitString from_uint(std::uint64_t value, std::size_t bit_count) {
        if (bit_count > 64)
            throw std::invalid_argument("BitString::from_uint: more than 64 bits");
        if (bit_count < 64 && (value >> bit_count) != 0)
            throw std::invalid_argument("BitString::from_uint: value does not fit");
        BitString out(bit_count);
        for (std::size_t i = 0; i < out.bytes_.size(); ++i)
            out.bytes_[i] = static_cast<std::uint8_t>(value >> (8 * i));
        out.mask_tail();
        return out;
    }

    static BitString from_hex(std::string_view hex, std::size_t bit_count) {
        if (hex.size() != 2 * ((bit_count + 7) / 8))
            throw std::invalid_argument("BitString::from_hex: hex length does not match bit count");
        std::vector<std::uint8_t> bytes(hex.size() / 2);
        for (std::size_t i = 0; i < bytes.size(); ++i) {
            auto nib = [&](char c) -> unsigned {
                if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
                if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
                if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
                throw std::invalid_argument("BitString::from_hex: invalid hex digit");
            };
            bytes[i] = static_cast<std::uint8_t>(nib(hex[2 * i]) << 4 | nib(hex[2 * i + 1]));
        }
        return from_bytes(std::move(bytes), bit_count);
    }

    // "01" literal, bit 0 first; convenient in tests
    static BitString from_bits(std::string_view bits) {
        BitString out(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] != '0' && bits[i] != '1')
                throw std::invalid_argument("BitString::from_bits: invalid character");
            out.set(i, bits[i] == '1');
        }
        return out;
    }

    static BitString random(std::size_t bit_count, std::mt19937_64& rng) {
        BitString out(bit_count);
        for (auto& b : out.bytes_) b = static_cast<std::uint8_t>(rng());
        out.mask_tail();
        return out;
    }

    std::size_t size() const { return bits_; }
    bool empty() const { return bits_ == 0; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    bool get(std::size_t i) const {
        check_index(i);
        return (bytes_[i / 8] >> (i % 8)) & 1u;
    }

    void set(std::size_t i, bool v) {
        check_index(i);
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (i % 8));
        if (v) bytes_[i / 8] |= mask; else bytes_[i / 8] &= static_cast<std::uint8_t>(~mask);
    }

    void flip(std::size_t i) { set(i, !get(i)); }

    std::uint64_t to_uint() const {
        if (bits_ > 64) throw std::logic_error("BitString::to_uint: more than 64 bits");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < bytes_.size(); ++i)
            v |= static_cast<std::uint64_t>(bytes_[i]) << (8 * i);
        return v;
    }

    std::string to_hex() const {
        std::string s(2 * bytes_.size(), '0');
        for (std::size_t i = 0; i < bytes_.size(); ++i)
            std::snprintf(s.data() + 2 * i, 3, "%02x", bytes_[i]);
        return s;
    }

    std::string to_bits() const {
        std::string s(bits_, '0');
        for (std::size_t i = 0; i < bits_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    BitString slice(std::size_t offset, std::size_t count) const {
        if (offset + count > bits_) throw std::out_of_range("BitString::slice: out of range");
        BitString out(count);
        if (offset % 8 == 0) {
            for (std::size_t i = 0; i < out.bytes_.size(); ++i)
                out.bytes_[i] = bytes_[offset / 8 + i];
            out.mask_tail();
        } else {
            for (std::size_t i = 0; i < count; ++i)
                out.set(i, get(offset + i));
        }
        return out;
    }

    BitString prefix(std::size_t count) const { return slice(0, count); }

    void reserve(std::size_t bit_count) { bytes_.reserve((bit_count + 7) / 8); }

    void append(const BitString& other) {
        const std::size_t base = bits_;
        bits_ += other.bits_;
        bytes_.resize((bits_ + 7) / 8, 0);
        if (base % 8 == 0) {
            for (std::size_t i = 0; i < other.bytes_.size(); ++i)
                bytes_[base / 8 + i] = other.bytes_[i];
        } else {
            for (std::size_t i = 0; i < other.bits_; ++i)
                set(base + i, other.get(i));
        }
    }

    // zero-extend or truncate (truncation clears the dropped bits)
    BitString resized(std::size_t bit_count) const {
        BitString out(bit_count);
        const std::size_t n = bit_count < bits_ ? bit_count : bits_;
        for (std::size_t i = 0; i < (n + 7) / 8; ++i) out.bytes_[i] = bytes_[i];
        out.mask_tail();
        return out;
    }

    std::size_t count_ones() const {
        std::size_t c = 0;
        for (auto b : bytes_) c += static_cast<std::size_t>(std::popcount(b));
        return c;
    }

    friend BitString operator^(const BitString& a, const BitString& b) {
        if (a.bits_ != b.bits_) throw std::invalid_argument("BitString::operator^: length mismatch");
        BitString out(a.bits_);
        for (std::size_t i = 0; i < out.bytes_.size(); ++i)
            out.bytes_[i] = static_cast<std::uint8_t>(a.bytes_[i] ^ b.bytes_[i]);
        return out;
    }

    BitString& operator^=(const BitString& other) {
        if (bits_ != other.bits_) throw std::invalid_argument("BitString::operator^=: length mismatch");
        for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= other.bytes_[i];
        return *this;
    }

    friend bool operator==(const BitString& a, const BitString& b) {
        return a.bits_ == b.bits_ && a.bytes_ == b.bytes_;
    }

    // order by value as an unsigned integer (bit i has place value 2^i)
    int compare_unsigned(const BitString& other) const {
        if (bits_ != other.bits_)
            throw std::invalid_argument("BitString::compare_unsigned: length mismatch");
        for (std::size_t i = bytes_.size(); i-- > 0;) {
            if (bytes_[i] != other.bytes_[i]) return bytes_[i] < other.bytes_[i] ? -1 : 1;
        }
        return 0;
    }

private:
    void check_index(std::size_t i) const {
        if (i >= bits_) throw std::out_of_range("BitString: bit index out of range");
    }

    void mask_tail() {
        if (bits_ % 8 != 0 && !bytes_.empty())
            bytes_.back() &= static_cast<std::uint8_t>((1u << (bits_ % 8)) - 1u);
    }

    std::size_t bits_ = 0;
    std::vector<std::uint8_t> bytes_;
};

}  // namespace keyrec
