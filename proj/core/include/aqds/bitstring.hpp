#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aqds/rng.hpp"

namespace aqds {

/// Dynamically sized bit vector with value semantics.
///
/// Bits are indexed 0..size()-1. Storage is little-endian at both levels:
/// bit i lives in word i/64 at position i%64, and when packed to bytes,
/// bit i lives in byte i/8 at position i%8. Unused positions in the last
/// word are always zero (class invariant), so whole-word operations such
/// as XOR and AND-parity need no masking.
class BitString {
public:
    BitString() = default;

    /// All-zero string of n bits.
    explicit BitString(std::size_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    static BitString zeros(std::size_t nbits) { return BitString(nbits); }

    /// n random bits drawn from rng (64 at a time, low word first).
    static BitString random(std::size_t nbits, RandomSource& rng);

    /// Parse "<bitlen>:<hex>" (see to_hex). Throws ParseError on malformed
    /// input, including nonzero padding bits past bitlen.
    static BitString from_hex(const std::string& text);

    /// Unpack nbits from a little-endian, low-bit-first byte buffer.
    /// data must hold at least (nbits+7)/8 bytes; padding bits are ignored.
    static BitString from_bytes(const std::uint8_t* data, std::size_t nbits);

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (v) {
            words_[i >> 6] |= mask;
        } else {
            words_[i >> 6] &= ~mask;
        }
    }

    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    /// XOR with another string of identical length.
    BitString& operator^=(const BitString& other);
    friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }

    /// Parity of popcount(*this AND other); both must have identical length.
    /// This is the GF(2) inner product of the two strings.
    bool and_parity(const BitString& other) const;

    /// Shift every bit one position up (bit i -> bit i+1); bit 0 becomes 0
    /// and the old top bit falls off the end. Length is unchanged.
    void shift_up_one();

    std::size_t popcount() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool operator==(const BitString& other) const {
        return nbits_ == other.nbits_ && words_ == other.words_;
    }
    bool operator!=(const BitString& other) const { return !(*this == other); }

    /// "<bitlen>:<hex>" where hex encodes ceil(bitlen/8) bytes, two lowercase
    /// digits each, bytes in index order, bits packed low-bit-first per byte.
    std::string to_hex() const;

    /// Pack to bytes, low-bit-first, padding bits zero.
    std::vector<std::uint8_t> to_bytes() const;

    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

    /// Clear any bits at positions >= size() in the last word, restoring the
    /// class invariant after direct word manipulation.
    void mask_tail();

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace aqds
