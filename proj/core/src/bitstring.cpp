#include "aqds/bitstring.hpp"

#include <charconv>
#include <stdexcept>

#include "aqds/errors.hpp"

namespace aqds {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

constexpr char kHexDigits[] = "0123456789abcdef";

}  // namespace

BitString BitString::random(std::size_t nbits, RandomSource& rng) {
    BitString out(nbits);
    for (std::uint64_t& w : out.words_) w = rng.next_u64();
    out.mask_tail();
    return out;
}

void BitString::mask_tail() {
    const std::size_t rem = nbits_ & 63;
    if (rem != 0 && !words_.empty()) {
        words_.back() &= (std::uint64_t{1} << rem) - 1;
    }
}

BitString& BitString::operator^=(const BitString& other) {
    if (nbits_ != other.nbits_) {
        throw std::invalid_argument("BitString XOR requires equal lengths");
    }
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
    return *this;
}

void BitString::shift_up_one() {
    std::uint64_t carry = 0;
    for (std::uint64_t& w : words_) {
        const std::uint64_t next_carry = w >> 63;
        w = (w << 1) | carry;
        carry = next_carry;
    }
    mask_tail();
}

bool BitString::and_parity(const BitString& other) const {
    if (nbits_ != other.nbits_) {
        throw std::invalid_argument("BitString AND-parity requires equal lengths");
    }
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & other.words_[i];
    return std::popcount(acc) & 1;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
    std::vector<std::uint8_t> out((nbits_ + 7) / 8, 0);
    for (std::size_t b = 0; b < out.size(); ++b) {
        const std::size_t word = b >> 3;
        const std::size_t shift = (b & 7) * 8;
        out[b] = static_cast<std::uint8_t>(words_[word] >> shift);
    }
    return out;
}

BitString BitString::from_bytes(const std::uint8_t* data, std::size_t nbits) {
    BitString out(nbits);
    const std::size_t nbytes = (nbits + 7) / 8;
    for (std::size_t b = 0; b < nbytes; ++b) {
        const std::size_t word = b >> 3;
        const std::size_t shift = (b & 7) * 8;
        out.words_[word] |= static_cast<std::uint64_t>(data[b]) << shift;
    }
    out.mask_tail();
    return out;
}

std::string BitString::to_hex() const {
    std::string out = std::to_string(nbits_);
    out.push_back(':');
    for (std::uint8_t byte : to_bytes()) {
        out.push_back(kHexDigits[byte >> 4]);
        out.push_back(kHexDigits[byte & 0xf]);
    }
    return out;
}

BitString BitString::from_hex(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) {
        throw ParseError("bit string literal is missing the ':' separator");
    }
    std::size_t nbits = 0;
    const char* first = text.data();
    const char* last = text.data() + colon;
    const auto [ptr, ec] = std::from_chars(first, last, nbits);
    if (ec != std::errc{} || ptr != last || colon == 0) {
        throw ParseError("bit string literal has a malformed bit length");
    }
    const std::string_view hex(text.data() + colon + 1, text.size() - colon - 1);
    const std::size_t nbytes = (nbits + 7) / 8;
    if (hex.size() != 2 * nbytes) {
        throw ParseError("bit string literal has wrong hex length for its bit length");
    }
    std::vector<std::uint8_t> bytes(nbytes);
    for (std::size_t b = 0; b < nbytes; ++b) {
        const int hi = hex_digit(hex[2 * b]);
        const int lo = hex_digit(hex[2 * b + 1]);
        if (hi < 0 || lo < 0) {
            throw ParseError("bit string literal contains a non-hex character");
        }
        bytes[b] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    // Reject nonzero padding so every value has exactly one encoding.
    if (nbits % 8 != 0 && nbytes > 0) {
        const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xffu << (nbits % 8));
        if (bytes.back() & pad_mask) {
            throw ParseError("bit string literal has nonzero padding bits");
        }
    }
    return from_bytes(bytes.data(), nbits);
}

}  // namespace aqds
