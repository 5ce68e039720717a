#pragma once

#include <cstddef>
#include <vector>

#include "aqds/bitstring.hpp"
#include "aqds/gf2.hpp"

namespace aqds::otuh {

/// Parameters of one LFSR-based Toeplitz hash instance.
///
/// The hash is h(M) = H*M over GF(2), where the n-by-m matrix H has columns
/// s_0, s_1, ..., s_{m-1}: s_0 is the initial state s and each successor is
/// s_{i+1} = W*s_i for the companion matrix W of the monic irreducible
/// polynomial p (top row = p's coefficients below the leading term, identity
/// on the subdiagonal). State vectors are BitStrings with bit k holding
/// component k+1 (the topmost entry first).
struct ToeplitzSpec {
    gf2::Gf2Poly p;  ///< monic irreducible polynomial of degree n
    BitString s;     ///< initial state, n bits
    std::size_t n;   ///< digest length (bits)
    std::size_t m;   ///< message length (bits), >= 1

    /// Validates: p monic irreducible of degree >= 1, s.size() == degree,
    /// m >= 1. Throws std::invalid_argument otherwise.
    static ToeplitzSpec create(gf2::Gf2Poly p, BitString s, std::size_t m);
};

/// One application of the companion matrix: returns W*s_i. The new top
/// component is the inner product of p's low coefficients (reversed) with
/// the state; every other component is shifted down by one.
BitString lfsr_next_state(const ToeplitzSpec& spec, const BitString& s_i);

/// Incremental hasher: absorbs message bits in index order using O(n) state,
/// never materializing the matrix. This is the production evaluation path.
class ToeplitzHasher {
public:
    /// p must be monic irreducible with degree == s.size() >= 1.
    ToeplitzHasher(const gf2::Gf2Poly& p, const BitString& s);

    void absorb_bit(bool bit) {
        if (bit) digest_ ^= state_;
        advance_state();
    }

    /// Absorbs all bits of chunk, lowest index first.
    void absorb(const BitString& chunk);

    std::size_t absorbed_bits() const { return absorbed_; }

    /// Digest over everything absorbed so far (n bits).
    const BitString& digest() const { return digest_; }

private:
    void advance_state() {
        const bool top = taps_.and_parity(state_);
        state_.shift_up_one();
        state_.set(0, top);
        ++absorbed_;
    }

    BitString taps_;  ///< bit k = coefficient p_{n-1-k}; the companion matrix top row
    BitString state_;
    BitString digest_;
    std::size_t absorbed_ = 0;
};

/// One-shot hash of an m-bit message under spec. message.size() must equal
/// spec.m. Zero-length messages are rejected at spec construction (m >= 1).
BitString toeplitz_hash(const ToeplitzSpec& spec, const BitString& message);

/// Explicit matrix (test/inspection path): m columns of n bits, column i the
/// i-th LFSR state. Throws ResourceLimitError when n*m exceeds 2^26 bits.
std::vector<BitString> toeplitz_matrix(const ToeplitzSpec& spec);

}  // namespace aqds::otuh
