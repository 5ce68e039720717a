#include "aqds/otuh.hpp"

#include <stdexcept>

#include "aqds/errors.hpp"

namespace aqds::otuh {

namespace {

BitString taps_from(const gf2::Gf2Poly& p) {
    // Companion-matrix top row as a mask over the state: entry k multiplies
    // state component k+1 by p_{n-1-k}, so the taps are p's low coefficients
    // in reverse order.
    const std::size_t n = static_cast<std::size_t>(p.degree());
    BitString taps(n);
    for (std::size_t k = 0; k < n; ++k) {
        taps.set(k, p.coeff(n - 1 - k));
    }
    return taps;
}

void validate_key(const gf2::Gf2Poly& p, const BitString& s) {
    if (p.degree() < 1 || !p.is_monic()) {
        throw std::invalid_argument("hash polynomial must be monic with degree >= 1");
    }
    if (!gf2::is_irreducible(p)) {
        throw std::invalid_argument("hash polynomial must be irreducible");
    }
    if (s.size() != static_cast<std::size_t>(p.degree())) {
        throw std::invalid_argument("initial state length must equal the polynomial degree");
    }
}

}  // namespace

ToeplitzSpec ToeplitzSpec::create(gf2::Gf2Poly p, BitString s, std::size_t m) {
    validate_key(p, s);
    if (m < 1) {
        throw std::invalid_argument("message length must be >= 1");
    }
    ToeplitzSpec spec;
    spec.n = static_cast<std::size_t>(p.degree());
    spec.p = std::move(p);
    spec.s = std::move(s);
    spec.m = m;
    return spec;
}

BitString lfsr_next_state(const ToeplitzSpec& spec, const BitString& s_i) {
    if (s_i.size() != spec.n) {
        throw std::invalid_argument("state length must equal the digest length");
    }
    const BitString taps = taps_from(spec.p);
    BitString next = s_i;
    const bool top = taps.and_parity(next);
    next.shift_up_one();
    next.set(0, top);
    return next;
}

ToeplitzHasher::ToeplitzHasher(const gf2::Gf2Poly& p, const BitString& s) {
    validate_key(p, s);
    taps_ = taps_from(p);
    state_ = s;
    digest_ = BitString(s.size());
}

void ToeplitzHasher::absorb(const BitString& chunk) {
    for (std::size_t i = 0; i < chunk.size(); ++i) {
        absorb_bit(chunk.get(i));
    }
}

BitString toeplitz_hash(const ToeplitzSpec& spec, const BitString& message) {
    if (message.size() != spec.m) {
        throw std::invalid_argument("message length does not match the hash specification");
    }
    ToeplitzHasher hasher(spec.p, spec.s);
    hasher.absorb(message);
    return hasher.digest();
}

std::vector<BitString> toeplitz_matrix(const ToeplitzSpec& spec) {
    constexpr std::size_t kMaxBits = std::size_t{1} << 26;
    if (spec.n != 0 && spec.n * spec.m > kMaxBits) {
        throw ResourceLimitError("explicit hash matrix would exceed the size cap");
    }
    std::vector<BitString> columns;
    columns.reserve(spec.m);
    BitString state = spec.s;
    const BitString taps = taps_from(spec.p);
    for (std::size_t i = 0; i < spec.m; ++i) {
        columns.push_back(state);
        const bool top = taps.and_parity(state);
        state.shift_up_one();
        state.set(0, top);
    }
    return columns;
}

}  // namespace aqds::otuh
