#include "aqds/gf2.hpp"

#include <array>
#include <bit>
#include <stdexcept>
#include <vector>

#include "aqds/errors.hpp"

namespace aqds::gf2 {

namespace {

using Words = std::vector<std::uint64_t>;

// ---- word-vector polynomial helpers (coefficients low-to-high) ----

int deg_of(const Words& w) {
    for (std::size_t i = w.size(); i-- > 0;) {
        if (w[i] != 0) {
            return static_cast<int>(i) * 64 + 63 - std::countl_zero(w[i]);
        }
    }
    return -1;
}

bool get_bit(const Words& w, int i) {
    return (w[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1u;
}

// r ^= m << shift. r must already be big enough to absorb the result.
void xor_shifted(Words& r, const Words& m, int shift) {
    const std::size_t ws = static_cast<std::size_t>(shift) >> 6;
    const int bs = shift & 63;
    if (bs == 0) {
        for (std::size_t i = 0; i < m.size(); ++i) r[i + ws] ^= m[i];
    } else {
        std::uint64_t carry = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            r[i + ws] ^= (m[i] << bs) | carry;
            carry = m[i] >> (64 - bs);
        }
        if (carry != 0) r[m.size() + ws] ^= carry;
    }
}

// r mod= m, for m of degree dm >= 0. Single downward sweep over r's bits.
void mod_inplace(Words& r, const Words& m, int dm) {
    for (int i = deg_of(r); i >= dm; --i) {
        if (get_bit(r, i)) xor_shifted(r, m, i - dm);
    }
}

Words mul_words(const Words& a, int da, const Words& b, int /*db*/, int result_bits) {
    Words r(static_cast<std::size_t>(result_bits + 63) / 64 + 1, 0);
    for (int i = 0; i <= da; ++i) {
        if (get_bit(a, i)) xor_shifted(r, b, i);
    }
    return r;
}

// Bit-spreading table for squaring: over GF(2), (sum a_i x^i)^2 = sum a_i x^(2i).
std::array<std::uint16_t, 256> make_spread_table() {
    std::array<std::uint16_t, 256> t{};
    for (int b = 0; b < 256; ++b) {
        std::uint16_t v = 0;
        for (int i = 0; i < 8; ++i) {
            if (b & (1 << i)) v |= static_cast<std::uint16_t>(1u << (2 * i));
        }
        t[static_cast<std::size_t>(b)] = v;
    }
    return t;
}
const std::array<std::uint16_t, 256> kSpread8 = make_spread_table();

std::uint64_t spread32(std::uint32_t x) {
    return static_cast<std::uint64_t>(kSpread8[x & 0xff]) |
           static_cast<std::uint64_t>(kSpread8[(x >> 8) & 0xff]) << 16 |
           static_cast<std::uint64_t>(kSpread8[(x >> 16) & 0xff]) << 32 |
           static_cast<std::uint64_t>(kSpread8[(x >> 24) & 0xff]) << 48;
}

Words square_words(const Words& a) {
    Words r(a.size() * 2 + 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[2 * i] = spread32(static_cast<std::uint32_t>(a[i]));
        r[2 * i + 1] = spread32(static_cast<std::uint32_t>(a[i] >> 32));
    }
    return r;
}

Words gcd_words(Words a, Words b) {
    int db = deg_of(b);
    while (db >= 0) {
        mod_inplace(a, b, db);
        std::swap(a, b);
        db = deg_of(b);
    }
    return a;
}

Words to_words(const Gf2Poly& p) {
    Words w = p.coeffs().words();
    if (w.empty()) w.push_back(0);
    return w;
}

Gf2Poly from_words(const Words& w, std::size_t max_bits) {
    const int d = deg_of(w);
    BitString bits(static_cast<std::size_t>(d + 1) <= max_bits ? static_cast<std::size_t>(d + 1)
                                                               : max_bits);
    for (std::size_t i = 0; i < bits.words().size(); ++i) bits.words()[i] = w[i];
    bits.mask_tail();
    return Gf2Poly::from_coeffs(bits);
}

// ---- single-word fast path (degree <= 63) ----

std::uint64_t square_reduce64(std::uint64_t r, std::uint64_t p, int n) {
    // r has degree < n <= 63; its square occupies at most bits 0..2n-2.
    std::uint64_t lo = spread32(static_cast<std::uint32_t>(r));
    std::uint64_t hi = spread32(static_cast<std::uint32_t>(r >> 32));
    for (int i = 2 * n - 2; i >= n; --i) {
        const bool bit = (i >= 64) ? ((hi >> (i - 64)) & 1u) : ((lo >> i) & 1u);
        if (!bit) continue;
        const int s = i - n;
        if (s >= 64) {
            hi ^= p << (s - 64);
        } else {
            lo ^= p << s;
            if (s > 0) hi ^= p >> (64 - s);
            // for s such that s + n >= 64 the product spills into hi;
            // p >> (64-s) is exactly that spilled part (and 0 otherwise).
        }
    }
    return lo;
}

std::uint64_t mod64(std::uint64_t a, std::uint64_t b) {
    const int db = 63 - std::countl_zero(b);
    while (a != 0) {
        const int da = 63 - std::countl_zero(a);
        if (da < db) break;
        a ^= b << (da - db);
    }
    return a;
}

std::uint64_t gcd64(std::uint64_t a, std::uint64_t b) {
    while (b != 0) {
        a = mod64(a, b);
        std::swap(a, b);
    }
    return a;
}

bool is_irreducible_fast(std::uint64_t p, int n) {
    if (n == 1) return true;
    std::uint64_t r = 2;  // the polynomial x
    for (int i = 1; i <= n / 2; ++i) {
        r = square_reduce64(r, p, n);
        if (gcd64(r ^ 2u, p) != 1u) return false;
    }
    return true;
}

bool is_irreducible_generic(const Gf2Poly& p) {
    const int n = p.degree();
    if (n == 1) return true;
    const Words pw = to_words(p);
    Words r(pw.size(), 0);
    r[0] = 2;  // the polynomial x (n >= 2, already reduced mod p)
    for (int i = 1; i <= n / 2; ++i) {
        Words sq = square_words(r);
        mod_inplace(sq, pw, n);
        r.assign(pw.size(), 0);
        for (std::size_t j = 0; j < pw.size(); ++j) r[j] = sq[j];
        Words diff = r;
        diff[0] ^= 2;  // r - x
        const Words g = gcd_words(diff, pw);
        if (deg_of(g) != 0) return false;
    }
    return true;
}

// Deterministic counter-mode expansion used by derive_irreducible retries:
// a fixed 64-bit digest of the seed, combined with (attempt, word) counters
// through a strong integer finalizer.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t digest_seed(const BitString& seed) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a over the packed words
    for (std::uint64_t w : seed.words()) {
        for (int b = 0; b < 8; ++b) {
            h ^= (w >> (8 * b)) & 0xffu;
            h *= 0x100000001B3ull;
        }
    }
    h ^= static_cast<std::uint64_t>(seed.size());
    h *= 0x100000001B3ull;
    return h;
}

}  // namespace

Gf2Poly Gf2Poly::from_coeffs(const BitString& coeffs) {
    // Trim to canonical length deg+1.
    std::size_t top = coeffs.size();
    while (top > 0 && !coeffs.get(top - 1)) --top;
    Gf2Poly p;
    p.coeffs_ = BitString(top);
    for (std::size_t i = 0; i < p.coeffs_.words().size(); ++i) {
        p.coeffs_.words()[i] = coeffs.words()[i];
    }
    p.coeffs_.mask_tail();
    return p;
}

Gf2Poly Gf2Poly::one() {
    BitString b(1);
    b.set(0, true);
    return from_coeffs(b);
}

Gf2Poly Gf2Poly::x() {
    BitString b(2);
    b.set(1, true);
    return from_coeffs(b);
}

Gf2Poly poly_add(const Gf2Poly& a, const Gf2Poly& b) {
    const std::size_t len = std::max(a.coeffs().size(), b.coeffs().size());
    BitString out(len);
    for (std::size_t i = 0; i < len; ++i) {
        out.set(i, a.coeff(i) ^ b.coeff(i));
    }
    return Gf2Poly::from_coeffs(out);
}

Gf2Poly poly_mul(const Gf2Poly& a, const Gf2Poly& b) {
    if (a.is_zero() || b.is_zero()) return Gf2Poly::zero();
    const int da = a.degree();
    const int db = b.degree();
    const Words r = mul_words(to_words(a), da, to_words(b), db, da + db + 1);
    return from_words(r, static_cast<std::size_t>(da + db) + 1);
}

Gf2Poly poly_mod(const Gf2Poly& a, const Gf2Poly& m) {
    if (m.is_zero()) throw std::invalid_argument("polynomial modulus must be nonzero");
    if (a.is_zero()) return Gf2Poly::zero();
    Words r = to_words(a);
    mod_inplace(r, to_words(m), m.degree());
    return from_words(r, static_cast<std::size_t>(a.degree()) + 1);
}

Gf2Poly poly_mul_mod(const Gf2Poly& a, const Gf2Poly& b, const Gf2Poly& modulus) {
    if (modulus.degree() < 1) {
        throw std::invalid_argument("poly_mul_mod requires a modulus of degree >= 1");
    }
    return poly_mod(poly_mul(a, b), modulus);
}

Gf2Poly poly_gcd(Gf2Poly a, Gf2Poly b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const Words g = gcd_words(to_words(a), to_words(b));
    const int d = deg_of(g);
    return from_words(g, static_cast<std::size_t>(d) + 1);
}

bool is_irreducible(const Gf2Poly& p) {
    if (p.is_zero() || !p.is_monic() || p.degree() < 1) {
        throw std::invalid_argument("irreducibility test requires a monic polynomial of degree >= 1");
    }
    const int n = p.degree();
    if (n <= 63) {
        return is_irreducible_fast(p.coeffs().words()[0], n);
    }
    return is_irreducible_generic(p);
}

Gf2Poly derive_irreducible(const BitString& seed) {
    const std::size_t n = seed.size();
    if (n == 0) {
        throw std::invalid_argument("derive_irreducible requires a nonempty seed");
    }
    const std::uint64_t digest = digest_seed(seed);

    // Retry cap: candidates are irreducible with probability about 2/n, so
    // this bound is never reached in practice; it guards against a broken PRF.
    const std::uint64_t max_attempts = 256 + 64 * static_cast<std::uint64_t>(n);
    for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
        BitString low(n);
        if (attempt == 0) {
            low = seed;
        } else {
            for (std::size_t j = 0; j < low.words().size(); ++j) {
                low.words()[j] = mix64(digest ^ (attempt * 0x9E3779B97F4A7C15ull) ^
                                       (j * 0xC2B2AE3D27D4EB4Full));
            }
            low.mask_tail();
        }
        low.set(0, true);  // a zero constant term would make x a factor

        BitString coeffs(n + 1);
        for (std::size_t j = 0; j < low.words().size(); ++j) coeffs.words()[j] = low.words()[j];
        coeffs.mask_tail();
        coeffs.set(n, true);  // monic
        const Gf2Poly candidate = Gf2Poly::from_coeffs(coeffs);
        if (is_irreducible(candidate)) return candidate;
    }
    throw Error("derive_irreducible exhausted its retry budget (unreachable for a sound PRF)");
}

}  // namespace aqds::gf2
