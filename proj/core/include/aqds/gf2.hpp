#pragma once

#include <cstddef>
#include <cstdint>

#include "aqds/bitstring.hpp"

namespace aqds::gf2 {

/// Polynomial over GF(2).
///
/// Bit i of coeffs is the coefficient of x^i (index 0 = constant term; this
/// low-to-high convention is used for every polynomial and message in the
/// library). Canonical form: coeffs.size() == degree()+1, i.e. the top stored
/// bit is set; the zero polynomial has empty coeffs and degree() == -1.
class Gf2Poly {
public:
    Gf2Poly() = default;

    /// Canonicalize an arbitrary coefficient string (trims high zero bits).
    static Gf2Poly from_coeffs(const BitString& coeffs);

    static Gf2Poly zero() { return Gf2Poly(); }
    static Gf2Poly one();
    static Gf2Poly x();

    const BitString& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }

    /// True when the leading stored coefficient exists and equals 1.
    /// Canonical nonzero polynomials are always monic in this sense.
    bool is_monic() const { return !coeffs_.empty(); }

    bool coeff(std::size_t i) const {
        return i < coeffs_.size() && coeffs_.get(i);
    }

    bool operator==(const Gf2Poly& other) const { return coeffs_ == other.coeffs_; }
    bool operator!=(const Gf2Poly& other) const { return !(*this == other); }

private:
    BitString coeffs_;
};

/// Product a*b in GF(2)[x].
Gf2Poly poly_mul(const Gf2Poly& a, const Gf2Poly& b);

/// Remainder of a modulo m. m must be nonzero.
Gf2Poly poly_mod(const Gf2Poly& a, const Gf2Poly& m);

/// (a*b) mod modulus. modulus.degree() must be >= 1.
Gf2Poly poly_mul_mod(const Gf2Poly& a, const Gf2Poly& b, const Gf2Poly& modulus);

/// Greatest common divisor (monic by construction over GF(2)).
Gf2Poly poly_gcd(Gf2Poly a, Gf2Poly b);

/// Sum a+b (= XOR of coefficient strings).
Gf2Poly poly_add(const Gf2Poly& a, const Gf2Poly& b);

/// Irreducibility over GF(2) via the distinct-degree sieve: p of degree n is
/// reducible iff it shares a factor with x^(2^i) - x for some i <= n/2, since
/// any nontrivial factorization contains a factor of degree <= n/2. p must be
/// monic with degree >= 1.
bool is_irreducible(const Gf2Poly& p);

/// Deterministically derive a monic irreducible polynomial of degree
/// n = seed.size() from the seed bits. The seed is used directly as the low
/// coefficients (constant term forced to 1) for the first candidate; each
/// retry replaces them with the next block of a counter-mode expansion of the
/// seed, so the result is a pure function of the seed. n must be >= 1.
Gf2Poly derive_irreducible(const BitString& seed);

}  // namespace aqds::gf2
