#include "aqds/messaging.hpp"

#include <cmath>
#include <cstring>
#include <queue>
#include <stdexcept>

#include "aqds/errors.hpp"
#include "aqds/gf2.hpp"
#include "aqds/otuh.hpp"

namespace aqds::messaging {

namespace {

void require_equal_lengths(const PartyShares& shares) {
    if (shares.x.size() != shares.y.size() || shares.x.size() != shares.z.size()) {
        throw std::invalid_argument("key shares must share one common length");
    }
}

BitString hash_document(const BitString& p_seed, const BitString& y_key, const BitString& doc) {
    const gf2::Gf2Poly p = gf2::derive_irreducible(p_seed);
    otuh::ToeplitzHasher hasher(p, y_key);
    hasher.absorb(doc);
    return hasher.digest();
}

void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void append_bits(std::vector<std::uint8_t>& out, const BitString& bits) {
    const std::vector<std::uint8_t> packed = bits.to_bytes();
    out.insert(out.end(), packed.begin(), packed.end());
}

/// Sequential cursor over an encoded container, validating as it reads.
class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    void expect_magic(const char magic[4]) {
        if (bytes_.size() < pos_ + 4 || std::memcmp(bytes_.data() + pos_, magic, 4) != 0) {
            throw ParseError("bad container magic");
        }
        pos_ += 4;
    }

    std::uint32_t read_u32_le() {
        if (bytes_.size() < pos_ + 4) throw ParseError("container truncated in a length field");
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
        pos_ += 4;
        return v;
    }

    std::uint8_t read_u8() {
        if (bytes_.size() < pos_ + 1) throw ParseError("container truncated in a flag field");
        return bytes_[pos_++];
    }

    BitString read_bits(std::size_t nbits) {
        const std::size_t nbytes = (nbits + 7) / 8;
        if (bytes_.size() < pos_ + nbytes) throw ParseError("container truncated in a bit field");
        // Reject nonzero padding so each value has exactly one encoding.
        if (nbits % 8 != 0 && nbytes > 0) {
            const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xffu << (nbits % 8));
            if (bytes_[pos_ + nbytes - 1] & pad_mask) {
                throw ParseError("container has nonzero padding bits");
            }
        }
        BitString out = BitString::from_bytes(bytes_.data() + pos_, nbits);
        pos_ += nbytes;
        return out;
    }

    void expect_end() const {
        if (pos_ != bytes_.size()) throw ParseError("container has trailing bytes");
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

constexpr char kBundleMagic[4] = {'A', 'Q', 'S', 'B'};
constexpr char kKeyMagic[4] = {'A', 'Q', 'S', 'K'};

}  // namespace

KeyShares split_keys(RandomSource& rng, std::size_t n) {
    if (n == 0) throw std::invalid_argument("key length must be >= 1");

    // Raw pool: the six uniform strings (signer's three plus one verifier's
    // three). The key-order shuffle the protocol performs after error
    // correction is modeled as a seeded permutation of the pool before it is
    // cut; permuting uniform bits changes no statistics, it mirrors the
    // protocol's key-management step.
    const std::size_t pool_bits = 6 * n;
    BitString pool = BitString::random(pool_bits, rng);
    for (std::size_t i = pool_bits - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
        const bool bi = pool.get(i);
        const bool bj = pool.get(j);
        pool.set(i, bj);
        pool.set(j, bi);
    }

    auto cut = [&pool, n](std::size_t index) {
        BitString out(n);
        for (std::size_t i = 0; i < n; ++i) out.set(i, pool.get(index * n + i));
        return out;
    };

    KeyShares shares;
    shares.alice.x = cut(0);
    shares.alice.y = cut(1);
    shares.alice.z = cut(2);
    shares.bob.x = cut(3);
    shares.bob.y = cut(4);
    shares.bob.z = cut(5);
    shares.charlie.x = shares.alice.x ^ shares.bob.x;
    shares.charlie.y = shares.alice.y ^ shares.bob.y;
    shares.charlie.z = shares.alice.z ^ shares.bob.z;
    return shares;
}

SignatureBundle sign(const BitString& doc, const PartyShares& alice, const BitString& p_a) {
    require_equal_lengths(alice);
    if (p_a.size() != alice.x.size()) {
        throw std::invalid_argument("polynomial seed length must match the key length");
    }
    if (doc.empty()) {
        throw std::invalid_argument("cannot sign an empty document");
    }
    SignatureBundle bundle;
    bundle.doc = doc;
    bundle.sig = hash_document(p_a, alice.y, doc) ^ alice.z;
    bundle.p_enc = p_a ^ alice.x;
    return bundle;
}

Verdict verify(const SignatureBundle& bundle, const PartyShares& own,
               const PartyShares& counterpart) {
    require_equal_lengths(own);
    require_equal_lengths(counterpart);
    const std::size_t n = own.x.size();
    if (counterpart.x.size() != n) {
        throw std::invalid_argument("verifier shares must share one common length");
    }
    if (bundle.sig.size() != n || bundle.p_enc.size() != n) {
        throw std::invalid_argument("bundle strings must match the key length");
    }
    if (bundle.doc.empty()) {
        throw std::invalid_argument("bundle document must be nonempty");
    }

    const BitString key_x = own.x ^ counterpart.x;
    const BitString key_y = own.y ^ counterpart.y;
    const BitString key_z = own.z ^ counterpart.z;

    const BitString p_seed = bundle.p_enc ^ key_x;
    const BitString expected_digest = bundle.sig ^ key_z;
    const BitString actual_digest = hash_document(p_seed, key_y, bundle.doc);
    return actual_digest == expected_digest ? Verdict::Accept : Verdict::Reject;
}

ThreePartyOutcome run_three_party(const BitString& doc, const KeyShares& shares,
                                  const BitString& p_a, const TamperHook& tamper) {
    // Reliable in-process channels; each queue is one authenticated leg.
    std::queue<SignatureBundle> alice_to_bob;
    std::queue<BobToCharlie> bob_to_charlie;
    std::queue<PartyShares> charlie_to_bob;

    // Alice signs and transmits.
    alice_to_bob.push(sign(doc, shares.alice, p_a));

    // Bob forwards the bundle and his shares to Charlie; the adversary may
    // rewrite this leg only.
    const SignatureBundle bob_received = alice_to_bob.front();
    alice_to_bob.pop();
    BobToCharlie forwarded{bob_received, shares.bob};
    if (tamper) tamper(forwarded);
    bob_to_charlie.push(forwarded);

    // Charlie replies with his shares.
    const BobToCharlie charlie_received = bob_to_charlie.front();
    bob_to_charlie.pop();
    charlie_to_bob.push(shares.charlie);

    // Both verify with their own shares plus the counterpart's.
    const PartyShares charlie_shares_at_bob = charlie_to_bob.front();
    charlie_to_bob.pop();

    ThreePartyOutcome outcome;
    outcome.bob = verify(bob_received, shares.bob, charlie_shares_at_bob);
    outcome.charlie =
        verify(charlie_received.bundle, shares.charlie, charlie_received.bob_shares);
    return outcome;
}

SecurityBounds security_bounds(std::size_t m, double H_n, double eps_cor, double eps_prime) {
    if (m < 1) throw std::invalid_argument("document length must be >= 1");
    if (H_n < 0) throw std::invalid_argument("information deficit must be nonnegative");
    if (!(eps_cor > 0 && eps_cor < 1) || !(eps_prime > 0 && eps_prime < 1)) {
        throw std::invalid_argument("failure parameters must lie in (0,1)");
    }
    auto clamp01 = [](double v) { return v < 0 ? 0.0 : (v > 1 ? 1.0 : v); };

    SecurityBounds b;
    b.eps_rob = clamp01(2 * eps_cor + 2 * eps_prime);
    b.eps_rep = clamp01(2 * eps_prime);
    // m * 2^(1-H_n), evaluated in log space to avoid overflow at small H_n.
    b.eps_for = clamp01(std::exp2(std::log2(static_cast<double>(m)) + 1.0 - H_n));
    b.eps_total = std::max(b.eps_rob, std::max(b.eps_rep, b.eps_for));
    return b;
}

std::vector<std::uint8_t> encode_bundle(const SignatureBundle& bundle) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kBundleMagic, kBundleMagic + 4);
    append_u32_le(out, static_cast<std::uint32_t>(bundle.sig.size()));
    append_u32_le(out, static_cast<std::uint32_t>(bundle.doc.size()));
    append_bits(out, bundle.sig);
    append_bits(out, bundle.p_enc);
    append_bits(out, bundle.doc);
    return out;
}

SignatureBundle decode_bundle(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    r.expect_magic(kBundleMagic);
    const std::uint32_t n = r.read_u32_le();
    const std::uint32_t m = r.read_u32_le();
    if (n == 0 || m == 0) throw ParseError("bundle lengths must be nonzero");
    SignatureBundle bundle;
    bundle.sig = r.read_bits(n);
    bundle.p_enc = r.read_bits(n);
    bundle.doc = r.read_bits(m);
    r.expect_end();
    return bundle;
}

std::vector<std::uint8_t> encode_key_file(const KeyFile& key) {
    require_equal_lengths(key.shares);
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kKeyMagic, kKeyMagic + 4);
    append_u32_le(out, static_cast<std::uint32_t>(key.shares.x.size()));
    out.push_back(key.role);
    out.push_back(key.p_a.has_value() ? 1 : 0);
    append_bits(out, key.shares.x);
    append_bits(out, key.shares.y);
    append_bits(out, key.shares.z);
    if (key.p_a.has_value()) {
        if (key.p_a->size() != key.shares.x.size()) {
            throw std::invalid_argument("polynomial seed length must match the key length");
        }
        append_bits(out, *key.p_a);
    }
    return out;
}

KeyFile decode_key_file(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    r.expect_magic(kKeyMagic);
    const std::uint32_t n = r.read_u32_le();
    if (n == 0) throw ParseError("key length must be nonzero");
    KeyFile key;
    key.role = r.read_u8();
    const std::uint8_t has_pa = r.read_u8();
    if (has_pa > 1) throw ParseError("seed-presence flag must be 0 or 1");
    key.shares.x = r.read_bits(n);
    key.shares.y = r.read_bits(n);
    key.shares.z = r.read_bits(n);
    if (has_pa == 1) key.p_a = r.read_bits(n);
    r.expect_end();
    return key;
}

}  // namespace aqds::messaging
