#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "aqds/bitstring.hpp"
#include "aqds/rng.hpp"

namespace aqds::messaging {

/// One party's key material: three n-bit strings with distinct roles.
/// x encrypts the hash-polynomial seed, y is the hash initial state,
/// z is the one-time pad over the digest.
struct PartyShares {
    BitString x;
    BitString y;
    BitString z;
};

/// Full three-party key relationship: the signer's strings equal the XOR of
/// the two verifiers' shares (x_a = x_b ^ x_c, and likewise for y, z), so
/// neither verifier alone knows the signer's keys.
struct KeyShares {
    PartyShares alice;
    PartyShares bob;
    PartyShares charlie;
};

/// The transmitted signature triple.
struct SignatureBundle {
    BitString doc;    ///< m-bit document
    BitString sig;    ///< n-bit encrypted digest
    BitString p_enc;  ///< n-bit encrypted hash-polynomial seed
};

enum class Verdict { Accept, Reject };

/// Closed-form failure bounds for one signing session.
struct SecurityBounds {
    double eps_rob;    ///< honest-run abort probability bound
    double eps_rep;    ///< repudiation probability bound
    double eps_for;    ///< forgery probability bound
    double eps_total;  ///< max of the three
};

/// Draw the signer's and first verifier's strings uniformly (6n bits through
/// a seeded shuffle) and derive the second verifier's shares from the XOR
/// constraint. Deterministic in the rng seed. n must be >= 1.
KeyShares split_keys(RandomSource& rng, std::size_t n);

/// Alice's signing step: digest = hash_{p(p_a), y_a}(doc), sig = digest ^ z_a,
/// p_enc = p_a ^ x_a. p_a must have the shares' common length n; doc must be
/// nonempty.
SignatureBundle sign(const BitString& doc, const PartyShares& alice, const BitString& p_a);

/// One verifier's check, given its own shares and the shares received from
/// the counterpart verifier: reconstructs the signer's strings by XOR,
/// decrypts the polynomial seed and expected digest, recomputes the digest
/// over doc, and accepts iff they match. Malformed lengths throw
/// std::invalid_argument; a well-formed but inconsistent bundle returns
/// Verdict::Reject.
Verdict verify(const SignatureBundle& bundle, const PartyShares& own,
               const PartyShares& counterpart);

/// The message Bob forwards to Charlie (second protocol leg).
struct BobToCharlie {
    SignatureBundle bundle;
    PartyShares bob_shares;
};

/// Optional adversarial mutation applied to Bob's outgoing message, modeling
/// tampering on the (otherwise reliable) Bob->Charlie channel.
using TamperHook = std::function<void(BobToCharlie&)>;

struct ThreePartyOutcome {
    Verdict bob;
    Verdict charlie;
};

/// Executes the full message flow over in-process queues:
/// Alice->Bob {sig, p_enc, doc}; Bob->Charlie {bundle, Bob's shares} (tamper
/// hook applies here); Charlie->Bob {Charlie's shares}; both verify.
ThreePartyOutcome run_three_party(const BitString& doc, const KeyShares& shares,
                                  const BitString& p_a, const TamperHook& tamper = nullptr);

/// Failure-probability bounds for document length m (bits), attacker
/// information deficit H_n (bits), and the correctness/secrecy failure
/// parameters of the key-distribution stage. All outputs clamped to [0,1].
SecurityBounds security_bounds(std::size_t m, double H_n, double eps_cor, double eps_prime);

// ---- file formats (shared by the CLI front end) ----

/// Container layout: magic "AQSB", then n and m as 32-bit little-endian bit
/// counts, then sig, p_enc, doc packed low-bit-first.
std::vector<std::uint8_t> encode_bundle(const SignatureBundle& bundle);

/// Strict inverse of encode_bundle; throws ParseError on any malformation
/// (bad magic, truncation, trailing bytes, nonzero padding, zero lengths).
SignatureBundle decode_bundle(const std::vector<std::uint8_t>& bytes);

/// Key file: magic "AQSK", n as 32-bit little-endian, a role byte
/// (0 = signer, 1/2 = verifiers), a flag byte for the presence of the
/// polynomial seed, then x, y, z (and the seed if flagged) packed
/// low-bit-first.
struct KeyFile {
    std::uint8_t role = 0;
    PartyShares shares;
    std::optional<BitString> p_a;
};

std::vector<std::uint8_t> encode_key_file(const KeyFile& key);
KeyFile decode_key_file(const std::vector<std::uint8_t>& bytes);

}  // namespace aqds::messaging
