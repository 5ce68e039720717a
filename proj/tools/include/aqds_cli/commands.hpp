#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aqds_cli/config.hpp"

namespace aqds::cli {

/// Distance sweep specification (total fiber length, km).
struct SweepRange {
    double l_min = 50.0;
    double l_max = 500.0;
    double step = 5.0;
};

/// Inclusive sweep grid: l_min, l_min + step, ...; l_max is always included
/// as the final point (so a step larger than the span yields exactly the two
/// endpoints). Requires 0 <= l_min <= l_max and step > 0; throws
/// std::invalid_argument otherwise.
std::vector<double> sweep_points(const SweepRange& range);

/// Signature rate against distance for both protocols, one CSV row per
/// (distance, pulse count, protocol). Columns: l_km, n_pulses, protocol,
/// r_sig, n, n_z, h_min, h_max, h_total, feasible. For asynchronous rows n
/// is the per-signature key length and the entropy columns carry the
/// extractable-entropy bound and the leakage bound; for comparator rows n is
/// the signature length L and h_min/h_total carry the scanned secure-key
/// quantity (h_max is 0). Returns 0; sweep points are evaluated on a worker
/// pool and emitted in input order, so output is deterministic.
int cmd_rate_curve(const ToolConfig& cfg, const SweepRange& range,
                   const std::vector<double>& n_list, std::ostream& out);

/// Entropy accounting of the asynchronous chain against distance at a fixed
/// pulse count. Columns: l_km, h_min, h_max, h_total, h_min_frac,
/// h_max_frac, with h_total = h_min - h_max exactly. Points where the
/// channel yields no statistics at all emit zero rows. Returns 0.
int cmd_entropy_profile(const ToolConfig& cfg, const SweepRange& range,
                        double n_pulses, std::ostream& out);

/// Sign the document file with the signer's key file (role 0, polynomial
/// seed present) and write the signature bundle. Returns 0 on success, 2 on
/// any I/O or format problem.
int cmd_sign(const std::string& doc_path, const std::string& key_path,
             const std::string& bundle_path);

/// Verify a signature bundle against the verifier's own key file and the
/// counterpart key file received from the other verifier. Returns 0 on
/// accept, 1 on reject, 2 on malformed input.
int cmd_verify(const std::string& bundle_path, const std::string& own_key_path,
               const std::string& counterpart_key_path);

/// Generate a fresh three-party key set of n bits per string and write
/// <prefix>.alice.key (role 0, with polynomial seed), <prefix>.bob.key and
/// <prefix>.charlie.key (roles 1 and 2). Deterministic in the seed.
/// Returns 0 on success, 2 on I/O failure.
int cmd_keygen(std::uint64_t seed, std::size_t n_bits,
               const std::string& out_prefix);

struct SelftestOptions {
    std::uint64_t mc_bins = 400000;  ///< Monte Carlo size for the oracle check
    /// Test hook: corrupts the dark-rate term of the analytic expectations
    /// (first-order sign flip), which the Monte Carlo comparison must catch.
    bool inject_dark_fault = false;
};

/// Run the internal check suite (Monte Carlo vs analytic statistics,
/// concentration-bound identities, entropy-inverse round trip, hash-kernel
/// properties, sizing minimality) and emit one CSV row per check:
/// check, pass, deviation, threshold. Returns 0 when every check passes,
/// 1 otherwise.
int cmd_selftest(const ToolConfig& cfg, const SelftestOptions& opts,
                 std::ostream& out);

}  // namespace aqds::cli
