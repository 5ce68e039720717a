#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aqds/baseline.hpp"
#include "aqds/photonics.hpp"

namespace aqds::cli {

/// Everything the subcommands read: parameters of the asynchronous-pairing
/// chain, parameters of the fixed-pairing comparator, and tool-level
/// settings. Sweep commands override the distances and pulse counts per
/// point; everything else is taken from here.
struct ToolConfig {
    photonics::ProtocolParams proto;
    baseline::BaselineParams base;
    double m_bits = 1000.0;     ///< signed message digest length (bits)
    double eps_target = 1e-10;  ///< security target for signature sizing
    double fraction_a = 0.5;    ///< share of the total distance on the A arm
    std::uint64_t seed = 1;     ///< seed for anything randomized
};

/// Every recognized flat configuration key, in a stable order. The
/// command-line front end mirrors each one as a "--<key>" flag.
const std::vector<std::string>& config_keys();

/// Applies one key = value setting to cfg. Throws ParseError for an unknown
/// key or a value that does not parse into the key's type/range.
void apply_setting(ToolConfig& cfg, const std::string& key,
                   const std::string& value);

/// Loads a flat key=value file into cfg (later lines override earlier ones;
/// '#' starts a comment; blank lines are ignored). Any malformed line,
/// unknown key, or bad value raises ParseError with a "<path>:<line>: "
/// prefix.
void load_config_file(ToolConfig& cfg, const std::string& path);

}  // namespace aqds::cli
