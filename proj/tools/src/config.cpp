#include "aqds_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <utility>

#include "aqds/errors.hpp"

namespace aqds::cli {

namespace {

std::string trim(const std::string& text) {
    const std::size_t first = text.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const std::size_t last = text.find_last_not_of(" \t");
    return text.substr(first, last - first + 1);
}

double parse_double(const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const std::from_chars_result res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(out)) {
        throw ParseError("expected a finite number, got '" + value + "'");
    }
    return out;
}

int parse_int(const std::string& value) {
    int out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const std::from_chars_result res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError("expected an integer, got '" + value + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& value) {
    std::uint64_t out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    const std::from_chars_result res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError("expected an unsigned integer, got '" + value + "'");
    }
    return out;
}

struct Entry {
    const char* key;
    std::function<void(ToolConfig&, const std::string&)> apply;
};

Entry real(const char* key, double ToolConfig::* member) {
    return {key, [member](ToolConfig& c, const std::string& v) {
                c.*member = parse_double(v);
            }};
}

Entry proto_real(const char* key, double photonics::ProtocolParams::* member) {
    return {key, [member](ToolConfig& c, const std::string& v) {
                c.proto.*member = parse_double(v);
            }};
}

Entry base_real(const char* key, double baseline::BaselineParams::* member) {
    return {key, [member](ToolConfig& c, const std::string& v) {
                c.base.*member = parse_double(v);
            }};
}

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        // Asynchronous-pairing chain.
        proto_real("eta_d_l", &photonics::ProtocolParams::eta_d_l),
        proto_real("eta_d_r", &photonics::ProtocolParams::eta_d_r),
        proto_real("p_d_l", &photonics::ProtocolParams::p_d_l),
        proto_real("p_d_r", &photonics::ProtocolParams::p_d_r),
        proto_real("f_ec", &photonics::ProtocolParams::f_ec),
        proto_real("alpha_f", &photonics::ProtocolParams::alpha_f),
        proto_real("e_d", &photonics::ProtocolParams::e_d),
        proto_real("eps", &photonics::ProtocolParams::eps),
        proto_real("eps_e", &photonics::ProtocolParams::eps_e),
        proto_real("clock_hz", &photonics::ProtocolParams::clock_hz),
        {"phase_slices",
         [](ToolConfig& c, const std::string& v) {
             c.proto.phase_slices = parse_int(v);
         }},
        proto_real("t_c", &photonics::ProtocolParams::t_c),
        proto_real("n_pulses", &photonics::ProtocolParams::n_pulses),
        proto_real("mu_a", &photonics::ProtocolParams::mu_a),
        proto_real("nu_a", &photonics::ProtocolParams::nu_a),
        proto_real("p_mu_a", &photonics::ProtocolParams::p_mu_a),
        proto_real("p_nu_a", &photonics::ProtocolParams::p_nu_a),
        proto_real("mu_b", &photonics::ProtocolParams::mu_b),
        proto_real("nu_b", &photonics::ProtocolParams::nu_b),
        proto_real("p_mu_b", &photonics::ProtocolParams::p_mu_b),
        proto_real("p_nu_b", &photonics::ProtocolParams::p_nu_b),
        proto_real("l_a", &photonics::ProtocolParams::l_a),
        proto_real("l_b", &photonics::ProtocolParams::l_b),
        proto_real("delta", &photonics::ProtocolParams::delta),
        // Fixed-pairing comparator.
        base_real("base_eta_d", &baseline::BaselineParams::eta_d),
        base_real("base_p_d", &baseline::BaselineParams::p_d),
        base_real("base_f_ec", &baseline::BaselineParams::f_ec),
        base_real("base_alpha_f", &baseline::BaselineParams::alpha_f),
        base_real("base_e_d", &baseline::BaselineParams::e_d),
        base_real("base_eps", &baseline::BaselineParams::eps),
        base_real("base_n_pulses", &baseline::BaselineParams::n_pulses),
        base_real("base_mu_a", &baseline::BaselineParams::mu_a),
        base_real("base_nu_a", &baseline::BaselineParams::nu_a),
        base_real("base_omega_a", &baseline::BaselineParams::omega_a),
        base_real("base_p_mu_a", &baseline::BaselineParams::p_mu_a),
        base_real("base_p_nu_a", &baseline::BaselineParams::p_nu_a),
        base_real("base_p_omega_a", &baseline::BaselineParams::p_omega_a),
        base_real("base_mu_b", &baseline::BaselineParams::mu_b),
        base_real("base_nu_b", &baseline::BaselineParams::nu_b),
        base_real("base_omega_b", &baseline::BaselineParams::omega_b),
        base_real("base_p_mu_b", &baseline::BaselineParams::p_mu_b),
        base_real("base_p_nu_b", &baseline::BaselineParams::p_nu_b),
        base_real("base_p_omega_b", &baseline::BaselineParams::p_omega_b),
        base_real("base_l_a", &baseline::BaselineParams::l_a),
        base_real("base_l_b", &baseline::BaselineParams::l_b),
        {"base_scan_grid",
         [](ToolConfig& c, const std::string& v) {
             c.base.scan_grid = parse_int(v);
         }},
        // Tool-level settings.
        real("m_bits", &ToolConfig::m_bits),
        real("eps_target", &ToolConfig::eps_target),
        real("fraction_a", &ToolConfig::fraction_a),
        {"seed",
         [](ToolConfig& c, const std::string& v) { c.seed = parse_u64(v); }},
    };
    return entries;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        out.reserve(registry().size());
        for (const Entry& e : registry()) out.emplace_back(e.key);
        return out;
    }();
    return keys;
}

void apply_setting(ToolConfig& cfg, const std::string& key,
                   const std::string& value) {
    for (const Entry& e : registry()) {
        if (key == e.key) {
            try {
                e.apply(cfg, value);
            } catch (const ParseError& err) {
                throw ParseError("invalid value for '" + key +
                                 "': " + err.what());
            }
            return;
        }
    }
    throw ParseError("unknown key '" + key + "'");
}

void load_config_file(ToolConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open configuration file");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        const auto fail = [&](const std::string& msg) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail("empty key");
        if (value.empty()) fail("empty value for '" + key + "'");
        try {
            apply_setting(cfg, key, value);
        } catch (const ParseError& err) {
            fail(err.what());
        }
    }
}

}  // namespace aqds::cli
