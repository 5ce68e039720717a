#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "aqds/errors.hpp"
#include "aqds_cli/commands.hpp"
#include "aqds_cli/config.hpp"

namespace {

// Opens the --out target, or hands back stdout when no file was named.
struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    bool open(const std::string& path) {
        if (path.empty()) return true;
        file.open(path, std::ios::trunc);
        if (!file) return false;
        stream = &file;
        return true;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Two-photon interference digital-signature toolkit: rate and entropy "
        "sweeps for the asynchronous-pairing protocol and its fixed-pairing "
        "comparator, plus an executable three-party signing demo."};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path,
                   "flat key=value configuration file")
        ->envname("AQDS_CONFIG");

    // Every configuration key doubles as a flag; flags override the file.
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const std::string& key : aqds::cli::config_keys()) {
        app.add_option_function<std::string>(
               "--" + key,
               [&overrides, key](const std::string& value) {
                   overrides.emplace_back(key, value);
               },
               "override configuration key " + key)
            ->group("Configuration overrides");
    }

    // rate-curve ------------------------------------------------------
    auto* rate = app.add_subcommand(
        "rate-curve",
        "signature rate vs distance for both protocols (CSV; comparator rows "
        "report the signature length in n and the scanned key quantity in "
        "h_min/h_total)");
    aqds::cli::SweepRange rate_range;
    std::vector<double> rate_pulses;
    std::string rate_out;
    rate->add_option("--l-min", rate_range.l_min, "sweep start (km)")
        ->capture_default_str();
    rate->add_option("--l-max", rate_range.l_max, "sweep end (km), always emitted")
        ->capture_default_str();
    rate->add_option("--step", rate_range.step, "sweep step (km)")
        ->capture_default_str();
    rate->add_option("--N", rate_pulses,
                     "pulse-pair counts (repeatable; default: the configured "
                     "n_pulses)");
    rate->add_option("--out", rate_out, "output file (default: stdout)");

    // entropy-profile --------------------------------------------------
    auto* entropy = app.add_subcommand(
        "entropy-profile",
        "extractable-entropy and leakage accounting vs distance (CSV)");
    aqds::cli::SweepRange entropy_range;
    double entropy_pulses = 0.0;  // 0 means: use the configured n_pulses
    std::string entropy_out;
    entropy->add_option("--l-min", entropy_range.l_min, "sweep start (km)")
        ->capture_default_str();
    entropy->add_option("--l-max", entropy_range.l_max, "sweep end (km)")
        ->capture_default_str();
    entropy->add_option("--step", entropy_range.step, "sweep step (km)")
        ->capture_default_str();
    entropy->add_option("--N", entropy_pulses,
                        "pulse-pair count (default: the configured n_pulses)");
    entropy->add_option("--out", entropy_out, "output file (default: stdout)");

    // sign / verify / keygen -------------------------------------------
    auto* sign = app.add_subcommand("sign",
                                    "sign a document file with the signer key");
    std::string sign_doc, sign_key, sign_out;
    sign->add_option("--doc", sign_doc, "document file")->required();
    sign->add_option("--key", sign_key, "signer key file (role 0)")->required();
    sign->add_option("--out", sign_out, "signature bundle output")->required();

    auto* verify = app.add_subcommand(
        "verify",
        "verify a bundle; exits 0 on accept, 1 on reject, 2 on bad input");
    std::string verify_bundle, verify_own, verify_counterpart;
    verify->add_option("--bundle", verify_bundle, "signature bundle file")
        ->required();
    verify->add_option("--key", verify_own, "this verifier's key file")
        ->required();
    verify
        ->add_option("--counterpart", verify_counterpart,
                     "key file received from the other verifier")
        ->required();

    auto* keygen = app.add_subcommand(
        "keygen", "generate a deterministic three-party key set");
    std::size_t keygen_bits = 32;
    std::string keygen_prefix = "aqds";
    keygen->add_option("--n", keygen_bits, "bits per key string")
        ->capture_default_str();
    keygen->add_option("--prefix", keygen_prefix, "output path prefix")
        ->capture_default_str();

    // selftest ----------------------------------------------------------
    auto* selftest = app.add_subcommand(
        "selftest", "run the internal check suite; exits 0 only if all pass");
    aqds::cli::SelftestOptions selftest_opts;
    std::string selftest_out;
    selftest
        ->add_option("--bins", selftest_opts.mc_bins,
                     "Monte Carlo bins for the oracle comparison")
        ->capture_default_str();
    selftest->add_option("--out", selftest_out, "output file (default: stdout)");
    selftest
        ->add_flag("--inject-dark-fault", selftest_opts.inject_dark_fault,
                   "corrupt the analytic dark-rate term (must make the Monte "
                   "Carlo comparison fail)")
        ->group("");  // test hook: hidden from --help

    CLI11_PARSE(app, argc, argv);

    aqds::cli::ToolConfig cfg;
    try {
        if (!config_path.empty()) {
            aqds::cli::load_config_file(cfg, config_path);
        }
        for (const auto& [key, value] : overrides) {
            aqds::cli::apply_setting(cfg, key, value);
        }
    } catch (const aqds::ParseError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (rate->parsed()) {
            OutputTarget out;
            if (!out.open(rate_out)) {
                std::cerr << "cannot open " << rate_out << "\n";
                return 2;
            }
            return aqds::cli::cmd_rate_curve(cfg, rate_range, rate_pulses,
                                             *out.stream);
        }
        if (entropy->parsed()) {
            OutputTarget out;
            if (!out.open(entropy_out)) {
                std::cerr << "cannot open " << entropy_out << "\n";
                return 2;
            }
            const double pulses =
                entropy_pulses > 0.0 ? entropy_pulses : cfg.proto.n_pulses;
            return aqds::cli::cmd_entropy_profile(cfg, entropy_range, pulses,
                                                  *out.stream);
        }
        if (sign->parsed()) {
            return aqds::cli::cmd_sign(sign_doc, sign_key, sign_out);
        }
        if (verify->parsed()) {
            return aqds::cli::cmd_verify(verify_bundle, verify_own,
                                         verify_counterpart);
        }
        if (keygen->parsed()) {
            return aqds::cli::cmd_keygen(cfg.seed, keygen_bits, keygen_prefix);
        }
        if (selftest->parsed()) {
            OutputTarget out;
            if (!out.open(selftest_out)) {
                std::cerr << "cannot open " << selftest_out << "\n";
                return 2;
            }
            return aqds::cli::cmd_selftest(cfg, selftest_opts, *out.stream);
        }
    } catch (const aqds::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
