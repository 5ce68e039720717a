#include "aqds_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <ostream>
#include <thread>
#include <utility>
#include <vector>

#include "aqds/baseline.hpp"
#include "aqds/csv.hpp"
#include "aqds/errors.hpp"
#include "aqds/finitekey.hpp"
#include "aqds/gf2.hpp"
#include "aqds/messaging.hpp"
#include "aqds/otuh.hpp"
#include "aqds/photonics.hpp"

namespace aqds::cli {

namespace {

// ---------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------

// Evaluates fn(0..count-1) on a small worker pool and returns the results
// in input order. Workers are side-effect-free, so scheduling cannot change
// the output; the first exception (if any) is rethrown after the join.
template <typename T, typename F>
std::vector<T> ordered_parallel_map(std::size_t count, const F& fn) {
    std::vector<T> out(count);
    if (count == 0) return out;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(hw, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    std::vector<std::uint8_t> bytes;
    char c;
    while (in.get(c)) bytes.push_back(static_cast<std::uint8_t>(c));
    if (in.bad()) throw ParseError(path + ": read failure");
    return bytes;
}

void write_file_bytes(const std::string& path,
                      const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ParseError(path + ": write failure");
}

photonics::ProtocolParams proto_at(const ToolConfig& cfg, double total_km,
                                   double n_pulses) {
    photonics::ProtocolParams p = cfg.proto;
    p.l_a = cfg.fraction_a * total_km;
    p.l_b = (1.0 - cfg.fraction_a) * total_km;
    p.n_pulses = n_pulses;
    return p;
}

baseline::BaselineParams base_at(const ToolConfig& cfg, double total_km,
                                 double n_pulses) {
    baseline::BaselineParams p = cfg.base;
    p.l_a = cfg.fraction_a * total_km;
    p.l_b = (1.0 - cfg.fraction_a) * total_km;
    p.n_pulses = n_pulses;
    return p;
}

}  // namespace

// ---------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------

std::vector<double> sweep_points(const SweepRange& range) {
    if (!(range.l_min >= 0.0) || !(range.l_max >= range.l_min) ||
        !(range.step > 0.0)) {
        throw std::invalid_argument(
            "sweep: need 0 <= l_min <= l_max and step > 0");
    }
    std::vector<double> points;
    const double tol =
        1e-9 * std::max({1.0, std::abs(range.l_min), std::abs(range.l_max)});
    for (std::size_t k = 0;; ++k) {
        const double l = range.l_min + static_cast<double>(k) * range.step;
        if (l >= range.l_max - tol) break;
        points.push_back(l);
    }
    points.push_back(range.l_max);
    return points;
}

int cmd_rate_curve(const ToolConfig& cfg, const SweepRange& range,
                   const std::vector<double>& n_list, std::ostream& out) {
    const std::vector<double> distances = sweep_points(range);
    std::vector<double> pulses = n_list;
    if (pulses.empty()) pulses.push_back(cfg.proto.n_pulses);

    struct PointRows {
        finitekey::AsyncRatePoint async;
        baseline::BaselineResult base;
    };
    struct Job {
        double l = 0.0;
        double n = 0.0;
    };
    std::vector<Job> jobs;
    jobs.reserve(distances.size() * pulses.size());
    for (const double l : distances) {
        for (const double n : pulses) jobs.push_back({l, n});
    }

    // Validate once up front so configuration errors surface before any
    // output, not from inside the pool.
    proto_at(cfg, range.l_min, pulses.front()).validate();
    base_at(cfg, range.l_min, pulses.front()).validate();

    const std::vector<PointRows> results = ordered_parallel_map<PointRows>(
        jobs.size(), [&](std::size_t i) {
            const Job& job = jobs[i];
            PointRows rows;
            rows.async = finitekey::async_rate_point(
                proto_at(cfg, job.l, job.n), cfg.m_bits, cfg.eps_target);
            const baseline::BaselineParams bp = base_at(cfg, job.l, job.n);
            rows.base = baseline::double_scan(bp, baseline::baseline_yields(bp),
                                              cfg.m_bits, cfg.eps_target);
            return rows;
        });

    csv::Writer writer(out, "rate-curve", 1,
                       {"l_km", "n_pulses", "protocol", "r_sig", "n", "n_z",
                        "h_min", "h_max", "h_total", "feasible"});
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Job& job = jobs[i];
        const finitekey::AsyncRatePoint& a = results[i].async;
        const double h_min = a.h_min_frac * a.n_z;
        const double h_max = a.h_max_frac * a.n_z;
        writer.row({csv::format_double(job.l), csv::format_double(job.n),
                    "async", csv::format_double(a.r_sig), csv::format_int(a.n),
                    csv::format_double(a.n_z), csv::format_double(h_min),
                    csv::format_double(h_max), csv::format_double(h_min - h_max),
                    csv::format_bool(a.feasible)});
        const baseline::BaselineResult& b = results[i].base;
        writer.row({csv::format_double(job.l), csv::format_double(job.n),
                    "baseline", csv::format_double(b.r_sig),
                    csv::format_int(b.length_l), csv::format_double(b.n_z),
                    csv::format_double(b.key_quantity), csv::format_double(0.0),
                    csv::format_double(b.key_quantity),
                    csv::format_bool(b.feasible)});
    }
    return 0;
}

int cmd_entropy_profile(const ToolConfig& cfg, const SweepRange& range,
                        double n_pulses, std::ostream& out) {
    const std::vector<double> distances = sweep_points(range);
    proto_at(cfg, range.l_min, n_pulses).validate();

    const std::vector<finitekey::EntropyBudget> budgets =
        ordered_parallel_map<finitekey::EntropyBudget>(
            distances.size(), [&](std::size_t i) {
                const photonics::ProtocolParams p =
                    proto_at(cfg, distances[i], n_pulses);
                try {
                    const photonics::PairingStats stats =
                        photonics::pairing_stats(p);
                    return finitekey::entropy_budget(
                        finitekey::estimate(stats, p), p);
                } catch (const DegenerateChannelError&) {
                    return finitekey::EntropyBudget{};
                } catch (const NoKeyError&) {
                    return finitekey::EntropyBudget{};
                }
            });

    csv::Writer writer(out, "entropy-profile", 1,
                       {"l_km", "h_min", "h_max", "h_total", "h_min_frac",
                        "h_max_frac"});
    for (std::size_t i = 0; i < distances.size(); ++i) {
        const finitekey::EntropyBudget& b = budgets[i];
        writer.row({csv::format_double(distances[i]),
                    csv::format_double(b.h_min), csv::format_double(b.h_max),
                    csv::format_double(b.margin),
                    csv::format_double(b.h_min_frac),
                    csv::format_double(b.h_max_frac)});
    }
    return 0;
}

// ---------------------------------------------------------------------
// Signing demo
// ---------------------------------------------------------------------

int cmd_sign(const std::string& doc_path, const std::string& key_path,
             const std::string& bundle_path) {
    try {
        const std::vector<std::uint8_t> doc_bytes = read_file_bytes(doc_path);
        if (doc_bytes.empty()) {
            throw ParseError(doc_path + ": empty document");
        }
        const messaging::KeyFile key =
            messaging::decode_key_file(read_file_bytes(key_path));
        if (key.role != 0 || !key.p_a.has_value()) {
            throw ParseError(key_path +
                             ": signing needs the signer key file "
                             "(role 0 with polynomial seed)");
        }
        const BitString doc =
            BitString::from_bytes(doc_bytes.data(), doc_bytes.size() * 8);
        const messaging::SignatureBundle bundle =
            messaging::sign(doc, key.shares, *key.p_a);
        write_file_bytes(bundle_path, messaging::encode_bundle(bundle));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "sign: " << e.what() << "\n";
        return 2;
    }
}

int cmd_verify(const std::string& bundle_path, const std::string& own_key_path,
               const std::string& counterpart_key_path) {
    try {
        const messaging::SignatureBundle bundle =
            messaging::decode_bundle(read_file_bytes(bundle_path));
        const messaging::KeyFile own =
            messaging::decode_key_file(read_file_bytes(own_key_path));
        const messaging::KeyFile counterpart =
            messaging::decode_key_file(read_file_bytes(counterpart_key_path));
        if (own.role == 0 || counterpart.role == 0) {
            throw ParseError("verification requires the two verifier key "
                             "files, not the signer's");
        }
        if (own.role == counterpart.role) {
            throw ParseError("the two key files carry the same role");
        }
        const messaging::Verdict verdict =
            messaging::verify(bundle, own.shares, counterpart.shares);
        return verdict == messaging::Verdict::Accept ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "verify: " << e.what() << "\n";
        return 2;
    }
}

int cmd_keygen(std::uint64_t seed, std::size_t n_bits,
               const std::string& out_prefix) {
    try {
        if (n_bits == 0) throw ParseError("key length must be >= 1 bit");
        RandomSource rng(seed);
        const messaging::KeyShares shares = messaging::split_keys(rng, n_bits);
        const BitString p_a = BitString::random(n_bits, rng);

        messaging::KeyFile alice;
        alice.role = 0;
        alice.shares = shares.alice;
        alice.p_a = p_a;
        messaging::KeyFile bob;
        bob.role = 1;
        bob.shares = shares.bob;
        messaging::KeyFile charlie;
        charlie.role = 2;
        charlie.shares = shares.charlie;

        const std::pair<const char*, const messaging::KeyFile*> files[] = {
            {".alice.key", &alice}, {".bob.key", &bob}, {".charlie.key", &charlie}};
        for (const auto& [suffix, file] : files) {
            const std::string path = out_prefix + suffix;
            write_file_bytes(path, messaging::encode_key_file(*file));
            std::cout << "wrote " << path << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "keygen: " << e.what() << "\n";
        return 2;
    }
}

// ---------------------------------------------------------------------
// Self test
// ---------------------------------------------------------------------

namespace {

struct CheckRow {
    std::string name;
    bool pass = false;
    double deviation = 0.0;
    double threshold = 0.0;
};

// Monte Carlo against the analytic statistics, at a dark rate large enough
// to be visible above the sampling error. With fault injection the analytic
// expectation x(p_d) is replaced by 2*x(0) - x(p_d) = x(-p_d) + O(p_d^2),
// emulating a sign error in the dark-rate term; the comparison must then
// fail by a wide margin.
void mc_checks(const ToolConfig& cfg, const SelftestOptions& opts,
               std::vector<CheckRow>& rows) {
    photonics::ProtocolParams p = cfg.proto;
    p.p_d_l = 0.02;
    p.p_d_r = 0.02;
    p.n_pulses = static_cast<double>(opts.mc_bins);

    RandomSource rng(cfg.seed);
    const photonics::McPairingStats mc =
        photonics::mc_oracle(p, opts.mc_bins, rng);
    photonics::PairingStats expect = photonics::pairing_stats(p);
    if (opts.inject_dark_fault) {
        photonics::ProtocolParams dark_free = p;
        dark_free.p_d_l = 0.0;
        dark_free.p_d_r = 0.0;
        const photonics::PairingStats base = photonics::pairing_stats(dark_free);
        const auto corrupt = [](double clean, double dark) {
            return 2.0 * clean - dark;
        };
        expect.q_tot = corrupt(base.q_tot, expect.q_tot);
        expect.m_z = corrupt(base.m_z, expect.m_z);
        expect.m_x = corrupt(base.m_x, expect.m_x);
        for (auto& [label, value] : expect.n_sets) {
            value = corrupt(base.n_sets.at(label), value);
        }
    }

    const photonics::SetLabel sig{photonics::Total::mu, photonics::Total::mu};
    const photonics::SetLabel check{photonics::Total::two_nu,
                                    photonics::Total::two_nu};
    // The MC-reported standard error vanishes when a sparse category records
    // zero events; floor the denominator at the Poisson scale sqrt(expected)
    // so near-empty categories are judged on the right scale.
    const auto zscore = [](double observed, double expected, double stderr_) {
        const double poisson = std::sqrt(std::max(expected, 0.0));
        return std::abs(observed - expected) /
               std::max({stderr_, poisson, 1e-12});
    };
    const std::pair<const char*, double> checks[] = {
        {"mc_q_tot", zscore(mc.value.q_tot, expect.q_tot, mc.std_err.q_tot)},
        {"mc_n_signal",
         zscore(mc.value.n_sets.at(sig), expect.n_sets.at(sig),
                mc.std_err.n_sets.at(sig))},
        {"mc_n_check",
         zscore(mc.value.n_sets.at(check), expect.n_sets.at(check),
                mc.std_err.n_sets.at(check))},
        {"mc_m_z", zscore(mc.value.m_z, expect.m_z, mc.std_err.m_z)},
        {"mc_m_x", zscore(mc.value.m_x, expect.m_x, mc.std_err.m_x)},
    };
    for (const auto& [name, z] : checks) {
        rows.push_back({name, z <= 5.0, z, 5.0});
    }
}

void bound_checks(const ToolConfig& cfg, std::vector<CheckRow>& rows) {
    RandomSource rng(cfg.seed + 1);
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        // Log-uniform magnitudes across the regimes the chain visits.
        const double x = std::pow(10.0, 9.0 * rng.next_double());
        const finitekey::ChernoffBound obs =
            finitekey::chernoff_observed(x, cfg.proto.eps);
        const finitekey::ChernoffBound exp_ =
            finitekey::chernoff_expected(x, cfg.proto.eps);
        // The bracket property: both bounds must straddle the input, and
        // the expected-value bracket must contain the observed-value one.
        const double gap =
            std::max({obs.lower - x, x - obs.upper, exp_.lower - x,
                      x - exp_.upper, exp_.lower - obs.lower,
                      obs.upper - exp_.upper});
        worst = std::max(worst, gap);
        if (gap > 0.0) ++violations;
    }
    rows.push_back({"chernoff_bracket", violations == 0,
                    static_cast<double>(violations), 0.0});

    double worst_round = 0.0;
    for (int i = 1; i < 1000; ++i) {
        const double prob = 0.5 * static_cast<double>(i) / 1000.0;
        const double back = finitekey::binary_entropy_inv(
            finitekey::binary_entropy(prob));
        worst_round = std::max(worst_round, std::abs(back - prob));
    }
    rows.push_back(
        {"entropy_roundtrip", worst_round <= 1e-10, worst_round, 1e-10});
    (void)worst;
}

void hash_checks(const ToolConfig& cfg, std::vector<CheckRow>& rows) {
    RandomSource rng(cfg.seed + 2);
    int nonzero = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = trial % 2 == 0 ? 8 : 16;
        const gf2::Gf2Poly p = gf2::derive_irreducible(BitString::random(n, rng));
        const gf2::Gf2Poly q = gf2::Gf2Poly::from_coeffs(
            BitString::random(1 + rng.next_below(24), rng));
        if (q.is_zero()) continue;
        const gf2::Gf2Poly product = gf2::poly_mul(p, q);
        const std::size_t m = product.coeffs().size() + rng.next_below(8);
        BitString message(m);
        for (std::size_t i = 0; i < product.coeffs().size(); ++i) {
            message.set(i, product.coeffs().get(i));
        }
        const otuh::ToeplitzSpec spec =
            otuh::ToeplitzSpec::create(p, BitString::random(n, rng), m);
        if (otuh::toeplitz_hash(spec, message) != BitString(n)) ++nonzero;
    }
    rows.push_back({"hash_divisibility", nonzero == 0,
                    static_cast<double>(nonzero), 0.0});

    int nonlinear = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 16, m = 64;
        const gf2::Gf2Poly p = gf2::derive_irreducible(BitString::random(n, rng));
        const otuh::ToeplitzSpec spec =
            otuh::ToeplitzSpec::create(p, BitString::random(n, rng), m);
        const BitString a = BitString::random(m, rng);
        const BitString b = BitString::random(m, rng);
        const BitString lhs = otuh::toeplitz_hash(spec, a ^ b);
        const BitString rhs = otuh::toeplitz_hash(spec, a) ^
                              otuh::toeplitz_hash(spec, b);
        if (lhs != rhs) ++nonlinear;
    }
    rows.push_back({"hash_linearity", nonlinear == 0,
                    static_cast<double>(nonlinear), 0.0});
}

void sizing_checks(const ToolConfig& cfg, std::vector<CheckRow>& rows) {
    // Asynchronous chain: the chosen per-signature length must pass the
    // forgery target while one bit less fails it.
    const photonics::ProtocolParams p = proto_at(cfg, 100.0, 1e12);
    bool async_ok = false;
    double async_dev = 1.0;
    try {
        const photonics::PairingStats stats = photonics::pairing_stats(p);
        const finitekey::EstimatedParams est = finitekey::estimate(stats, p);
        const finitekey::SignatureSizing sizing = finitekey::signature_length(
            est, p, cfg.m_bits, cfg.eps_target);
        if (sizing.feasible && sizing.n > 1) {
            const auto eps_for_at = [&](double n_bits_len) {
                const finitekey::SubgroupBounds sub =
                    finitekey::subgroup_bounds(est, n_bits_len, p.eps);
                const double h =
                    sub.s0_zn_low +
                    sub.s11_zn_low *
                        (1.0 - finitekey::binary_entropy(sub.phi11_zn_up)) -
                    n_bits_len * p.f_ec * finitekey::binary_entropy(est.e_z);
                return cfg.m_bits * std::exp2(1.0 - h);
            };
            const double at_n = eps_for_at(static_cast<double>(sizing.n));
            const double below =
                eps_for_at(static_cast<double>(sizing.n - 1));
            async_ok = at_n <= cfg.eps_target && below > cfg.eps_target;
            async_dev = async_ok ? 0.0 : 1.0;
        }
    } catch (const Error&) {
        async_ok = false;
    }
    rows.push_back({"sizing_minimal_async", async_ok, async_dev, 0.0});

    // Comparator: L satisfies the shared exponential bound, L-1 does not.
    const baseline::BaselineParams bp = base_at(cfg, 100.0, 1e13);
    const baseline::BaselineResult res = baseline::double_scan(
        bp, baseline::baseline_yields(bp), cfg.m_bits, cfg.eps_target);
    bool base_ok = false;
    if (res.feasible && res.length_l > 1) {
        const double gap = res.p_e - res.e_z_up;
        const double rate = (gap / 4.0) * (gap / 4.0);
        const auto bound = [&](double l) { return 2.0 * std::exp(-rate * l); };
        base_ok = bound(static_cast<double>(res.length_l)) <= cfg.eps_target &&
                  bound(static_cast<double>(res.length_l - 1)) >
                      cfg.eps_target;
    }
    rows.push_back(
        {"sizing_minimal_comparator", base_ok, base_ok ? 0.0 : 1.0, 0.0});
}

}  // namespace

int cmd_selftest(const ToolConfig& cfg, const SelftestOptions& opts,
                 std::ostream& out) {
    std::vector<CheckRow> rows;
    mc_checks(cfg, opts, rows);
    bound_checks(cfg, rows);
    hash_checks(cfg, rows);
    sizing_checks(cfg, rows);

    csv::Writer writer(out, "selftest", 1,
                       {"check", "pass", "deviation", "threshold"});
    bool all_pass = true;
    for (const CheckRow& row : rows) {
        all_pass = all_pass && row.pass;
        writer.row({row.name, csv::format_bool(row.pass),
                    csv::format_double(row.deviation),
                    csv::format_double(row.threshold)});
    }
    return all_pass ? 0 : 1;
}

}  // namespace aqds::cli
