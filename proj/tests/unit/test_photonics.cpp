#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aqds/errors.hpp"
#include "aqds/photonics.hpp"
#include "aqds/rng.hpp"

using aqds::DegenerateChannelError;
using aqds::RandomSource;
using aqds::ResourceLimitError;
using namespace aqds::photonics;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent oracle for the zero-order modified Bessel function: the
// periodic trapezoid rule applied to its phase-average definition
// (1/2pi) * integral of exp(x*cos t). For analytic periodic integrands the
// trapezoid rule converges faster than any power of the step, so 8192
// points leave an error far below the tolerance under test.
double i0_phase_average(double x) {
    constexpr int n = 8192;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        sum += std::exp(x * std::cos(2.0 * kPi * k / n));
    }
    return sum / n;
}

// Parameter set tuned so one desk-scale Monte Carlo run produces large
// counts in every labeled set: short fiber, bright darks, few phase slices,
// and a pairing window small enough that both pairing outcomes (partner
// found / window expired) occur frequently.
ProtocolParams elevated_params() {
    ProtocolParams p;
    p.l_a = 1.0;
    p.l_b = 1.0;
    p.p_d_l = 5e-3;
    p.p_d_r = 5e-3;
    p.phase_slices = 4;
    p.t_c = 8e-9;  // 8-bin window at 1 GHz
    p.mu_a = 0.5;
    p.nu_a = 0.12;
    p.p_mu_a = 0.35;
    p.p_nu_a = 0.35;
    p.mu_b = 0.5;
    p.nu_b = 0.12;
    p.p_mu_b = 0.35;
    p.p_nu_b = 0.35;
    return p;
}

const std::vector<SetLabel>& all_labels() {
    static const std::vector<SetLabel> labels = {
        {Total::vac, Total::vac},     {Total::vac, Total::nu},
        {Total::nu, Total::vac},      {Total::nu, Total::nu},
        {Total::vac, Total::mu},      {Total::mu, Total::vac},
        {Total::mu, Total::mu},       {Total::vac, Total::two_nu},
        {Total::two_nu, Total::vac},  {Total::two_nu, Total::two_nu},
    };
    return labels;
}

double q_sum(const ProtocolParams& p, double k_a, double k_b, double theta) {
    return gain_theta(p, k_a, k_b, theta, Detector::L) +
           gain_theta(p, k_a, k_b, theta, Detector::R);
}

}  // namespace

TEST_SUITE_BEGIN("photonics");

TEST_CASE("fiber transmittance follows the dB attenuation law") {
    CHECK(channel_transmittance(0.16, 0.0) == 1.0);
    CHECK(channel_transmittance(0.16, 25.0) == doctest::Approx(std::pow(10.0, -0.4)));
    CHECK(channel_transmittance(0.2, 100.0) == doctest::Approx(1e-2));
    CHECK(channel_transmittance(0.16, 200.0) < channel_transmittance(0.16, 100.0));
}

TEST_CASE("bessel_i0 matches the phase-average oracle on both branches") {
    // Spans the series branch, the switch point, and the asymptotic branch.
    const double xs[] = {0.0, 0.3, 1.0, 5.0, 12.0, 19.5, 20.5, 35.0, 80.0, 200.0};
    for (double x : xs) {
        CAPTURE(x);
        CHECK(bessel_i0(x) == doctest::Approx(i0_phase_average(x)).epsilon(1e-11));
        CHECK(bessel_i0(-x) == bessel_i0(x));
    }
    CHECK(bessel_i0(0.0) == 1.0);
    CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777520084).epsilon(1e-13));
    CHECK_THROWS_AS(bessel_i0(std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
    CHECK_THROWS_AS(bessel_i0(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}

TEST_CASE("simpson quadrature handles trig polynomials and rejects odd panels") {
    const double cos_sq = simpson_2pi([](double t) { return std::cos(t) * std::cos(t); });
    CHECK(cos_sq == doctest::Approx(kPi).epsilon(1e-12));
    const double shifted = simpson_2pi([](double t) { return 2.0 + std::cos(t); });
    CHECK(shifted == doctest::Approx(4.0 * kPi).epsilon(1e-12));
    const double coarse = simpson_2pi([](double) { return 1.0; }, 2);
    CHECK(coarse == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    CHECK_THROWS_AS(simpson_2pi([](double) { return 1.0; }, 3), std::invalid_argument);
    CHECK_THROWS_AS(simpson_2pi([](double) { return 1.0; }, 0), std::invalid_argument);
}

TEST_CASE("per-detector gains are probabilities and vanish without light or darks") {
    ProtocolParams p;
    p.eta_d_r = 0.55;  // asymmetric detectors exercise both sign conventions
    p.p_d_r = 3e-4;
    const double ks[] = {0.0, 0.05, 0.5};
    const double thetas[] = {0.0, 0.7, kPi, 4.2};
    for (double ka : ks) {
        for (double kb : ks) {
            for (double th : thetas) {
                for (Detector det : {Detector::L, Detector::R}) {
                    const double q = gain_theta(p, ka, kb, th, det);
                    CAPTURE(ka);
                    CAPTURE(kb);
                    CAPTURE(th);
                    CHECK(q >= 0.0);
                    CHECK(q <= 1.0);
                }
            }
            const double avg = overall_gain(p, ka, kb);
            CHECK(avg >= 0.0);
            CHECK(avg <= 1.0);
        }
    }

    ProtocolParams ideal;
    ideal.p_d_l = 0.0;
    ideal.p_d_r = 0.0;
    CHECK(gain_theta(ideal, 0.0, 0.0, 1.3, Detector::L) == 0.0);
    CHECK(gain_theta(ideal, 0.0, 0.0, 1.3, Detector::R) == 0.0);
    CHECK(overall_gain(ideal, 0.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));

    // With symmetric darks and no light, exactly-one-click probability is
    // the two-detector inclusion-exclusion value 2*pd*(1-pd).
    ProtocolParams dark;
    const double pd = dark.p_d_l;
    CHECK(overall_gain(dark, 0.0, 0.0) ==
          doctest::Approx(2.0 * pd * (1.0 - pd)).epsilon(1e-12));
}

TEST_CASE("phase-averaged gain equals the quadrature mean of per-detector gains") {
    ProtocolParams p;
    p.eta_d_l = 0.80;
    p.eta_d_r = 0.55;
    p.p_d_l = 1e-5;
    p.p_d_r = 3e-4;
    p.l_a = 10.0;
    p.l_b = 30.0;
    const std::pair<double, double> combos[] = {
        {0.5, 0.5}, {0.5, 0.0}, {0.0, 0.05}, {0.05, 0.05}, {0.0, 0.0}};
    for (const auto& [ka, kb] : combos) {
        CAPTURE(ka);
        CAPTURE(kb);
        const double quad =
            simpson_2pi([&](double th) { return q_sum(p, ka, kb, th); }) / (2.0 * kPi);
        const double closed = overall_gain(p, ka, kb);
        if (closed > 0) {
            CHECK(quad == doctest::Approx(closed).epsilon(1e-8));
        } else {
            CHECK(quad == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("click statistics respond monotonically to fiber loss") {
    ProtocolParams p;
    double last_q = 1.0;
    double last_n = std::numeric_limits<double>::max();
    for (double l : {25.0, 50.0, 100.0, 150.0}) {
        p.l_a = l / 2.0;
        p.l_b = l / 2.0;
        const PairingStats s = pairing_stats(p);
        CAPTURE(l);
        CHECK(s.q_tot < last_q);
        CHECK(s.n_tot < last_n);
        CHECK(s.q_tc > 0.0);
        CHECK(s.q_tc <= 1.0);
        CHECK(s.t_mean > 0.0);
        last_q = s.q_tot;
        last_n = s.n_tot;
    }
}

TEST_CASE("pairing summary matches closed forms in tractable regimes") {
    ProtocolParams p = elevated_params();

    // q_tot is the filtered sum of selection-weighted phase-averaged gains.
    const PairingStats s = pairing_stats(p);
    const double ints_a[3] = {0.0, p.nu_a, p.mu_a};
    const double ints_b[3] = {0.0, p.nu_b, p.mu_b};
    const double probs_a[3] = {p.p_vac_a(), p.p_nu_a, p.p_mu_a};
    const double probs_b[3] = {p.p_vac_b(), p.p_nu_b, p.p_mu_b};
    double q_expected = 0.0;
    for (int ia = 0; ia < 3; ++ia) {
        for (int ib = 0; ib < 3; ++ib) {
            const bool filtered = (ia == 2 && ib == 1) || (ia == 1 && ib == 2);
            if (filtered) continue;
            q_expected += probs_a[ia] * probs_b[ib] * overall_gain(p, ints_a[ia], ints_b[ib]);
        }
    }
    CHECK(s.q_tot == doctest::Approx(q_expected).epsilon(1e-12));

    // Small window: q_tc has the direct truncated-geometric form.
    ProtocolParams small = p;
    small.t_c = 2e-8;  // 20 bins
    const PairingStats ss = pairing_stats(small);
    CHECK(ss.q_tc == doctest::Approx(1.0 - std::pow(1.0 - ss.q_tot, 20.0)).epsilon(1e-12));

    // One-bin window: only the adjacent bin can pair, so q_tc = q_tot and
    // every pair spans exactly one clock period.
    ProtocolParams one = p;
    one.t_c = 1e-9;
    const PairingStats so = pairing_stats(one);
    CHECK(so.q_tc == doctest::Approx(so.q_tot).epsilon(1e-12));
    CHECK(so.t_mean == doctest::Approx(1e-9).epsilon(1e-12));

    // Huge window: every click pairs, and the mean gap is the full
    // geometric mean 1/(F*q).
    ProtocolParams wide = p;
    wide.t_c = 1.0;
    const PairingStats sw = pairing_stats(wide);
    CHECK(sw.q_tc == doctest::Approx(1.0));
    CHECK(sw.t_mean ==
          doctest::Approx(1.0 / (wide.clock_hz * sw.q_tot)).epsilon(1e-12));

    // Pairing consumes two clicks, so at most half the clicks become pairs.
    CHECK(s.n_tot <= p.n_pulses * s.q_tot / 2.0 * (1.0 + 1e-12));

    ProtocolParams idle = p;
    idle.n_pulses = 0.0;
    const PairingStats si = pairing_stats(idle);
    CHECK(si.n_tot == 0.0);
    CHECK(si.m_z == 0.0);
    CHECK(si.m_x == 0.0);
    for (const auto& [label, count] : si.n_sets) CHECK(count == 0.0);
}

TEST_CASE("set counts decompose the pairing population") {
    const ProtocolParams p = elevated_params();
    const PairingStats s = pairing_stats(p);

    // Exactly the ten labeled sets, all nonnegative, summing below n_tot
    // (pairs with mu+nu or mu+mu per-party totals belong to no set).
    CHECK(s.n_sets.size() == 10);
    double sum = 0.0;
    for (const SetLabel& label : all_labels()) {
        REQUIRE(s.n_sets.count(label) == 1);
        const double c = s.n_sets.at(label);
        CHECK(c >= 0.0);
        sum += c;
    }
    CHECK(sum <= s.n_tot * (1.0 + 1e-12));
    CHECK(s.m_z <= s.n_sets.at({Total::mu, Total::mu}));
    CHECK(s.m_x <= s.n_sets.at({Total::two_nu, Total::two_nu}));

    // Cross-check several counts against hand-expanded split products.
    const double q = s.q_tot;
    auto w = [&](int ia, int ib) {
        const double ints_a[3] = {0.0, p.nu_a, p.mu_a};
        const double ints_b[3] = {0.0, p.nu_b, p.mu_b};
        const double probs_a[3] = {p.p_vac_a(), p.p_nu_a, p.p_mu_a};
        const double probs_b[3] = {p.p_vac_b(), p.p_nu_b, p.p_mu_b};
        const bool filtered = (ia == 2 && ib == 1) || (ia == 1 && ib == 2);
        if (filtered) return 0.0;
        return probs_a[ia] * probs_b[ib] * overall_gain(p, ints_a[ia], ints_b[ib]) / q;
    };
    const double w_oo = w(0, 0), w_mm = w(2, 2), w_mo = w(2, 0), w_om = w(0, 2);
    CHECK(s.n_sets.at({Total::mu, Total::mu}) ==
          doctest::Approx(s.n_tot * (2 * w_mm * w_oo + 2 * w_mo * w_om)).epsilon(1e-12));
    CHECK(s.m_z == doctest::Approx(s.n_tot * 2 * w_mm * w_oo).epsilon(1e-12));
    const double w_nn = w(1, 1), w_no = w(1, 0), w_on = w(0, 1);
    CHECK(s.n_sets.at({Total::nu, Total::nu}) ==
          doctest::Approx(s.n_tot * (2 * w_nn * w_oo + 2 * w_no * w_on)).epsilon(1e-12));
    CHECK(s.n_sets.at({Total::vac, Total::two_nu}) ==
          doctest::Approx(s.n_tot * w_on * w_on).epsilon(1e-12));
    CHECK(s.n_sets.at({Total::two_nu, Total::vac}) ==
          doctest::Approx(s.n_tot * w_no * w_no).epsilon(1e-12));
    CHECK(s.n_sets.at({Total::vac, Total::vac}) ==
          doctest::Approx(s.n_tot * w_oo * w_oo).epsilon(1e-12));
}

TEST_CASE("sifted X statistics collapse to the single-slice form for symmetric detectors") {
    ProtocolParams p = elevated_params();
    p.delta = 0.3;  // nonzero drift exercises the shifted-slice path
    const PairingStats s = pairing_stats(p);

    const double weight = p.p_nu_a * p.p_nu_b / s.q_tot;
    auto ql = [&](double th) { return gain_theta(p, p.nu_a, p.nu_b, th, Detector::L); };
    auto qr = [&](double th) { return gain_theta(p, p.nu_a, p.nu_b, th, Detector::R); };

    // For eta_dL = eta_dR and equal darks, q(theta+pi, L) = q(theta, R), so
    // the pi slice duplicates the zero slice and the two-slice integral is
    // twice the single-slice one.
    const double n_single =
        simpson_2pi([&](double th) {
            return (ql(th) + qr(th)) * (ql(th + p.delta) + qr(th + p.delta));
        }) *
        s.n_tot * weight * weight / (p.phase_slices * kPi);
    CHECK(s.n_sets.at({Total::two_nu, Total::two_nu}) ==
          doctest::Approx(n_single).epsilon(1e-10));

    const double m_single =
        simpson_2pi([&](double th) {
            const double opposite = ql(th) * qr(th + p.delta) + qr(th) * ql(th + p.delta);
            const double same = ql(th) * ql(th + p.delta) + qr(th) * qr(th + p.delta);
            return (1.0 - p.e_d) * opposite + p.e_d * same;
        }) *
        s.n_tot * weight * weight / (p.phase_slices * kPi);
    CHECK(s.m_x == doctest::Approx(m_single).epsilon(1e-10));
    CHECK(s.m_x > 0.0);
    CHECK(s.m_x < s.n_sets.at({Total::two_nu, Total::two_nu}));
}

TEST_CASE("degenerate channel is reported, not silently zeroed") {
    ProtocolParams p;
    p.p_mu_a = 0.0;
    p.p_nu_a = 0.0;
    p.p_mu_b = 0.0;
    p.p_nu_b = 0.0;
    p.p_d_l = 0.0;
    p.p_d_r = 0.0;
    CHECK_THROWS_AS(pairing_stats(p), DegenerateChannelError);
}

TEST_CASE("parameter guards reject out-of-range settings") {
    auto rejects = [](auto&& mutate) {
        ProtocolParams p;
        mutate(p);
        CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    };
    ProtocolParams ok;
    CHECK_NOTHROW(ok.validate());

    rejects([](ProtocolParams& p) { p.nu_a = 0.0; });
    rejects([](ProtocolParams& p) { p.nu_b = -0.1; });
    rejects([](ProtocolParams& p) { p.mu_a = 2.0 * p.nu_a; });  // boundary excluded
    rejects([](ProtocolParams& p) { p.mu_b = 0.09; });          // below 2*nu_b
    rejects([](ProtocolParams& p) { p.p_mu_a = -0.1; });
    rejects([](ProtocolParams& p) { p.p_nu_b = -1e-9; });
    rejects([](ProtocolParams& p) { p.p_mu_a = 0.7; p.p_nu_a = 0.4; });  // sum > 1
    rejects([](ProtocolParams& p) { p.eta_d_l = 0.0; });
    rejects([](ProtocolParams& p) { p.eta_d_r = 1.2; });
    rejects([](ProtocolParams& p) { p.p_d_l = -1e-12; });
    rejects([](ProtocolParams& p) { p.p_d_r = 1.0; });
    rejects([](ProtocolParams& p) { p.f_ec = 0.9; });
    rejects([](ProtocolParams& p) { p.alpha_f = 0.0; });
    rejects([](ProtocolParams& p) { p.e_d = 0.6; });
    rejects([](ProtocolParams& p) { p.eps = 0.0; });
    rejects([](ProtocolParams& p) { p.eps_e = 1.0; });
    rejects([](ProtocolParams& p) { p.clock_hz = 0.0; });
    rejects([](ProtocolParams& p) { p.phase_slices = 15; });
    rejects([](ProtocolParams& p) { p.phase_slices = 0; });
    rejects([](ProtocolParams& p) { p.t_c = 0.0; });
    rejects([](ProtocolParams& p) { p.n_pulses = -1.0; });
    rejects([](ProtocolParams& p) { p.l_a = -1.0; });
    rejects([](ProtocolParams& p) {
        p.delta = std::numeric_limits<double>::quiet_NaN();
    });
    rejects([](ProtocolParams& p) {
        p.mu_a = std::numeric_limits<double>::infinity();
    });
}

TEST_CASE("monte carlo agrees with the closed forms where counts are large") {
    ProtocolParams p = elevated_params();
    const std::uint64_t bins = 1500000;
    p.n_pulses = static_cast<double>(bins);
    const PairingStats expected = pairing_stats(p);

    RandomSource rng(0x9d1ce5u);
    const McPairingStats mc = mc_oracle(p, bins, rng);

    // Per-bin click probability: binomial error.
    const double sigma_q =
        std::sqrt(expected.q_tot * (1.0 - expected.q_tot) / static_cast<double>(bins));
    CHECK(std::fabs(mc.value.q_tot - expected.q_tot) <= 5.0 * sigma_q);

    // Window success probability, judged with the empirical standard error.
    CHECK(std::fabs(mc.value.q_tc - expected.q_tc) <=
          5.0 * std::max(mc.std_err.q_tc, 1e-9));

    // Pair count: clicks dominate the fluctuation; sqrt(total clicks) is a
    // conservative scale.
    const double sigma_pairs = std::sqrt(static_cast<double>(bins) * expected.q_tot);
    CHECK(std::fabs(mc.value.n_tot - expected.n_tot) <= 5.0 * sigma_pairs);

    CHECK(std::fabs(mc.value.t_mean - expected.t_mean) <=
          5.0 * std::max(mc.std_err.t_mean, 1e-15));

    // Set counts: Poisson scale around the closed-form expectation, plus the
    // propagated pair-count uncertainty, with a one-event floor for sets
    // whose expectation is tiny.
    auto check_count = [&](double observed, double want, const char* name) {
        CAPTURE(name);
        CAPTURE(observed);
        CAPTURE(want);
        const double frac = expected.n_tot > 0 ? want / expected.n_tot : 0.0;
        const double sigma =
            std::sqrt(std::max(want, 1.0) + frac * frac * sigma_pairs * sigma_pairs);
        CHECK(std::fabs(observed - want) <= 5.0 * sigma);
    };
    for (const SetLabel& label : all_labels()) {
        check_count(mc.value.n_sets.at(label), expected.n_sets.at(label),
                    total_name(label.first));
    }
    check_count(mc.value.m_z, expected.m_z, "m_z");
    check_count(mc.value.m_x, expected.m_x, "m_x");

    // The tuned regime must actually stress every gated statistic.
    CHECK(expected.m_z > 100.0);
    CHECK(expected.m_x > 100.0);
    CHECK(expected.n_sets.at({Total::two_nu, Total::two_nu}) > 500.0);
    CHECK(mc.value.q_tc < 0.95);  // both pairing outcomes well represented
    CHECK(mc.value.q_tc > 0.05);
}

TEST_CASE("monte carlo matches the closed forms at reference-link settings") {
    ProtocolParams p;  // 50 km total, line-rate defaults
    const std::uint64_t bins = 1000000;
    p.n_pulses = static_cast<double>(bins);
    const PairingStats expected = pairing_stats(p);

    RandomSource rng(0x50f7b01u);
    const McPairingStats mc = mc_oracle(p, bins, rng);

    const double sigma_q =
        std::sqrt(expected.q_tot * (1.0 - expected.q_tot) / static_cast<double>(bins));
    CHECK(std::fabs(mc.value.q_tot - expected.q_tot) <= 5.0 * sigma_q);
    const double sigma_pairs = std::sqrt(static_cast<double>(bins) * expected.q_tot);
    CHECK(std::fabs(mc.value.n_tot - expected.n_tot) <= 5.0 * sigma_pairs);
    for (const SetLabel& label : all_labels()) {
        const double want = expected.n_sets.at(label);
        const double sigma = std::sqrt(std::max(want, 1.0));
        CAPTURE(total_name(label.first));
        CAPTURE(total_name(label.second));
        CHECK(std::fabs(mc.value.n_sets.at(label) - want) <= 5.0 * sigma);
    }
}

TEST_CASE("monte carlo is deterministic per seed and respects its guards") {
    ProtocolParams p = elevated_params();
    RandomSource a(42), b(42), c(43);
    const McPairingStats first = mc_oracle(p, 200000, a);
    const McPairingStats second = mc_oracle(p, 200000, b);
    CHECK(first.value.q_tot == second.value.q_tot);
    CHECK(first.value.n_tot == second.value.n_tot);
    CHECK(first.value.m_x == second.value.m_x);
    CHECK(first.value.t_mean == second.value.t_mean);

    const McPairingStats other = mc_oracle(p, 200000, c);
    CHECK((other.value.q_tot != first.value.q_tot || other.value.n_tot != first.value.n_tot));

    ProtocolParams drift = p;
    drift.delta = 0.1;
    RandomSource r1(1);
    CHECK_THROWS_AS(mc_oracle(drift, 1000, r1), std::invalid_argument);

    RandomSource r2(1);
    CHECK_THROWS_AS(mc_oracle(p, 100000001ull, r2), ResourceLimitError);

    // All-vacuum source with ideal detectors: zero clicks, reported as
    // empty counts rather than an error.
    ProtocolParams quiet = p;
    quiet.p_mu_a = quiet.p_nu_a = quiet.p_mu_b = quiet.p_nu_b = 0.0;
    quiet.p_d_l = quiet.p_d_r = 0.0;
    RandomSource r3(7);
    const McPairingStats none = mc_oracle(quiet, 50000, r3);
    CHECK(none.value.q_tot == 0.0);
    CHECK(none.value.n_tot == 0.0);
    CHECK(none.value.m_z == 0.0);
    CHECK(none.value.m_x == 0.0);
}

TEST_CASE("doubling the simulated bins roughly doubles the pairs") {
    const ProtocolParams p = elevated_params();
    RandomSource a(11), b(12);
    const McPairingStats half = mc_oracle(p, 200000, a);
    const McPairingStats full = mc_oracle(p, 400000, b);
    REQUIRE(half.value.n_tot > 1000.0);
    const double ratio = full.value.n_tot / half.value.n_tot;
    CHECK(ratio > 1.85);
    CHECK(ratio < 2.15);
}

TEST_SUITE_END();
