#include "aqds/photonics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqds/errors.hpp"

namespace aqds::photonics {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

}  // namespace

double channel_transmittance(double alpha_db_per_km, double l_km) {
    return std::pow(10.0, -alpha_db_per_km * l_km / 10.0);
}

double ProtocolParams::eta_a() const { return channel_transmittance(alpha_f, l_a); }
double ProtocolParams::eta_b() const { return channel_transmittance(alpha_f, l_b); }

void ProtocolParams::validate() const {
    require(std::isfinite(mu_a) && std::isfinite(nu_a) && std::isfinite(mu_b) &&
                std::isfinite(nu_b),
            "intensities must be finite");
    require(nu_a > 0 && nu_b > 0, "decoy intensity nu must be positive");
    // The decoy estimators compare the signal total mu (one mu pulse) with
    // the decoy total 2*nu (two nu pulses); the standard two-decoy bound
    // needs the signal to dominate that sum.
    require(mu_a > 2 * nu_a, "mu_a must exceed 2*nu_a");
    require(mu_b > 2 * nu_b, "mu_b must exceed 2*nu_b");
    require(p_mu_a >= 0 && p_nu_a >= 0 && p_vac_a() >= 0,
            "party-a probabilities must be nonnegative and sum to <= 1");
    require(p_mu_b >= 0 && p_nu_b >= 0 && p_vac_b() >= 0,
            "party-b probabilities must be nonnegative and sum to <= 1");
    require(eta_d_l > 0 && eta_d_l <= 1 && eta_d_r > 0 && eta_d_r <= 1,
            "detector efficiency must lie in (0,1]");
    require(p_d_l >= 0 && p_d_l < 1 && p_d_r >= 0 && p_d_r < 1,
            "dark-count probability must lie in [0,1)");
    require(f_ec >= 1, "error-correction factor must be >= 1");
    require(alpha_f > 0, "fiber attenuation must be positive");
    require(e_d >= 0 && e_d <= 0.5, "misalignment rate must lie in [0,1/2]");
    require(eps > 0 && eps < 1, "eps must lie in (0,1)");
    require(eps_e > 0 && eps_e < 1, "eps_e must lie in (0,1)");
    require(clock_hz > 0, "clock frequency must be positive");
    require(phase_slices >= 2 && phase_slices % 2 == 0,
            "phase_slices must be an even count >= 2");
    require(t_c > 0, "pairing window must be positive");
    require(n_pulses >= 0 && std::isfinite(n_pulses),
            "pulse-pair count must be finite and nonnegative");
    require(l_a >= 0 && l_b >= 0 && std::isfinite(l_a) && std::isfinite(l_b),
            "distances must be finite and nonnegative");
    require(std::isfinite(delta), "phase drift must be finite");
}

double bessel_i0(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("bessel_i0: non-finite input");
    const double ax = std::fabs(x);
    if (ax <= 20.0) {
        // All-positive power series sum_k ((x/2)^2k / (k!)^2): no
        // cancellation, so stopping on a 1e-14 relative term bound meets the
        // 1e-12 target everywhere in this range.
        const double q = 0.25 * ax * ax;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 200; ++k) {
            term *= q / (static_cast<double>(k) * k);
            sum += term;
            if (term < 1e-14 * sum) break;
        }
        return sum;
    }
    // Asymptotic expansion I0(x) ~ e^x/sqrt(2*pi*x) * sum_k a_k/x^k with
    // a_0 = 1, a_k = a_{k-1} * (2k-1)^2 / (8k). Terms shrink until
    // k ~ 4x >= 80, far past the 1e-14 stopping bound at x > 20.
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * ax);
        if (next >= term) break;  // series turned; best accuracy reached
        term = next;
        sum += term;
        if (term < 1e-14 * sum) break;
    }
    return std::exp(ax) / std::sqrt(kTwoPi * ax) * sum;
}

double simpson_2pi(const std::function<double(double)>& f, int panels) {
    require(panels >= 2 && panels % 2 == 0, "simpson_2pi: panel count must be even");
    const double h = kTwoPi / panels;
    double sum = f(0.0) + f(kTwoPi);
    for (int i = 1; i < panels; ++i) {
        sum += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

namespace {

// Shared precomputation for the click model at one intensity pair.
struct ClickTerms {
    double y_l, y_r;  // no-click amplitudes per detector
    double c;         // interference amplitude sqrt(eta_a k_a * eta_b k_b)
};

ClickTerms click_terms(const ProtocolParams& p, double k_a, double k_b) {
    const double za = p.eta_a() * k_a;
    const double zb = p.eta_b() * k_b;
    ClickTerms t;
    t.y_l = (1.0 - p.p_d_l) * std::exp(-p.eta_d_l * (za + zb) / 2.0);
    t.y_r = (1.0 - p.p_d_r) * std::exp(-p.eta_d_r * (za + zb) / 2.0);
    t.c = std::sqrt(za * zb);
    return t;
}

}  // namespace

double gain_theta(const ProtocolParams& params, double k_a, double k_b, double theta,
                  Detector det) {
    const ClickTerms t = click_terms(params, k_a, k_b);
    const double mod_l = t.y_l * std::exp(-params.eta_d_l * t.c * std::cos(theta));
    const double mod_r = t.y_r * std::exp(+params.eta_d_r * t.c * std::cos(theta));
    // Exactly one detector fires: the other's no-click factor times this
    // one's click probability.
    if (det == Detector::L) return mod_r * (1.0 - mod_l);
    return mod_l * (1.0 - mod_r);
}

double overall_gain(const ProtocolParams& params, double k_a, double k_b) {
    const ClickTerms t = click_terms(params, k_a, k_b);
    // Averaging exp(+-eta_d*c*cos(theta)) over theta yields I0(eta_d*c); the
    // cross term averages to I0((eta_dL - eta_dR)*c).
    return t.y_l * bessel_i0(params.eta_d_l * t.c) + t.y_r * bessel_i0(params.eta_d_r * t.c) -
           2.0 * t.y_l * t.y_r * bessel_i0((params.eta_d_l - params.eta_d_r) * t.c);
}

const char* total_name(Total t) {
    switch (t) {
        case Total::vac: return "o";
        case Total::nu: return "nu";
        case Total::two_nu: return "2nu";
        case Total::mu: return "mu";
    }
    return "?";
}

namespace {

// Intensity index convention used throughout: 0 = vacuum, 1 = nu, 2 = mu.
constexpr int kVac = 0, kNu = 1, kMu = 2;

bool filtered_combo(int ia, int ib) {
    // Mixed signal/decoy coincidences are announced and discarded before
    // pairing.
    return (ia == kMu && ib == kNu) || (ia == kNu && ib == kMu);
}

// Ordered (early, late) intensity splits producing each per-party total.
const std::vector<std::pair<int, int>>& splits_of(Total t) {
    static const std::vector<std::pair<int, int>> vac = {{kVac, kVac}};
    static const std::vector<std::pair<int, int>> nu = {{kNu, kVac}, {kVac, kNu}};
    static const std::vector<std::pair<int, int>> two_nu = {{kNu, kNu}};
    static const std::vector<std::pair<int, int>> mu = {{kMu, kVac}, {kVac, kMu}};
    switch (t) {
        case Total::vac: return vac;
        case Total::nu: return nu;
        case Total::two_nu: return two_nu;
        case Total::mu: return mu;
    }
    return vac;
}

const std::array<SetLabel, 10>& set_labels() {
    static const std::array<SetLabel, 10> labels = {{
        {Total::vac, Total::vac},
        {Total::vac, Total::nu},
        {Total::nu, Total::vac},
        {Total::nu, Total::nu},
        {Total::vac, Total::mu},
        {Total::mu, Total::vac},
        {Total::mu, Total::mu},
        {Total::vac, Total::two_nu},
        {Total::two_nu, Total::vac},
        {Total::two_nu, Total::two_nu},
    }};
    return labels;
}

}  // namespace

PairingStats pairing_stats(const ProtocolParams& params) {
    params.validate();
    const double ints_a[3] = {0.0, params.nu_a, params.mu_a};
    const double ints_b[3] = {0.0, params.nu_b, params.mu_b};
    const double probs_a[3] = {params.p_vac_a(), params.p_nu_a, params.p_mu_a};
    const double probs_b[3] = {params.p_vac_b(), params.p_nu_b, params.p_mu_b};

    // Marginal (theta-averaged) click probability per retained combo.
    double gain[3][3];
    double q_tot = 0.0;
    for (int ia = 0; ia < 3; ++ia) {
        for (int ib = 0; ib < 3; ++ib) {
            gain[ia][ib] = overall_gain(params, ints_a[ia], ints_b[ib]);
            if (!filtered_combo(ia, ib)) q_tot += probs_a[ia] * probs_b[ib] * gain[ia][ib];
        }
    }
    if (q_tot <= 0.0) {
        throw DegenerateChannelError("no click events possible: q_tot = 0");
    }

    PairingStats stats;
    stats.q_tot = q_tot;
    // Probability that a later click lands within the pairing window,
    // evaluated in log space to stay exact for tiny q_tot.
    stats.q_tc = -std::expm1(params.n_tc() * std::log1p(-q_tot));
    stats.n_tot = params.n_pulses * q_tot / (1.0 + 1.0 / stats.q_tc);
    // Mean gap of a truncated-geometric pairing interval, in seconds.
    stats.t_mean = 1.0 / (params.clock_hz * q_tot) -
                   params.t_c * (1.0 - stats.q_tc) / stats.q_tc;

    // Conditional probability that one retained click used combo (ia, ib).
    double w[3][3];
    for (int ia = 0; ia < 3; ++ia) {
        for (int ib = 0; ib < 3; ++ib) {
            w[ia][ib] = filtered_combo(ia, ib)
                            ? 0.0
                            : probs_a[ia] * probs_b[ib] * gain[ia][ib] / q_tot;
        }
    }

    for (const SetLabel& label : set_labels()) {
        double total = 0.0;
        for (const auto& [ea, la] : splits_of(label.first)) {
            for (const auto& [eb, lb] : splits_of(label.second)) {
                total += w[ea][eb] * w[la][lb];
            }
        }
        stats.n_sets[label] = stats.n_tot * total;
    }

    // Z-basis errors: both parties placed their mu pulse in the same bin of
    // the pair (the anti-aligned splits decode correctly).
    stats.m_z = stats.n_tot * 2.0 * w[kMu][kMu] * w[kVac][kVac];

    // Phase-sifted [2nu,2nu] statistics. Sifting keeps relative-phase
    // differences 0 and pi across the paired bins (fraction 2/M of the
    // uniform phase grid); the late bin carries the residual drift delta.
    // Both sifted slices are integrated explicitly; for symmetric detectors
    // q^(theta+pi,L) = q^(theta,R), which collapses the sum to twice the
    // phi = 0 slice (the familiar 1/(M*pi) prefactor form).
    const double m_slices = params.phase_slices;
    const double weight = w[kNu][kNu] / gain[kNu][kNu];  // p_nu*p_nu/q_tot
    auto q_lr = [&](double theta) {
        return std::pair<double, double>(
            gain_theta(params, params.nu_a, params.nu_b, theta, Detector::L),
            gain_theta(params, params.nu_a, params.nu_b, theta, Detector::R));
    };
    const double n_x_integral = simpson_2pi([&](double theta) {
        const auto [el, er] = q_lr(theta);
        const auto [ll, lr] = q_lr(theta + params.delta);
        const auto [pl, pr] = q_lr(theta + params.delta + kTwoPi / 2.0);
        return (el + er) * (ll + lr + pl + pr);
    });
    stats.n_sets[{Total::two_nu, Total::two_nu}] =
        stats.n_tot * weight * weight * n_x_integral / (kTwoPi * m_slices);

    const double e_d = params.e_d;
    const double m_x_integral = simpson_2pi([&](double theta) {
        const auto [el, er] = q_lr(theta);
        const auto [ll, lr] = q_lr(theta + params.delta);
        const auto [pl, pr] = q_lr(theta + params.delta + kTwoPi / 2.0);
        // phi = 0 slice: opposite detectors decode as an error unless
        // misalignment flips the verdict; phi = pi slice: same detectors do.
        const double slice0 = (1.0 - e_d) * (el * lr + er * ll) + e_d * (el * ll + er * lr);
        const double slice_pi = (1.0 - e_d) * (el * pl + er * pr) + e_d * (el * pr + er * pl);
        return slice0 + slice_pi;
    });
    stats.m_x = stats.n_tot * weight * weight * m_x_integral / (kTwoPi * m_slices);

    return stats;
}

namespace {

struct PendingClick {
    bool has = false;
    std::uint64_t bin = 0;
    int ia = 0, ib = 0;
    int phase = 0;
    Detector det = Detector::L;
};

// Maps an ordered intensity split to its per-party total, or -1 for totals
// outside the labeled sets (mu+nu, mu+mu).
int total_of(int early, int late) {
    if (early == kVac && late == kVac) return static_cast<int>(Total::vac);
    if ((early == kNu && late == kVac) || (early == kVac && late == kNu))
        return static_cast<int>(Total::nu);
    if (early == kNu && late == kNu) return static_cast<int>(Total::two_nu);
    if ((early == kMu && late == kVac) || (early == kVac && late == kMu))
        return static_cast<int>(Total::mu);
    return -1;
}

}  // namespace

McPairingStats mc_oracle(const ProtocolParams& params, std::uint64_t n_bins,
                         RandomSource& rng) {
    params.validate();
    if (n_bins > 100000000ull) {
        throw ResourceLimitError("mc_oracle: bin count exceeds the 1e8 desk-scale cap");
    }
    if (params.delta != 0.0) {
        throw std::invalid_argument(
            "mc_oracle: the drift parameter delta has no bin-level counterpart; "
            "set delta = 0");
    }

    const int m_slices = params.phase_slices;
    const double ints_a[3] = {0.0, params.nu_a, params.mu_a};
    const double ints_b[3] = {0.0, params.nu_b, params.mu_b};

    // Click probabilities per detector for every intensity combo and
    // relative phase index.
    std::vector<double> prob_l(9 * m_slices), prob_r(9 * m_slices);
    for (int ia = 0; ia < 3; ++ia) {
        for (int ib = 0; ib < 3; ++ib) {
            const ClickTerms t = click_terms(params, ints_a[ia], ints_b[ib]);
            for (int r = 0; r < m_slices; ++r) {
                const double cos_t = std::cos(kTwoPi * r / m_slices);
                const std::size_t idx = static_cast<std::size_t>((ia * 3 + ib) * m_slices + r);
                prob_l[idx] = 1.0 - t.y_l * std::exp(-params.eta_d_l * t.c * cos_t);
                prob_r[idx] = 1.0 - t.y_r * std::exp(+params.eta_d_r * t.c * cos_t);
            }
        }
    }

    const double window_bins = params.n_tc();
    std::uint64_t clicks = 0, pairs = 0;
    double gap_sum = 0.0, gap_sq_sum = 0.0;
    double set_counts[4][4] = {};
    std::uint64_t m_z_count = 0, m_x_count = 0;
    PendingClick pending;

    for (std::uint64_t bin = 0; bin < n_bins; ++bin) {
        // Draw order per bin (stable for reproducibility): intensity a,
        // intensity b, relative phase, detector L, detector R.
        const double ua = rng.next_double();
        const int ia = ua < params.p_mu_a ? kMu : (ua < params.p_mu_a + params.p_nu_a ? kNu : kVac);
        const double ub = rng.next_double();
        const int ib = ub < params.p_mu_b ? kMu : (ub < params.p_mu_b + params.p_nu_b ? kNu : kVac);
        const int r = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m_slices)));
        const std::size_t idx = static_cast<std::size_t>((ia * 3 + ib) * m_slices + r);
        const bool hit_l = rng.next_double() < prob_l[idx];
        const bool hit_r = rng.next_double() < prob_r[idx];
        if (hit_l == hit_r) continue;            // zero or two detectors fired
        if (filtered_combo(ia, ib)) continue;    // announced and discarded
        ++clicks;

        if (!pending.has || static_cast<double>(bin - pending.bin) > window_bins) {
            pending = {true, bin, ia, ib, r, hit_l ? Detector::L : Detector::R};
            continue;
        }

        // Pair the pending (early) click with this (late) one.
        ++pairs;
        const double gap = static_cast<double>(bin - pending.bin);
        gap_sum += gap;
        gap_sq_sum += gap * gap;
        const int ta = total_of(pending.ia, ia);
        const int tb = total_of(pending.ib, ib);
        const Detector late_det = hit_l ? Detector::L : Detector::R;
        if (ta >= 0 && tb >= 0) {
            const bool both_two_nu =
                ta == static_cast<int>(Total::two_nu) && tb == static_cast<int>(Total::two_nu);
            if (both_two_nu) {
                // X basis: keep only relative phase difference 0 or pi.
                const int sift = ((pending.phase - r) % m_slices + m_slices) % m_slices;
                if (sift == 0 || sift == m_slices / 2) {
                    set_counts[ta][tb] += 1.0;
                    const bool flip = (sift == 0 && pending.det != late_det) ||
                                      (sift != 0 && pending.det == late_det);
                    const bool error = flip != rng.bernoulli(params.e_d);
                    if (error) ++m_x_count;
                }
            } else {
                set_counts[ta][tb] += 1.0;
                if (ta == static_cast<int>(Total::mu) && tb == static_cast<int>(Total::mu)) {
                    // Z error: both mu pulses landed in the same bin.
                    const bool aligned = (pending.ia == kMu && pending.ib == kMu) ||
                                         (pending.ia == kVac && pending.ib == kVac);
                    if (aligned) ++m_z_count;
                }
            }
        }
        pending.has = false;
    }

    McPairingStats out;
    out.bins = n_bins;
    const double bins_d = static_cast<double>(n_bins);
    const double q_tot = static_cast<double>(clicks) / bins_d;
    out.value.q_tot = q_tot;
    out.std_err.q_tot = std::sqrt(q_tot * (1.0 - q_tot) / bins_d);

    const std::uint64_t starts = clicks - pairs;
    const double q_tc = starts > 0 ? static_cast<double>(pairs) / starts : 0.0;
    out.value.q_tc = q_tc;
    out.std_err.q_tc =
        starts > 0 ? std::sqrt(std::max(q_tc * (1.0 - q_tc), 0.0) / starts) : 0.0;

    out.value.n_tot = static_cast<double>(pairs);
    out.std_err.n_tot = std::sqrt(static_cast<double>(pairs));

    if (pairs > 0) {
        const double mean_gap = gap_sum / pairs;
        out.value.t_mean = mean_gap / params.clock_hz;
        const double var = std::max(gap_sq_sum / pairs - mean_gap * mean_gap, 0.0);
        out.std_err.t_mean = std::sqrt(var / pairs) / params.clock_hz;
    }

    for (const SetLabel& label : set_labels()) {
        const double count = set_counts[static_cast<int>(label.first)][static_cast<int>(label.second)];
        out.value.n_sets[label] = count;
        out.std_err.n_sets[label] = std::sqrt(count);
    }
    out.value.m_z = static_cast<double>(m_z_count);
    out.std_err.m_z = std::sqrt(static_cast<double>(m_z_count));
    out.value.m_x = static_cast<double>(m_x_count);
    out.std_err.m_x = std::sqrt(static_cast<double>(m_x_count));
    return out;
}

}  // namespace aqds::photonics
