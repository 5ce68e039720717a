#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>

#include "aqds/rng.hpp"

namespace aqds::photonics {

/// All tunable quantities of the two-user interference link: source
/// intensities and their selection probabilities, fiber/detector figures,
/// clocking, phase discretization, and the pairing window.
///
/// Defaults: detector and fiber figures follow the reference hardware set
/// (eta_d = 0.80, p_d = 2.5e-10, f = 1.1, alpha_f = 0.16 dB/km, e_d = 0.04,
/// eps = 1e-10, F = 1 GHz). Intensity/probability defaults are tuned example
/// values, not measurements; override them freely via config.
struct ProtocolParams {
    // Detectors (L and R at the measurement node). Symmetric by default;
    // both sides are independently overridable.
    double eta_d_l = 0.80;   ///< detector L efficiency
    double eta_d_r = 0.80;   ///< detector R efficiency
    double p_d_l = 2.5e-10;  ///< detector L dark-count probability per bin
    double p_d_r = 2.5e-10;  ///< detector R dark-count probability per bin

    double f_ec = 1.1;      ///< error-correction inefficiency factor
    double alpha_f = 0.16;  ///< fiber attenuation (dB/km)
    double e_d = 0.04;      ///< misalignment error rate
    double eps = 1e-10;     ///< statistical failure prob (eps', eps-hat, eps_cor)
    double eps_e = 1e-10;   ///< phase-error sampling failure probability

    double clock_hz = 1e9;  ///< source clock F (pulse pairs per second)
    int phase_slices = 16;  ///< M: number of discrete global phases (even)
    double t_c = 1e-3;      ///< pairing window (s); N_Tc = clock_hz * t_c
    double n_pulses = 1e12; ///< N: total transmitted pulse-pair count

    // Per-party intensities (photons) and selection probabilities. The third
    // setting is vacuum: intensity exactly 0 with the leftover probability.
    double mu_a = 0.5;
    double nu_a = 0.05;
    double p_mu_a = 0.5;
    double p_nu_a = 0.15;
    double mu_b = 0.5;
    double nu_b = 0.05;
    double p_mu_b = 0.5;
    double p_nu_b = 0.15;

    double l_a = 25.0;  ///< Alice->node fiber length (km)
    double l_b = 25.0;  ///< Bob->node fiber length (km)
    double delta = 0.0; ///< residual phase drift between paired bins (rad)

    double p_vac_a() const { return 1.0 - p_mu_a - p_nu_a; }
    double p_vac_b() const { return 1.0 - p_mu_b - p_nu_b; }
    double eta_a() const;    ///< Alice-arm transmittance 10^(-alpha_f*l_a/10)
    double eta_b() const;    ///< Bob-arm transmittance
    double n_tc() const { return clock_hz * t_c; }  ///< window size in bins

    /// Validates ranges: intensities mu > 2*nu > 0 per party (the decoy
    /// estimation chain needs the signal total to exceed the sum of the two
    /// decoy pulses), probabilities nonnegative with nonnegative vacuum
    /// remainder (the estimation stage separately requires them positive),
    /// eta_d in (0,1], p_d in [0,1), even phase_slices >= 2, positive
    /// clock/window/pulse count, finite distances >= 0, e_d in [0,1/2].
    /// Throws std::invalid_argument with a field-specific message.
    void validate() const;
};

/// Power transmittance of l km of fiber with attenuation alpha dB/km.
double channel_transmittance(double alpha_db_per_km, double l_km);

/// Modified Bessel function of the first kind, order zero, with relative
/// error <= 1e-12. Power series below |x| = 20, asymptotic expansion beyond;
/// both stop on a 1e-14 term bound. Throws std::invalid_argument for
/// non-finite input.
double bessel_i0(double x);

/// Composite-Simpson quadrature of f over [0, 2*pi) with a fixed even panel
/// count (default 2048). Fixed panels keep every result bit-reproducible.
double simpson_2pi(const std::function<double(double)>& f, int panels = 2048);

enum class Detector { L, R };

/// Probability that exactly detector `det` clicks in one bin, given sent
/// intensities k_a, k_b and relative interference phase theta:
///   q^(theta,L) = y_R * exp(+eta_dR*c*cos t) * (1 - y_L * exp(-eta_dL*c*cos t))
///   q^(theta,R) = y_L * exp(-eta_dL*c*cos t) * (1 - y_R * exp(+eta_dR*c*cos t))
/// with y_{L,R} = (1 - p_d) * exp(-eta_d*(eta_a*k_a + eta_b*k_b)/2) and
/// c = sqrt(eta_a*k_a * eta_b*k_b). Intensities must be >= 0.
double gain_theta(const ProtocolParams& params, double k_a, double k_b, double theta,
                  Detector det);

/// Phase-averaged single-click probability q_(k_a|k_b): the closed Bessel
/// form y_L*I0(eta_dL*c) + y_R*I0(eta_dR*c) - 2*y_L*y_R*I0((eta_dL-eta_dR)*c),
/// equal to the theta-average of gain_theta(L) + gain_theta(R).
double overall_gain(const ProtocolParams& params, double k_a, double k_b);

/// Per-party total intensity class of the two bins forming one paired event.
enum class Total : int { vac = 0, nu = 1, two_nu = 2, mu = 3 };

/// Short text label ("o", "nu", "2nu", "mu") for reports.
const char* total_name(Total t);

using SetLabel = std::pair<Total, Total>;

/// Expected click/pairing statistics for the full run of N pulse pairs.
///
/// n_sets keys cover the ten decoy sets the estimators consume. The
/// [2nu,2nu] entry is the phase-sifted count (relative phase difference 0 or
/// pi across the paired bins); every other entry is the raw pair count with
/// no sifting applied. Pairs whose per-party totals fall outside the set
/// labels (mu+nu or mu+mu) contribute to n_tot but to no set.
struct PairingStats {
    double q_tot = 0;   ///< per-bin single-click probability after filtering
    double q_tc = 0;    ///< probability a click finds a partner in the window
    double n_tot = 0;   ///< expected number of paired events
    double t_mean = 0;  ///< mean time between the two bins of a pair (s)
    std::map<SetLabel, double> n_sets;
    double m_z = 0;  ///< expected errors in the [mu,mu] set
    double m_x = 0;  ///< expected errors in the phase-sifted [2nu,2nu] set
};

/// Closed-form pairing statistics. Mixed signal/decoy coincidences
/// (mu_a|nu_b) and (nu_a|mu_b) are discarded before pairing, so they appear
/// in neither q_tot nor any set. Throws DegenerateChannelError when
/// q_tot = 0 (no pairing possible).
PairingStats pairing_stats(const ProtocolParams& params);

/// Empirical statistics from a pulse-level Monte Carlo of n_bins time bins:
/// per-bin intensity/phase choice, click sampling, filtering, greedy
/// nearest-click pairing within the window, and Z/X classification. `value`
/// holds raw counts for the simulated bins (compare against pairing_stats
/// with n_pulses = n_bins); `std_err` holds matching standard-error
/// estimates (binomial for q_tot/q_tc, Poisson sqrt-count for set counts,
/// sample error for t_mean).
struct McPairingStats {
    PairingStats value;
    PairingStats std_err;
    std::uint64_t bins = 0;
};

/// Runs the Monte Carlo oracle. Deterministic per rng seed. Requires
/// n_bins <= 1e8 (ResourceLimitError beyond) and params.delta == 0 (the
/// drift parameter models an analytic idealization with no bin-level
/// counterpart; std::invalid_argument otherwise).
McPairingStats mc_oracle(const ProtocolParams& params, std::uint64_t n_bins,
                         RandomSource& rng);

}  // namespace aqds::photonics
