#ifndef AQDS_BASELINE_HPP
#define AQDS_BASELINE_HPP

#include <cstdint>

namespace aqds::baseline {

/// Parameters of the four-intensity comparator protocol. Each party sends
/// pulses of intensity k in {mu, nu, omega, o} with the listed selection
/// probabilities (the vacuum setting o = 0 takes the leftover probability).
/// The signal class (mu, mu) forms the raw key; the two decoys and vacuum
/// feed the single-photon estimation chain, in which the weakest nonzero
/// decoy pair (omega, omega) is the class where phase errors are sampled.
struct BaselineParams {
  // Devices and channel (per-pulse dark counts; symmetric detectors).
  double eta_d = 0.80;    ///< detector efficiency, folded into each arm
  double p_d = 2.5e-10;   ///< dark-count probability per pulse
  double f_ec = 1.1;      ///< error-correction inefficiency factor
  double alpha_f = 0.16;  ///< fiber attenuation (dB/km)
  double e_d = 0.04;      ///< misalignment error rate (interference basis)
  double eps = 1e-10;     ///< statistical failure probability per bound
  double n_pulses = 1e13; ///< N: total transmitted pulse-pair count

  // Intensities (photons) and selection probabilities per party. Values
  // are working defaults, not measured ones; override via config.
  double mu_a = 0.5;
  double nu_a = 0.1;
  double omega_a = 0.01;
  double p_mu_a = 0.5;
  double p_nu_a = 0.25;
  double p_omega_a = 0.125;
  double mu_b = 0.5;
  double nu_b = 0.1;
  double omega_b = 0.01;
  double p_mu_b = 0.5;
  double p_nu_b = 0.25;
  double p_omega_b = 0.125;

  double l_a = 25.0;  ///< sender A -> node fiber length (km)
  double l_b = 25.0;  ///< sender B -> node fiber length (km)

  int scan_grid = 64;  ///< grid points per scan axis (>= 2)

  double p_vac_a() const { return 1.0 - p_mu_a - p_nu_a - p_omega_a; }
  double p_vac_b() const { return 1.0 - p_mu_b - p_nu_b - p_omega_b; }
  double zeta_a() const;  ///< arm transmittance including eta_d
  double zeta_b() const;

  /// Validates ranges: mu > nu > omega > 0 per party, probabilities
  /// positive with positive vacuum remainder, devices in range, and
  /// scan_grid >= 2. Throws std::invalid_argument on violation.
  void validate() const;
};

/// Intensity level of one party, indexing the yield table.
enum class Level : int { mu = 0, nu = 1, omega = 2, vac = 3 };

/// Short text label ("mu", "nu", "omega", "o") for reports.
const char* level_name(Level k);

/// Expected detection and error counts for one intensity pair, in both
/// bases, over the full run of N pulse pairs.
struct PairYield {
  double n_z = 0.0;  ///< key-basis detections
  double m_z = 0.0;  ///< key-basis errors (dark-count driven)
  double n_x = 0.0;  ///< interference-basis detections
  double m_x = 0.0;  ///< interference-basis errors
};

/// Closed-form expected counts when party A sends intensity k_a with
/// selection probability p_ka and party B sends k_b with p_kb. Only
/// requires k_a, k_b >= 0 and probabilities in [0,1]; full parameter
/// validation is left to baseline_yields.
PairYield pair_yield(const BaselineParams& params, double k_a, double k_b,
                     double p_ka, double p_kb);

/// Expected counts for all sixteen intensity pairs.
struct YieldTable {
  PairYield at[4][4];
  const PairYield& get(Level a, Level b) const {
    return at[static_cast<int>(a)][static_cast<int>(b)];
  }
};

/// Evaluates pair_yield over the 4x4 intensity grid. Validates params.
YieldTable baseline_yields(const BaselineParams& params);

/// Ratio of the key-basis to the interference-basis single-photon-pair
/// (1,1) Fock coefficient of the closed-form click probabilities. The two
/// forms normalize that component differently, so estimates transported
/// from the interference basis into the key class are scaled by this
/// factor inside double_scan; exposed for diagnostics and testing.
/// Approaches 1/4 as the dark-count rate vanishes.
double single_photon_ratio(const BaselineParams& params);

/// Inverts c0 + c1*[1 - H(phi)] = H(p_E) for the forgery error threshold
/// p_E in [0, 1/2]; the right-hand side is clamped to [0, 1] first.
/// Requires c0, c1 >= 0 and phi in [0, 1/2].
double error_threshold(double c0, double c1, double phi);

/// Output of the double-scanning estimation and signature sizing.
struct BaselineResult {
  double n_z = 0.0;         ///< raw key count (signal-pair class)
  double e_z = 0.0;         ///< observed key error rate
  double e_z_up = 0.0;      ///< expected-level upper bound on the key error rate
  double p_plus_low = 0.0;  ///< conservative lower bound of the P+ combination
  double p_minus_up = 0.0;  ///< conservative upper bound of the P- combination
  double h_hat_low = 0.0;   ///< scan rectangle, vacuum-content axis
  double h_hat_up = 0.0;
  double m_hat_low = 0.0;   ///< scan rectangle, error-content axis
  double m_hat_up = 0.0;
  double h_hat = 0.0;       ///< scan point minimizing the key quantity
  double m_hat = 0.0;
  double n0_z_low = 0.0;    ///< vacuum events in the key class, lower (at argmin)
  double n11_z_low = 0.0;   ///< single-photon pairs in the key class, lower (at argmin)
  double phi11_z_up = 0.0;  ///< single-photon phase error rate, upper (at argmin)
  double lambda_ec = 0.0;   ///< error-correction leakage (bits)
  double key_quantity = 0.0;///< minimized secure-key expression (bits)
  double c0 = 0.0;          ///< n0_z_low / n_z
  double c1 = 0.0;          ///< n11_z_low / n_z
  double p_e = 0.0;         ///< forgery error threshold
  double s_a = 0.0;         ///< acceptance threshold, e_z_up + (p_e - e_z_up)/4
  double s_v = 0.0;         ///< verification threshold, e_z_up + 3(p_e - e_z_up)/4
  std::int64_t length_l = 0;///< signature length (bits per signed bit)
  double r_sig = 0.0;       ///< signatures per run: n_z / (2 L m)
  bool feasible = false;    ///< n_z >= 1 and p_e > e_z_up
};

/// Runs the estimation chain on a yield table: Chernoff-bounded expected
/// combinations, the (h_hat, m_hat) rectangle scan minimizing the
/// secure-key expression (scan_grid^2 points plus one refinement pass
/// around the incumbent, lexicographic tie-break), the p_E inversion, and
/// the minimal signature length L such that the three exponential security
/// bounds all fall below eps_target. Infeasible configurations (no key, or
/// p_E <= e_z_up) return r_sig = 0 with feasible = false; the scan itself
/// never throws on starved statistics.
BaselineResult double_scan(const BaselineParams& params,
                           const YieldTable& yields, double m_bits = 1000.0,
                           double eps_target = 1e-10);

/// One point of the comparator rate curve.
struct BaselineRatePoint {
  double distance_km = 0.0;
  bool feasible = false;
  double n_z = 0.0;
  double e_z = 0.0;
  double p_e = 0.0;
  std::int64_t length_l = 0;
  double r_sig = 0.0;
  double r_per_pulse = 0.0;
};

/// Convenience wrapper: yields + double_scan at the params' distance.
BaselineRatePoint baseline_rate_point(const BaselineParams& params,
                                      double m_bits, double eps_target);

/// Largest total distance (km) with a feasible signature, split as
/// l_a = fraction_a * l. Coarse 25 km scan out to 2000 km, then bisection
/// to 0.1 km. Returns 0 when already infeasible at the shortest probe.
double baseline_max_distance(BaselineParams params, double m_bits,
                             double eps_target, double fraction_a = 0.5);

}  // namespace aqds::baseline

#endif  // AQDS_BASELINE_HPP
