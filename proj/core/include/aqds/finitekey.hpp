#pragma once

#include <cstdint>

#include "aqds/photonics.hpp"

namespace aqds::finitekey {

/// Two-sided bound on an unknown quantity, produced by a concentration
/// inequality.  `lower <= upper` always holds; both are nonnegative.
struct ChernoffBound {
  double lower = 0.0;
  double upper = 0.0;
};

/// Given the expected value `x_star` of a sum of independent indicators,
/// bound the random observed value.  Failure probability of each side is
/// `eps`.
///
/// upper = x* + b/2 + sqrt(2*b*x* + b^2/4),  lower = max(x* - sqrt(2*b*x*), 0)
/// with b = ln(1/eps).  Throws std::invalid_argument unless x_star is finite
/// and >= 0 and eps is in (0,1).
ChernoffBound chernoff_observed(double x_star, double eps);

/// Given an observed value `x`, bound the unknown expected value it was
/// drawn around.  Failure probability of each side is `eps`.
///
/// upper = x + b + sqrt(2*b*x + b^2),
/// lower = max(x - b/2 - sqrt(2*b*x + b^2/4), 0) with b = ln(1/eps).
/// Throws std::invalid_argument unless x is finite and >= 0 and eps in (0,1).
ChernoffBound chernoff_expected(double x, double eps);

/// Random-sampling-without-replacement deviation bound: the observed error
/// rate `lambda` on a k-sized sample bounds the rate on the disjoint n-sized
/// remainder by lambda + gamma_u(n, k, lambda, eps).
///
/// Preconditions: n >= 1, k >= 1, lambda strictly inside (0,1), eps in (0,1);
/// violations throw std::invalid_argument.  The internal log factor is
/// clamped at zero, so very loose settings yield gamma == 0.  Result is
/// always >= 0 and finite.
double gamma_u(double n, double k, double lambda, double eps);

/// Clamp an empirical rate into the open interval required by gamma_u,
/// flooring at one event in `k` trials: with k_eff = max(k, 2), the result
/// lies in [1/k_eff, 1 - 1/k_eff].
double clamped_rate(double lambda, double k);

/// Binary Shannon entropy H(p) = -p log2 p - (1-p) log2(1-p), with
/// H(0) = H(1) = 0.  Throws std::invalid_argument outside [0,1].
double binary_entropy(double p);

/// Inverse of binary_entropy on [0, 1/2], found by bisection to an interval
/// below 1e-12.  Throws std::invalid_argument outside [0,1].
double binary_entropy_inv(double h);

/// Decoy-state estimates for one run of the distribution stage: observed
/// coincidence counts together with lower/upper bounds on the vacuum and
/// single-photon-pair contributions and on the phase error rate of the
/// key-generating class.  Fields named *_exp are bounds on expected values;
/// the matching unsuffixed bound converts them to bounds on observed values.
struct EstimatedParams {
  double n_z = 0.0;   ///< key-generating ([mu_a, mu_b]) coincidence count
  double m_z = 0.0;   ///< bit errors within n_z
  double e_z = 0.0;   ///< m_z / n_z
  double n_x = 0.0;   ///< sifted check-class ([2nu_a, 2nu_b]) count
  double m_x = 0.0;   ///< bit errors within n_x

  double s0_z_exp = 0.0;   ///< expected vacuum-event count in n_z, lower bound
  double s0_z_low = 0.0;   ///< observed vacuum-event count in n_z, lower bound
  double s11_z_exp = 0.0;  ///< expected single-photon-pair count in n_z, lower
  double s11_z_low = 0.0;  ///< observed single-photon-pair count in n_z, lower
  double s11_x_exp = 0.0;  ///< expected single-photon-pair count in n_x, lower
  double s11_x_low = 0.0;  ///< observed single-photon-pair count in n_x, lower

  double m0_2nu_low = 0.0;  ///< observed vacuum-origin errors in m_x, lower
  double t11_x_up = 0.0;    ///< observed single-photon-pair errors in m_x, upper
  double e11_x_up = 0.0;    ///< single-photon-pair error rate in X, upper

  double phi11_z_up = 0.0;     ///< phase error rate of Z single-photon pairs, upper
  bool phase_degenerate = false;  ///< true when phi11_z_up saturated at 1/2
};

/// Run the full decoy-state estimation chain on analytic (or empirical)
/// pairing statistics.  Uses params.eps for every concentration bound and
/// params.eps_e for the X->Z sampling correction.
///
/// Requires valid params with strictly positive selection probabilities for
/// every intensity level (the ratios of class probabilities must exist).
/// Throws NoKeyError if the key-generating class is empty (n_z == 0).
/// Guarantees: all counts >= 0; s0_z_low + s11_z_low <= n_z; e11_x_up in
/// [0, 1]; phi11_z_up in [0, 1/2] with degenerate saturation flagged.
EstimatedParams estimate(const photonics::PairingStats& stats,
                         const photonics::ProtocolParams& params);

/// One-way entropy accounting for the whole key-generating class.
struct EntropyBudget {
  double h_min = 0.0;      ///< smooth-min-entropy lower bound (bits)
  double h_max = 0.0;      ///< leakage upper bound (bits)
  double margin = 0.0;     ///< h_min - h_max
  double h_min_frac = 0.0; ///< h_min / n_z
  double h_max_frac = 0.0; ///< h_max / n_z
  double eps_sec = 0.0;    ///< composable security failure probability
  bool feasible = false;   ///< margin > 0
};

/// Evaluate the entropy budget:
///   h_min = s0_z_low + s11_z_low * (1 - H(phi11_z_up)) - 2*log2(2/eps^2)
///   h_max = n_z * f * H(e_z) + log2(2/eps)
/// where eps = params.eps covers each smoothing/correctness term, and
///   eps_sec = 2 * (5*eps + 2*eps_e).
EntropyBudget entropy_budget(const EstimatedParams& est,
                             const photonics::ProtocolParams& params);

/// Bounds for an n-bit subgroup of the key-generating class, obtained from
/// the full-class bounds by random-sampling corrections.
struct SubgroupBounds {
  double s0_zn_low = 0.0;     ///< vacuum events within the subgroup, lower
  double s11_zn_low = 0.0;    ///< single-photon pairs within the subgroup, lower
  double phi11_zn_up = 0.0;   ///< subgroup phase error rate, upper
  bool phase_degenerate = false;  ///< true when phi11_zn_up saturated at 1/2
};

/// Scale the full-class bounds down to an n-bit subgroup:
///   s0_zn  >= n * (s0_z_low/n_z  - gamma_u(n, n_z - n, s0_z_low/n_z,  eps))
///   s11_zn >= n * (s11_z_low/n_z - gamma_u(n, n_z - n, s11_z_low/n_z, eps))
///   phi_zn <= phi11_z_up + gamma_u(s11_zn, s11_z_low - s11_zn, phi11_z_up, eps)
/// with rates floored via clamped_rate and results clamped to their valid
/// ranges.  Requires 1 <= n < est.n_z; throws std::invalid_argument
/// otherwise.
SubgroupBounds subgroup_bounds(const EstimatedParams& est, double n,
                               double eps);

/// Result of sizing the signature for an m-bit message digest.
struct SignatureSizing {
  std::int64_t n = 0;      ///< chosen signature length (bits), 0 if infeasible
  double h_n = 0.0;        ///< usable entropy of the chosen n-bit subgroup
  double r_sig = 0.0;      ///< signatures per run: n_z / (3n); 0 if infeasible
  double eps_for = 1.0;    ///< forgery probability bound m * 2^(1 - h_n)
  double eps_rob = 0.0;    ///< robustness failure bound, 4 * params.eps
  double eps_rep = 0.0;    ///< repudiation failure bound, 2 * params.eps
  bool feasible = false;   ///< a valid n exists
  bool meets_rob_rep = false;  ///< eps_rob and eps_rep also <= eps_target
  SubgroupBounds sub;      ///< subgroup bounds at the chosen n
};

/// Find the smallest signature length n (capped at n_z/3 so three disjoint
/// key blocks fit) whose n-bit subgroup entropy
///   h_n = s0_zn + s11_zn * (1 - H(phi_zn)) - n * f * H(e_z)
/// drives the forgery bound m_bits * 2^(1 - h_n) below eps_target.  The
/// minimal n is located by doubling + bisection and verified against its
/// neighbour (the bound need not be perfectly monotone in n).  If no n
/// qualifies the result has feasible == false and r_sig == 0.  Robustness
/// and repudiation bounds are fixed by params.eps and reported alongside;
/// only the forgery bound gates feasibility.
SignatureSizing signature_length(const EstimatedParams& est,
                                 const photonics::ProtocolParams& params,
                                 double m_bits, double eps_target);

/// Everything the rate-vs-distance figures need for one channel setting.
struct AsyncRatePoint {
  double distance_km = 0.0;   ///< total Alice-to-Bob fiber length
  bool feasible = false;
  double n_z = 0.0;
  double e_z = 0.0;
  double phi11_z_up = 0.0;
  double h_min_frac = 0.0;
  double h_max_frac = 0.0;
  std::int64_t n = 0;         ///< signature length (bits)
  double r_sig = 0.0;         ///< signatures per run
  double r_per_pulse = 0.0;   ///< r_sig / N
  double eps_for = 1.0;       ///< forgery bound at the chosen n
};

/// Evaluate the full chain (pairing statistics -> estimation -> sizing) at
/// the channel configured in `params`.  Degenerate channels and empty keys
/// are reported as infeasible points rather than thrown.
AsyncRatePoint async_rate_point(const photonics::ProtocolParams& params,
                                double m_bits, double eps_target);

/// Largest total distance (km) at which the protocol stays feasible, holding
/// every parameter except l_a/l_b fixed.  The total is split l_a = fraction_a
/// * l.  Coarse 25 km scan up to 2000 km, then bisection to 0.1 km.  Returns
/// 0 if already infeasible at (near) zero distance.
double max_feasible_distance(const photonics::ProtocolParams& params,
                             double m_bits, double eps_target,
                             double fraction_a = 0.5);

/// One candidate source setting for the intensity optimizer.
struct IntensityChoice {
  double mu = 0.0;
  double nu = 0.0;
  double p_mu = 0.0;
  double p_nu = 0.0;
};

/// Result of optimize_intensities.
struct IntensityOptimum {
  IntensityChoice choice;
  AsyncRatePoint point;   ///< chain evaluated at the optimum
  bool improved = false;  ///< true if the optimum beats the input setting
};

/// Optional deterministic optimizer over the symmetric source setting
/// (mu, nu, p_mu, p_nu), applied to both parties, maximizing r_sig at the
/// channel in `params`.  Coarse grid pass followed by two local refinement
/// passes with halved steps; ties broken lexicographically, so results are
/// bit-reproducible.  Infeasible candidates score zero.  This is a
/// convenience for parameter studies and is never invoked implicitly.
IntensityOptimum optimize_intensities(const photonics::ProtocolParams& params,
                                      double m_bits, double eps_target);

}  // namespace aqds::finitekey
