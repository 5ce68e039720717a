#include "aqds/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aqds/finitekey.hpp"
#include "aqds/photonics.hpp"

namespace aqds::baseline {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(std::string("baseline: ") + msg);
}

double attenuation(double alpha_db_per_km, double l_km) {
    return std::pow(10.0, -alpha_db_per_km * l_km / 10.0);
}

// Per-pulse-pair click probabilities (pair_yield without the repetition
// and selection-probability scale).
PairYield pair_prob(const BaselineParams& params, double k_a, double k_b) {
    const double pd = params.p_d;
    const double sa = params.zeta_a() * k_a;  // mean photons reaching the node, A arm
    const double sb = params.zeta_b() * k_b;
    const double s = sa + sb;
    const double c = std::sqrt(sa * sb);

    const double i0_c = photonics::bessel_i0(c);
    const double i0_half = photonics::bessel_i0(c / 2.0);
    const double e_half = std::exp(-s / 2.0);
    const double q = 1.0 - pd;

    // Key basis: a coincidence needs either a dark count paired with the
    // interference click (the I0 term) or independent clicks in both arms.
    const double dark_term = pd * (i0_c - q * e_half);
    const double both_arms =
        (1.0 - q * std::exp(-sa / 2.0)) * (1.0 - q * std::exp(-sb / 2.0));
    PairYield y;
    y.n_z = q * q * e_half * (dark_term + both_arms);
    y.m_z = pd * q * q * e_half * (i0_c - q * e_half);

    // Interference basis: the closed forms are phase averages, with
    // I0(c) = <exp(c cos t)> and I0(c/2) = <exp((c/2) cos t)>.
    const double yk = q * e_half;
    y.n_x = yk * yk * (1.0 + 2.0 * yk * yk - 4.0 * yk * i0_half + i0_c);
    y.m_x = yk * yk *
            (1.0 + yk * yk - 2.0 * yk * i0_half + params.e_d * (i0_c - 1.0));

    // Guard against tiny negative values from cancellation near zero.
    y.n_z = std::max(y.n_z, 0.0);
    y.m_z = std::max(y.m_z, 0.0);
    y.n_x = std::max(y.n_x, 0.0);
    y.m_x = std::max(y.m_x, 0.0);
    return y;
}

// (1,1) Fock coefficient of a closed-form click probability: the ka*kb
// coefficient of e^{ka+kb} Q(ka, kb), extracted by finite differences.
// Higher-order contamination is O(h) relative, well below the statistical
// slack this feeds into.
double fock11(const BaselineParams& params, bool key_basis) {
    const double h = 1e-4;
    const auto prob = [&](double ka, double kb) {
        const PairYield y = pair_prob(params, ka, kb);
        return key_basis ? y.n_z : y.n_x;
    };
    return (std::exp(2.0 * h) * prob(h, h) -
            std::exp(h) * (prob(h, 0.0) + prob(0.0, h)) + prob(0.0, 0.0)) /
           (h * h);
}

}  // namespace

double BaselineParams::zeta_a() const { return eta_d * attenuation(alpha_f, l_a); }
double BaselineParams::zeta_b() const { return eta_d * attenuation(alpha_f, l_b); }

void BaselineParams::validate() const {
    require(eta_d > 0.0 && eta_d <= 1.0, "eta_d must be in (0,1]");
    require(p_d >= 0.0 && p_d < 1.0, "p_d must be in [0,1)");
    require(f_ec >= 1.0, "f_ec must be >= 1");
    require(alpha_f >= 0.0, "alpha_f must be >= 0");
    require(e_d >= 0.0 && e_d <= 0.5, "e_d must be in [0,1/2]");
    require(eps > 0.0 && eps < 1.0, "eps must be in (0,1)");
    require(n_pulses >= 1.0, "n_pulses must be >= 1");
    require(mu_a > nu_a && nu_a > omega_a && omega_a > 0.0,
            "intensities must satisfy mu > nu > omega > 0 (party A)");
    require(mu_b > nu_b && nu_b > omega_b && omega_b > 0.0,
            "intensities must satisfy mu > nu > omega > 0 (party B)");
    require(p_mu_a > 0.0 && p_nu_a > 0.0 && p_omega_a > 0.0 && p_vac_a() > 0.0,
            "selection probabilities must be positive with a positive vacuum "
            "remainder (party A)");
    require(p_mu_b > 0.0 && p_nu_b > 0.0 && p_omega_b > 0.0 && p_vac_b() > 0.0,
            "selection probabilities must be positive with a positive vacuum "
            "remainder (party B)");
    require(l_a >= 0.0 && l_b >= 0.0, "fiber lengths must be >= 0");
    require(scan_grid >= 2, "scan grid degenerate (need >= 2 points per axis)");
}

const char* level_name(Level k) {
    switch (k) {
        case Level::mu: return "mu";
        case Level::nu: return "nu";
        case Level::omega: return "omega";
        case Level::vac: return "o";
    }
    return "?";
}

PairYield pair_yield(const BaselineParams& params, double k_a, double k_b,
                     double p_ka, double p_kb) {
    require(k_a >= 0.0 && k_b >= 0.0, "intensities must be >= 0");
    require(p_ka >= 0.0 && p_ka <= 1.0 && p_kb >= 0.0 && p_kb <= 1.0,
            "selection probabilities must be in [0,1]");
    const double scale = params.n_pulses * p_ka * p_kb;
    PairYield y = pair_prob(params, k_a, k_b);
    y.n_z *= scale;
    y.m_z *= scale;
    y.n_x *= scale;
    y.m_x *= scale;
    return y;
}

YieldTable baseline_yields(const BaselineParams& params) {
    params.validate();
    const double ka[4] = {params.mu_a, params.nu_a, params.omega_a, 0.0};
    const double kb[4] = {params.mu_b, params.nu_b, params.omega_b, 0.0};
    const double pa[4] = {params.p_mu_a, params.p_nu_a, params.p_omega_a,
                          params.p_vac_a()};
    const double pb[4] = {params.p_mu_b, params.p_nu_b, params.p_omega_b,
                          params.p_vac_b()};
    YieldTable t;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            t.at[a][b] = pair_yield(params, ka[a], kb[b], pa[a], pb[b]);
        }
    }
    return t;
}

double single_photon_ratio(const BaselineParams& params) {
    const double y11_z = fock11(params, /*key_basis=*/true);
    const double y11_x = fock11(params, /*key_basis=*/false);
    return y11_x > 0.0 ? std::max(y11_z, 0.0) / y11_x : 1.0;
}

double error_threshold(double c0, double c1, double phi) {
    require(c0 >= 0.0 && c1 >= 0.0, "error_threshold: c0, c1 must be >= 0");
    require(phi >= 0.0 && phi <= 0.5, "error_threshold: phi must be in [0,1/2]");
    const double rhs =
        std::clamp(c0 + c1 * (1.0 - finitekey::binary_entropy(phi)), 0.0, 1.0);
    return finitekey::binary_entropy_inv(rhs);
}

BaselineResult double_scan(const BaselineParams& params,
                           const YieldTable& yields, double m_bits,
                           double eps_target) {
    params.validate();
    require(m_bits >= 1.0, "m_bits must be >= 1");
    require(eps_target > 0.0 && eps_target < 1.0, "eps_target must be in (0,1)");

    const double eps = params.eps;
    const auto el = [eps](double x) {
        return finitekey::chernoff_expected(x, eps).lower;
    };
    const auto eu = [eps](double x) {
        return finitekey::chernoff_expected(x, eps).upper;
    };
    const auto ol = [eps](double x) {
        return finitekey::chernoff_observed(std::max(x, 0.0), eps).lower;
    };
    const auto ou = [eps](double x) {
        return finitekey::chernoff_observed(std::max(x, 0.0), eps).upper;
    };

    BaselineResult r;
    const PairYield& sig = yields.get(Level::mu, Level::mu);
    r.n_z = sig.n_z;
    r.e_z = sig.n_z > 0.0 ? sig.m_z / sig.n_z : 0.0;
    r.e_z_up = sig.n_z > 0.0 ? std::min(eu(sig.m_z) / sig.n_z, 0.5) : 0.5;
    r.lambda_ec = r.n_z * params.f_ec * finitekey::binary_entropy(r.e_z);

    if (r.n_z < 1.0) return r;  // no raw key at all

    // Vacuum events within the signal class, estimated from the two
    // one-sided vacuum classes; expected level first, observed level after.
    const double po_a = params.p_vac_a();
    const double po_b = params.p_vac_b();
    const double n0_a = std::exp(-params.mu_a) * params.p_mu_a / po_a *
                        el(yields.get(Level::vac, Level::mu).n_z);
    const double n0_b = std::exp(-params.mu_b) * params.p_mu_b / po_b *
                        el(yields.get(Level::mu, Level::vac).n_z);
    const double n0_star = std::max(n0_a, n0_b);
    r.n0_z_low = std::clamp(ol(n0_star), 0.0, r.n_z);

    // Single-photon estimation roles: phase errors are sampled in the
    // weakest nonzero decoy class (w); the stronger decoy (v) supplies the
    // auxiliary combinations. The linear-combination bound below is only
    // valid with this assignment (the n+m >= 3 expansion terms keep one
    // sign only when the sampling decoy is the weaker one).
    const double w_a = params.omega_a, w_b = params.omega_b;
    const double v_a = params.nu_a, v_b = params.nu_b;
    const double p_wa = params.p_omega_a, p_wb = params.p_omega_b;
    const double p_va = params.p_nu_a, p_vb = params.p_nu_b;

    double v_ref, w_ref;
    if (v_a * w_b <= v_b * w_a) {  // v_a/v_b <= w_a/w_b
        v_ref = v_a;
        w_ref = w_a;
    } else {
        v_ref = v_b;
        w_ref = w_b;
    }

    const PairYield& ww = yields.get(Level::omega, Level::omega);
    const PairYield& vv = yields.get(Level::nu, Level::nu);
    const PairYield& vo = yields.get(Level::nu, Level::vac);
    const PairYield& ov = yields.get(Level::vac, Level::nu);
    const PairYield& wo = yields.get(Level::omega, Level::vac);
    const PairYield& ow = yields.get(Level::vac, Level::omega);
    const PairYield& oo = yields.get(Level::vac, Level::vac);

    const double cvv = v_a * v_b * v_ref;  // strong-decoy coefficient
    const double cww = w_a * w_b * w_ref;  // weak-decoy coefficient

    // P+ (enters the single-photon bound positively: lower bound) and
    // P- (negatively: upper bound), both at the expected level.
    r.p_plus_low = cvv * std::exp(w_a + w_b) *
                       el(std::max(ww.n_x - ww.m_x, 0.0)) / (p_wa * p_wb) +
                   cww * std::exp(v_a) * el(vo.n_x) / (p_va * po_b) +
                   cww * std::exp(v_b) * el(ov.n_x) / (po_a * p_vb);
    r.p_minus_up = cww * std::exp(v_a + v_b) * eu(vv.n_x) / (p_va * p_vb) +
                   cww * eu(oo.n_x) / (po_a * po_b);

    // Scan rectangle for the error-content and vacuum-content combinations
    // of the sampling class, at the expected level.
    const double m_coef = cvv * std::exp(w_a + w_b) / (p_wa * p_wb);
    r.m_hat_low = m_coef * el(ww.m_x);
    r.m_hat_up = std::max(m_coef * eu(ww.m_x), r.m_hat_low);

    const double h_oa = std::exp(w_b) / (po_a * p_wb);
    const double h_ao = std::exp(w_a) / (p_wa * po_b);
    const double h_oo = 1.0 / (po_a * po_b);
    r.h_hat_low = std::max(
        cvv * (h_oa * el(ow.n_x) + h_ao * el(wo.n_x) - h_oo * eu(oo.n_x)), 0.0);
    r.h_hat_up = std::max(
        cvv * (h_oa * eu(ow.n_x) + h_ao * eu(wo.n_x) - h_oo * el(oo.n_x)),
        r.h_hat_low);

    // The two closed forms do not share a single-photon normalization:
    // the key-basis (1,1) Fock coefficient is about a quarter of the
    // interference-basis one. Estimates transported from the interference
    // basis into the key class are rescaled by the ratio of the forms'
    // own coefficients so the transported counts live on the key-class
    // scale (the ratio cancels in phi, which is yield-free by design).
    const double rho11 = single_photon_ratio(params);

    // Fixed prefactors of the scanned bound expressions.
    const double pref_11 =
        rho11 * params.mu_a * params.mu_b *
        std::exp(-params.mu_a - params.mu_b) * params.p_mu_a * params.p_mu_b /
        (v_a * v_b * w_a * w_b * (v_ref - w_ref));
    const double pref_tx = p_wa * p_wb / (cvv * std::exp(w_a + w_b));
    const double pref_tz = rho11 * params.mu_a * params.mu_b *
                           std::exp(-params.mu_a - params.mu_b) *
                           params.p_mu_a * params.p_mu_b /
                           (w_a * w_b * std::exp(-w_a - w_b) * p_wa * p_wb);

    const double log_terms =
        std::log2(2.0 / eps) + 2.0 * std::log2(2.0 / (eps * eps)) +
        2.0 * std::log2(1.0 / (2.0 * eps));

    // Evaluate the secure-key expression at one scan point.
    struct PointEval {
        double key = 0.0;
        double n11 = 0.0;
        double phi = 0.5;
    };
    const auto eval_point = [&](double h_hat, double m_hat) {
        PointEval pe;
        const double bracket = r.p_plus_low - r.p_minus_up + m_hat - h_hat;
        const double n11_star = pref_11 * bracket;
        pe.n11 = std::clamp(ol(std::max(n11_star, 0.0)), 0.0, r.n_z - r.n0_z_low);
        const double t_star = pref_tz * pref_tx * std::max(m_hat - h_hat / 2.0, 0.0);
        const double t_up = ou(t_star);
        pe.phi = pe.n11 > 0.0 ? std::clamp(t_up / pe.n11, 0.0, 0.5) : 0.5;
        pe.key = r.n0_z_low +
                 pe.n11 * (1.0 - finitekey::binary_entropy(pe.phi)) -
                 r.lambda_ec - log_terms;
        return pe;
    };

    // Uniform inclusive grid over the rectangle, then one refinement pass
    // around the incumbent minimum (ties broken toward the lexicographically
    // first grid index by strict comparison in row-major order).
    const int g = params.scan_grid;
    double best_key = std::numeric_limits<double>::infinity();
    double best_h = r.h_hat_low, best_m = r.m_hat_low;
    PointEval best_pe;
    const auto scan_rect = [&](double h_lo, double h_hi, double m_lo, double m_hi) {
        for (int i = 0; i < g; ++i) {
            const double h =
                h_lo + (h_hi - h_lo) * static_cast<double>(i) / (g - 1);
            for (int j = 0; j < g; ++j) {
                const double m =
                    m_lo + (m_hi - m_lo) * static_cast<double>(j) / (g - 1);
                const PointEval pe = eval_point(h, m);
                if (pe.key < best_key) {
                    best_key = pe.key;
                    best_h = h;
                    best_m = m;
                    best_pe = pe;
                }
            }
        }
    };
    scan_rect(r.h_hat_low, r.h_hat_up, r.m_hat_low, r.m_hat_up);
    const double h_step = (r.h_hat_up - r.h_hat_low) / (g - 1);
    const double m_step = (r.m_hat_up - r.m_hat_low) / (g - 1);
    scan_rect(std::max(best_h - h_step, r.h_hat_low),
              std::min(best_h + h_step, r.h_hat_up),
              std::max(best_m - m_step, r.m_hat_low),
              std::min(best_m + m_step, r.m_hat_up));

    r.h_hat = best_h;
    r.m_hat = best_m;
    r.n11_z_low = best_pe.n11;
    r.phi11_z_up = best_pe.phi;
    r.key_quantity = best_key;

    // Forgery error threshold from the worst-case scan point.
    r.c0 = std::clamp(r.n0_z_low / r.n_z, 0.0, 1.0);
    r.c1 = std::clamp(r.n11_z_low / r.n_z, 0.0, 1.0 - r.c0);
    r.p_e = error_threshold(r.c0, r.c1, r.phi11_z_up);

    const double gap = r.p_e - r.e_z_up;
    if (gap <= 0.0) return r;  // verifier threshold cannot clear the error rate
    r.s_a = r.e_z_up + gap / 4.0;
    r.s_v = r.e_z_up + 3.0 * gap / 4.0;

    // All three exponential security bounds share the exponent (gap/4)^2 L.
    const double l_real = std::log(2.0 / eps_target) / ((gap / 4.0) * (gap / 4.0));
    if (!(l_real <= 9e15)) return r;  // absurd length; report infeasible
    r.length_l = static_cast<std::int64_t>(std::ceil(std::max(l_real, 1.0)));
    r.r_sig = r.n_z / (2.0 * static_cast<double>(r.length_l) * m_bits);
    r.feasible = true;
    return r;
}

BaselineRatePoint baseline_rate_point(const BaselineParams& params,
                                      double m_bits, double eps_target) {
    const BaselineResult res =
        double_scan(params, baseline_yields(params), m_bits, eps_target);
    BaselineRatePoint pt;
    pt.distance_km = params.l_a + params.l_b;
    pt.feasible = res.feasible;
    pt.n_z = res.n_z;
    pt.e_z = res.e_z;
    pt.p_e = res.p_e;
    pt.length_l = res.length_l;
    pt.r_sig = res.r_sig;
    pt.r_per_pulse = res.r_sig / params.n_pulses;
    return pt;
}

double baseline_max_distance(BaselineParams params, double m_bits,
                             double eps_target, double fraction_a) {
    require(fraction_a > 0.0 && fraction_a < 1.0,
            "fraction_a must be in (0,1)");
    const auto feasible_at = [&](double l) {
        params.l_a = fraction_a * l;
        params.l_b = (1.0 - fraction_a) * l;
        return baseline_rate_point(params, m_bits, eps_target).feasible;
    };
    if (!feasible_at(0.0)) return 0.0;
    double lo = 0.0, hi = 0.0;
    for (double l = 25.0; l <= 2000.0; l += 25.0) {
        if (feasible_at(l)) {
            lo = l;
        } else {
            hi = l;
            break;
        }
    }
    if (hi == 0.0) return lo;  // feasible through the whole probe range
    while (hi - lo > 0.1) {
        const double mid = 0.5 * (lo + hi);
        (feasible_at(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace aqds::baseline
