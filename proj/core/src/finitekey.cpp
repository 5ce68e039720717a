#include "aqds/finitekey.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqds/errors.hpp"

namespace aqds::finitekey {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

void check_count(double x, const char* what) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::invalid_argument(std::string(what) +
                                " must be finite and nonnegative");
  }
}

void check_eps(double eps) {
  require(std::isfinite(eps) && eps > 0.0 && eps < 1.0,
          "failure probability must lie strictly inside (0, 1)");
}

}  // namespace

ChernoffBound chernoff_observed(double x_star, double eps) {
  check_count(x_star, "expected value");
  check_eps(eps);
  const double b = std::log(1.0 / eps);
  ChernoffBound out;
  out.upper = x_star + 0.5 * b + std::sqrt(2.0 * b * x_star + 0.25 * b * b);
  out.lower = std::max(x_star - std::sqrt(2.0 * b * x_star), 0.0);
  return out;
}

ChernoffBound chernoff_expected(double x, double eps) {
  check_count(x, "observed value");
  check_eps(eps);
  const double b = std::log(1.0 / eps);
  ChernoffBound out;
  out.upper = x + b + std::sqrt(2.0 * b * x + b * b);
  out.lower = std::max(x - 0.5 * b - std::sqrt(2.0 * b * x + 0.25 * b * b), 0.0);
  return out;
}

double gamma_u(double n, double k, double lambda, double eps) {
  require(std::isfinite(n) && n >= 1.0, "target group size must be >= 1");
  require(std::isfinite(k) && k >= 1.0, "sample size must be >= 1");
  require(std::isfinite(lambda) && lambda > 0.0 && lambda < 1.0,
          "sample rate must lie strictly inside (0, 1)");
  check_eps(eps);
  const double total = n + k;
  const double a_max = std::max(n, k);
  const double log_arg =
      total / (2.0 * kPi * n * k * lambda * (1.0 - lambda) * eps * eps);
  // Very loose settings can drive the log factor negative; the deviation
  // bound is then vacuously zero.
  const double g = std::max((total / (n * k)) * std::log(log_arg), 0.0);
  if (g == 0.0) return 0.0;
  const double ag = a_max * g / total;
  const double numerator =
      (1.0 - 2.0 * lambda) * ag +
      std::sqrt(ag * ag + 4.0 * lambda * (1.0 - lambda) * g);
  const double denominator = 2.0 + 2.0 * a_max * ag / total;
  return numerator / denominator;
}

double clamped_rate(double lambda, double k) {
  const double k_eff = std::max(k, 2.0);
  const double floor = 1.0 / k_eff;
  return std::clamp(lambda, floor, 1.0 - floor);
}

double binary_entropy(double p) {
  require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
          "binary entropy argument must lie in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double binary_entropy_inv(double h) {
  require(std::isfinite(h) && h >= 0.0 && h <= 1.0,
          "binary entropy value must lie in [0, 1]");
  if (h == 0.0) return 0.0;
  if (h == 1.0) return 0.5;
  double lo = 0.0;
  double hi = 0.5;
  // Bisection halves the bracket each step; 100 steps push the interval many
  // orders of magnitude below the 1e-12 target.
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < h) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

using photonics::PairingStats;
using photonics::ProtocolParams;
using photonics::Total;

// Per-bin intensity slots used when decomposing a two-bin total class.
constexpr int kMu = 0;
constexpr int kNu = 1;
constexpr int kVac = 2;

bool filtered_combo(int ia, int ib) {
  return (ia == kMu && ib == kNu) || (ia == kNu && ib == kMu);
}

struct BinSplit {
  int early = kVac;
  int late = kVac;
};

// Decomposition of each per-party two-bin total into ordered per-bin
// intensities.  Totals mixing the bright and decoy levels are never paired,
// so they have no entry here.
const std::array<BinSplit, 1> kVacSplits{{{kVac, kVac}}};
const std::array<BinSplit, 2> kNuSplits{{{kNu, kVac}, {kVac, kNu}}};
const std::array<BinSplit, 1> kTwoNuSplits{{{kNu, kNu}}};
const std::array<BinSplit, 2> kMuSplits{{{kMu, kVac}, {kVac, kMu}}};

std::pair<const BinSplit*, std::size_t> splits_of(Total total) {
  switch (total) {
    case Total::vac:
      return {kVacSplits.data(), kVacSplits.size()};
    case Total::nu:
      return {kNuSplits.data(), kNuSplits.size()};
    case Total::two_nu:
      return {kTwoNuSplits.data(), kTwoNuSplits.size()};
    case Total::mu:
      return {kMuSplits.data(), kMuSplits.size()};
  }
  throw std::logic_error("unknown intensity total");
}

// Source-side selection probability of each labeled two-bin class, i.e. the
// probability that a kept bin pair carries these intensity totals, before any
// detection physics.  Decoy-state ratios divide observed counts by these.
struct ClassProbs {
  double value[4][4] = {};

  double at(Total a, Total b) const {
    return value[static_cast<int>(a)][static_cast<int>(b)];
  }
};

ClassProbs class_probs(const ProtocolParams& p) {
  const double pa[3] = {p.p_mu_a, p.p_nu_a, p.p_vac_a()};
  const double pb[3] = {p.p_mu_b, p.p_nu_b, p.p_vac_b()};
  // Probability that one bin pair survives the bright/decoy cross filter.
  const double p_keep = 1.0 - p.p_mu_a * p.p_nu_b - p.p_nu_a * p.p_mu_b;
  require(p_keep > 0.0, "intensity filter removes every bin pair");
  double wt[3][3];
  for (int ia = 0; ia < 3; ++ia) {
    for (int ib = 0; ib < 3; ++ib) {
      wt[ia][ib] = filtered_combo(ia, ib) ? 0.0 : pa[ia] * pb[ib] / p_keep;
    }
  }
  const Total totals[4] = {Total::vac, Total::nu, Total::two_nu, Total::mu};
  ClassProbs out;
  for (Total ta : totals) {
    for (Total tb : totals) {
      const auto [sa, na] = splits_of(ta);
      const auto [sb, nb] = splits_of(tb);
      double sum = 0.0;
      for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
          sum += wt[sa[i].early][sb[j].early] * wt[sa[i].late][sb[j].late];
        }
      }
      out.value[static_cast<int>(ta)][static_cast<int>(tb)] = sum;
    }
  }
  return out;
}

double set_count(const PairingStats& stats, Total a, Total b) {
  const auto it = stats.n_sets.find({a, b});
  return it == stats.n_sets.end() ? 0.0 : it->second;
}

}  // namespace

EstimatedParams estimate(const PairingStats& stats,
                         const ProtocolParams& p) {
  p.validate();
  require(p.p_mu_a > 0.0 && p.p_nu_a > 0.0 && p.p_vac_a() > 0.0 &&
              p.p_mu_b > 0.0 && p.p_nu_b > 0.0 && p.p_vac_b() > 0.0,
          "estimation requires every intensity level to be selected with "
          "positive probability");
  const double eps = p.eps;
  const auto el = [eps](double x) { return chernoff_expected(x, eps).lower; };
  const auto eu = [eps](double x) { return chernoff_expected(x, eps).upper; };
  const auto ol = [eps](double x) { return chernoff_observed(x, eps).lower; };

  const ClassProbs pc = class_probs(p);
  const double pc_mumu = pc.at(Total::mu, Total::mu);
  const double pc_muo = pc.at(Total::mu, Total::vac);
  const double pc_omu = pc.at(Total::vac, Total::mu);
  const double pc_nunu = pc.at(Total::nu, Total::nu);
  const double pc_nuo = pc.at(Total::nu, Total::vac);
  const double pc_onu = pc.at(Total::vac, Total::nu);
  const double pc_xx = pc.at(Total::two_nu, Total::two_nu);
  const double pc_xo = pc.at(Total::two_nu, Total::vac);
  const double pc_ox = pc.at(Total::vac, Total::two_nu);
  const double pc_oo = pc.at(Total::vac, Total::vac);

  EstimatedParams est;
  est.n_z = set_count(stats, Total::mu, Total::mu);
  est.m_z = stats.m_z;
  if (!(est.n_z > 0.0)) {
    throw NoKeyError("no key-generating coincidences available");
  }
  est.e_z = std::clamp(est.m_z / est.n_z, 0.0, 1.0);
  est.n_x = set_count(stats, Total::two_nu, Total::two_nu);
  est.m_x = stats.m_x;

  const double n_muo = set_count(stats, Total::mu, Total::vac);
  const double n_omu = set_count(stats, Total::vac, Total::mu);
  const double n_nunu = set_count(stats, Total::nu, Total::nu);
  const double n_nuo = set_count(stats, Total::nu, Total::vac);
  const double n_onu = set_count(stats, Total::vac, Total::nu);
  const double n_xo = set_count(stats, Total::two_nu, Total::vac);
  const double n_ox = set_count(stats, Total::vac, Total::two_nu);
  const double n_oo = set_count(stats, Total::vac, Total::vac);

  // Vacuum contribution to the key-generating class: scale the yield of the
  // (vacuum_a, bright_b) class by the vacuum weight of the bright source.
  est.s0_z_exp = std::exp(-p.mu_a) * (pc_mumu / pc_omu) * el(n_omu);
  est.s0_z_low = std::min(ol(est.s0_z_exp), est.n_z);

  // Single-photon-pair contribution: a two-intensity decoy bracket built
  // from the per-class yields.  The bright and decoy groups share the
  // vacuum-class term; its combined coefficient is positive, so one lower
  // bound of n_oo serves both.
  const double mu_p = (p.mu_a / p.mu_b <= p.nu_a / p.nu_b) ? p.mu_a : p.mu_b;
  const double nu_p = (p.mu_a / p.mu_b <= p.nu_a / p.nu_b) ? p.nu_a : p.nu_b;
  const double el_oo_yield = el(n_oo) / pc_oo;
  const double mu_group =
      p.mu_a * p.mu_b * mu_p *
      (std::exp(p.nu_a + p.nu_b) * el(n_nunu) / pc_nunu -
       std::exp(p.nu_b) * eu(n_onu) / pc_onu -
       std::exp(p.nu_a) * eu(n_nuo) / pc_nuo + el_oo_yield);
  const double nu_group =
      p.nu_a * p.nu_b * nu_p *
      (std::exp(p.mu_a + p.mu_b) * eu(est.n_z) / pc_mumu -
       std::exp(p.mu_b) * el(n_omu) / pc_omu -
       std::exp(p.mu_a) * el(n_muo) / pc_muo + el_oo_yield);
  const double bracket = mu_group - nu_group;

  const double pref_z = std::exp(-p.mu_a - p.mu_b) * pc_mumu /
                        (p.nu_a * p.nu_b * (mu_p - nu_p));
  est.s11_z_exp = std::max(pref_z * bracket, 0.0);
  est.s11_z_low = ol(est.s11_z_exp);
  // The vacuum and single-photon-pair contributions partition part of n_z.
  est.s11_z_low = std::min(est.s11_z_low, est.n_z - est.s0_z_low);

  // Same bracket re-weighted for the sifted check class, whose per-party
  // totals are twice the decoy intensity.
  const double sift = 2.0 / static_cast<double>(p.phase_slices);
  const double pref_x = std::exp(-2.0 * p.nu_a - 2.0 * p.nu_b) * 4.0 * pc_xx *
                        sift / (p.mu_a * p.mu_b * (mu_p - nu_p));
  est.s11_x_exp = std::max(pref_x * bracket, 0.0);
  est.s11_x_low = std::min(ol(est.s11_x_exp), est.n_x);

  // Vacuum-origin errors within the sifted check class: a vacuum bin pair
  // produces a random outcome, hence the factor 1/2.  The one-sided-vacuum
  // classes both contain the all-vacuum class, which the last term removes.
  // The vacuum-side class counts are observed in full before phase sifting,
  // so the concentration bounds act on the raw counts; the sifted share is
  // the deterministic 2/M fraction applied afterwards, which is tighter than
  // bounding the sifted subsample directly.
  const double m0_exp =
      sift * (std::exp(-2.0 * p.nu_a) * (pc_xx / (2.0 * pc_ox)) * el(n_ox) +
              std::exp(-2.0 * p.nu_b) * (pc_xx / (2.0 * pc_xo)) * el(n_xo) -
              std::exp(-2.0 * p.nu_a - 2.0 * p.nu_b) *
                  (pc_xx / (2.0 * pc_oo)) * eu(n_oo));
  // m_x is itself an observed count, so once the vacuum-origin share is
  // converted to an observed-level lower bound the subtraction needs no
  // further concentration step.
  est.m0_2nu_low = std::clamp(ol(std::max(m0_exp, 0.0)), 0.0, est.m_x);
  est.t11_x_up = est.m_x - est.m0_2nu_low;
  est.e11_x_up = est.s11_x_low > 0.0
                     ? std::clamp(est.t11_x_up / est.s11_x_low, 0.0, 1.0)
                     : 1.0;

  // Transfer the check-class error rate onto the key-generating class.
  if (est.s11_z_low < 1.0 || est.s11_x_low < 1.0 || est.e11_x_up >= 0.5) {
    est.phi11_z_up = 0.5;
    est.phase_degenerate = true;
  } else {
    const double lam = clamped_rate(est.e11_x_up, est.s11_x_low);
    const double phi =
        est.e11_x_up + gamma_u(est.s11_z_low, est.s11_x_low, lam, p.eps_e);
    if (phi >= 0.5) {
      est.phi11_z_up = 0.5;
      est.phase_degenerate = true;
    } else {
      est.phi11_z_up = phi;
    }
  }
  return est;
}

EntropyBudget entropy_budget(const EstimatedParams& est,
                             const ProtocolParams& p) {
  require(est.n_z > 0.0, "entropy budget requires a nonempty key class");
  EntropyBudget out;
  const double eps = p.eps;
  // One smoothing term and one hashing term, each of width eps.
  const double reserve = 2.0 * std::log2(2.0 / (eps * eps));
  out.h_min = est.s0_z_low +
              est.s11_z_low * (1.0 - binary_entropy(est.phi11_z_up)) - reserve;
  out.h_max = est.n_z * p.f_ec * binary_entropy(est.e_z) + std::log2(2.0 / eps);
  out.margin = out.h_min - out.h_max;
  out.h_min_frac = out.h_min / est.n_z;
  out.h_max_frac = out.h_max / est.n_z;
  out.eps_sec = 2.0 * (5.0 * eps + 2.0 * p.eps_e);
  out.feasible = out.margin > 0.0;
  return out;
}

SubgroupBounds subgroup_bounds(const EstimatedParams& est, double n,
                               double eps) {
  require(std::isfinite(n) && n >= 1.0, "subgroup size must be >= 1");
  require(n < est.n_z, "subgroup must be smaller than the key class");
  check_eps(eps);
  const double nz = est.n_z;
  const double rest = nz - n;
  SubgroupBounds out;

  // Sampling correction from the full class onto the subgroup.  When the
  // remainder holds less than one event the subgroup is essentially the
  // whole class and no correction applies.
  const auto scaled_low = [&](double full) {
    const double frac = full / nz;
    if (rest < 1.0) return std::max(n * frac, 0.0);
    const double dev = gamma_u(n, rest, clamped_rate(frac, rest), eps);
    return std::max(n * (frac - dev), 0.0);
  };
  out.s0_zn_low = scaled_low(est.s0_z_low);
  out.s11_zn_low = scaled_low(est.s11_z_low);
  out.s11_zn_low = std::min(out.s11_zn_low, n - out.s0_zn_low);

  if (est.phase_degenerate || out.s11_zn_low < 1.0) {
    out.phi11_zn_up = 0.5;
    out.phase_degenerate = true;
    return out;
  }
  const double others = est.s11_z_low - out.s11_zn_low;
  double phi = est.phi11_z_up;
  if (others >= 1.0) {
    phi += gamma_u(out.s11_zn_low, others,
                   clamped_rate(est.phi11_z_up, others), eps);
  }
  if (phi >= 0.5) {
    out.phi11_zn_up = 0.5;
    out.phase_degenerate = true;
  } else {
    out.phi11_zn_up = phi;
  }
  return out;
}

namespace {

// Usable entropy of an n-bit subgroup after error-correction leakage.
double subgroup_entropy(const SubgroupBounds& sub, double n,
                        double leak_per_bit) {
  return sub.s0_zn_low +
         sub.s11_zn_low * (1.0 - binary_entropy(sub.phi11_zn_up)) -
         n * leak_per_bit;
}

}  // namespace

SignatureSizing signature_length(const EstimatedParams& est,
                                 const ProtocolParams& p, double m_bits,
                                 double eps_target) {
  require(std::isfinite(m_bits) && m_bits >= 1.0,
          "message digest length must be >= 1 bit");
  check_eps(eps_target);

  SignatureSizing out;
  out.eps_rob = 4.0 * p.eps;
  out.eps_rep = 2.0 * p.eps;
  out.meets_rob_rep = out.eps_rob <= eps_target && out.eps_rep <= eps_target;

  const double leak_per_bit = p.f_ec * binary_entropy(est.e_z);
  const double log2_target = std::log2(eps_target);
  // Three disjoint key blocks of n bits must fit into the key class.
  const auto cap = static_cast<std::int64_t>(std::floor(est.n_z / 3.0));
  if (cap < 1) return out;

  struct Eval {
    double h_n = 0.0;
    double log2_for = 0.0;
    SubgroupBounds sub;
  };
  const auto eval = [&](std::int64_t n) {
    Eval e;
    e.sub = subgroup_bounds(est, static_cast<double>(n), p.eps);
    e.h_n = subgroup_entropy(e.sub, static_cast<double>(n), leak_per_bit);
    e.log2_for = std::log2(m_bits) + 1.0 - e.h_n;
    return e;
  };
  const auto passes = [&](std::int64_t n) {
    return eval(n).log2_for <= log2_target;
  };

  // Find any qualifying length by doubling, then bisect down to the smallest
  // one.  The forgery bound is monotone in n apart from tiny sampling-term
  // wrinkles, which the final neighbour walk absorbs.
  std::int64_t hi = 0;
  std::int64_t lo = 0;
  for (std::int64_t n = 16;; n *= 2) {
    if (n >= cap) {
      if (passes(cap)) hi = cap;
      break;
    }
    if (passes(n)) {
      hi = n;
      break;
    }
    lo = n;
  }
  if (hi == 0) return out;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  while (hi > 1 && passes(hi - 1)) --hi;

  const Eval chosen = eval(hi);
  out.n = hi;
  out.h_n = chosen.h_n;
  out.r_sig = est.n_z / (3.0 * static_cast<double>(hi));
  out.eps_for = std::min(std::exp2(chosen.log2_for), 1.0);
  out.feasible = true;
  out.sub = chosen.sub;
  return out;
}

AsyncRatePoint async_rate_point(const ProtocolParams& params, double m_bits,
                                double eps_target) {
  AsyncRatePoint point;
  point.distance_km = params.l_a + params.l_b;
  point.eps_for = 1.0;
  try {
    const PairingStats stats = photonics::pairing_stats(params);
    const EstimatedParams est = estimate(stats, params);
    const EntropyBudget budget = entropy_budget(est, params);
    const SignatureSizing sizing =
        signature_length(est, params, m_bits, eps_target);
    point.n_z = est.n_z;
    point.e_z = est.e_z;
    point.phi11_z_up = est.phi11_z_up;
    point.h_min_frac = budget.h_min_frac;
    point.h_max_frac = budget.h_max_frac;
    point.n = sizing.n;
    point.r_sig = sizing.r_sig;
    point.eps_for = sizing.eps_for;
    point.feasible = sizing.feasible;
    if (params.n_pulses > 0.0) {
      point.r_per_pulse = sizing.r_sig / params.n_pulses;
    }
  } catch (const DegenerateChannelError&) {
    // Channel produces no coincidences at all: report an infeasible point.
  } catch (const NoKeyError&) {
    // No key-generating coincidences: likewise infeasible.
  }
  return point;
}

double max_feasible_distance(const ProtocolParams& params, double m_bits,
                             double eps_target, double fraction_a) {
  require(std::isfinite(fraction_a) && fraction_a > 0.0 && fraction_a < 1.0,
          "distance split fraction must lie strictly inside (0, 1)");
  const auto feasible_at = [&](double total_km) {
    ProtocolParams p = params;
    p.l_a = fraction_a * total_km;
    p.l_b = (1.0 - fraction_a) * total_km;
    return async_rate_point(p, m_bits, eps_target).feasible;
  };
  constexpr double kMaxKm = 2000.0;
  constexpr double kStepKm = 25.0;
  if (!feasible_at(0.0)) return 0.0;
  double lo = 0.0;
  double hi = kMaxKm;
  bool found_edge = false;
  for (double l = kStepKm; l <= kMaxKm; l += kStepKm) {
    if (feasible_at(l)) {
      lo = l;
    } else {
      hi = l;
      found_edge = true;
      break;
    }
  }
  if (!found_edge) return kMaxKm;
  while (hi - lo > 0.1) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

namespace {

bool valid_choice(const IntensityChoice& c) {
  return c.mu > 2.0 * c.nu && c.nu > 0.0 && c.p_mu > 0.0 && c.p_nu > 0.0 &&
         c.p_mu + c.p_nu < 1.0;
}

ProtocolParams apply_choice(const ProtocolParams& base,
                            const IntensityChoice& c) {
  ProtocolParams p = base;
  p.mu_a = p.mu_b = c.mu;
  p.nu_a = p.nu_b = c.nu;
  p.p_mu_a = p.p_mu_b = c.p_mu;
  p.p_nu_a = p.p_nu_b = c.p_nu;
  return p;
}

}  // namespace

IntensityOptimum optimize_intensities(const ProtocolParams& params,
                                      double m_bits, double eps_target) {
  IntensityOptimum best;
  best.choice = {params.mu_a, params.nu_a, params.p_mu_a, params.p_nu_a};
  best.point = async_rate_point(params, m_bits, eps_target);
  const double input_r = best.point.r_sig;

  const auto consider = [&](const IntensityChoice& c) {
    if (!valid_choice(c)) return;
    const AsyncRatePoint pt =
        async_rate_point(apply_choice(params, c), m_bits, eps_target);
    // Strict comparison keeps the first-found candidate on ties, making the
    // scan order (and hence the result) deterministic.
    if (pt.r_sig > best.point.r_sig) {
      best.choice = c;
      best.point = pt;
    }
  };

  for (double mu = 0.1; mu <= 0.91; mu += 0.1) {
    for (double nu = 0.02; nu <= 0.2005; nu += 0.03) {
      for (double p_mu = 0.1; p_mu <= 0.71; p_mu += 0.1) {
        for (double p_nu = 0.1; p_nu <= 0.71; p_nu += 0.1) {
          if (p_mu + p_nu > 0.9) continue;
          consider({mu, nu, p_mu, p_nu});
        }
      }
    }
  }

  double step_mu = 0.05, step_nu = 0.015, step_p = 0.05;
  for (int pass = 0; pass < 2; ++pass) {
    const IntensityChoice center = best.choice;
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        for (int k = -1; k <= 1; ++k) {
          for (int l = -1; l <= 1; ++l) {
            consider({center.mu + i * step_mu, center.nu + j * step_nu,
                      center.p_mu + k * step_p, center.p_nu + l * step_p});
          }
        }
      }
    }
    step_mu *= 0.5;
    step_nu *= 0.5;
    step_p *= 0.5;
  }
  best.improved = best.point.r_sig > input_r;
  return best;
}

}  // namespace aqds::finitekey
