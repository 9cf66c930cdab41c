#pragma once

// Flatness-condition checkers over a base-point x direction grid, the
// projectively flat Ricci identity and the quadratic reconstruction of F
// from projective data.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "finsler/alpha_beta.hpp"
#include "finsler/core.hpp"
#include "finsler/errors.hpp"
#include "finsler/metric.hpp"

namespace finsler {

inline constexpr double kCheckerTolerance = 1e-7;
inline constexpr double kConformalityTolerance = 1e-8;
inline constexpr double kAbsoluteFloor = 1e-9;

struct CheckGrid {
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> directions;  // unit Euclidean vectors
};

namespace check_detail {

inline double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

inline std::vector<std::vector<double>> sphere_directions(int n, int count) {
  std::vector<std::vector<double>> out;
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * (k + 0.25) / count;
      out.push_back({std::cos(t), std::sin(t)});
    }
  } else if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      out.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
    }
  } else {
    std::mt19937_64 rng(0xd1ec);
    std::normal_distribution<double> g;
    for (int k = 0; k < count; ++k) {
      std::vector<double> v(n);
      double s = 0.0;
      for (auto& c : v) s += (c = g(rng)) * c;
      for (auto& c : v) c /= std::sqrt(s);
      out.push_back(std::move(v));
    }
  }
  return out;
}

inline const int kPrimes[] = {2, 3, 5, 7};

inline Eigen::VectorXd as_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> as_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Grid direction rescaled to alpha(y) = 1, or nullopt outside the Kropina cone.
inline std::optional<Eigen::VectorXd> admissible_direction(const AlphaBetaFrame& f, const std::vector<double>& d,
                                                           bool kropina) {
  Eigen::VectorXd y = as_vec(d);
  y /= f.alpha(y);
  if (kropina && f.beta(y) < 0.05) return std::nullopt;
  return y;
}

}  // namespace check_detail

/// Deterministic grid: Halton base points in the sampling box (those
/// outside the metric's domain are skipped) and evenly spread directions.
inline CheckGrid default_grid(const MetricSpec& m, int points = 8, int directions = 16,
                              double half_width = 0.8 * kDefaultBoxHalfWidth) {
  CheckGrid g;
  const int n = m.dim();
  for (int k = 1; static_cast<int>(g.points.size()) < points && k < 64 * points; ++k) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = half_width * (2.0 * check_detail::halton(k, check_detail::kPrimes[i]) - 1.0);
    try {
      m.check_domain(x);
    } catch (const Error&) {
      continue;
    }
    g.points.push_back(std::move(x));
  }
  g.directions = check_detail::sphere_directions(n, directions);
  return g;
}

struct ConditionResidual {
  std::string name;
  double max_abs = 0.0;
  double max_rel = 0.0;  // residual / largest term magnitude
  bool pass = true;

  void add(double residual, double scale, double tol) {
    const double a = std::abs(residual);
    const double s = std::max(scale, kAbsoluteFloor);
    max_abs = std::max(max_abs, a);
    max_rel = std::max(max_rel, a / s);
    if (a > tol * s) pass = false;
  }
};

inline double max_abs_of(std::initializer_list<double> terms) {
  double m = 0.0;
  for (double t : terms) m = std::max(m, std::abs(t));
  return m;
}

// -- Randers: weighted projective Ricci flatness ---------------------------

struct RandersFlatReport {
  bool verdict = false;
  ConditionResidual ric;     // Ric_bar - t^m_m alpha^2 - 2 t_00
  ConditionResidual div_s;   // s^m_{0;m}
  double max_wpric = 0.0;    // |WPRic_0| from the closed form, diagnostic
  int samples = 0;
};

inline RandersFlatReport check_randers_wpric_flat(const MetricSpec& m, const CheckGrid& grid,
                                                  double tol = kCheckerTolerance) {
  if (m.structure() != Structure::Randers) throw SpecError("Randers checker needs a Randers metric");
  RandersFlatReport rep;
  rep.ric.name = "ric_bar";
  rep.div_s.name = "div_s";
  for (const auto& x : grid.points) {
    AlphaBetaFrame f = build_frame(m, x);
    for (const auto& d : grid.directions) {
      Eigen::VectorXd y = *check_detail::admissible_direction(f, d, false);
      const double a2 = f.alpha2(y);
      const double rb = f.ric_bar_y(y), tt = f.t_trace * a2, t00 = 2.0 * f.t00(y);
      rep.ric.add(rb - tt - t00, max_abs_of({rb, tt, t00}), tol);
      // a single term: measured against alpha = 1
      rep.div_s.add(f.div_s0(y), 1.0, tol);
      rep.max_wpric = std::max(rep.max_wpric, std::abs(randers_wpric(f, y)));
      ++rep.samples;
    }
  }
  rep.verdict = rep.samples > 0 && rep.ric.pass && rep.div_s.pass;
  return rep;
}

struct ReversibilityReport {
  bool formula_verdict = false;  // s^m_{0;m} = 0 on the grid
  bool direct_verdict = false;   // generic WPRic_0(x, y) = WPRic_0(x, -y)
  bool agree = false;
  double max_div_s = 0.0;
  double max_asymmetry = 0.0;    // |WPRic_0(y) - WPRic_0(-y)| / 4
  int samples = 0;
};

/// Both verdicts use the same yardstick: WPRic_0(y) - WPRic_0(-y) equals
/// 4 alpha s^m_{0;m}, so the direct asymmetry is divided by 4.
inline ReversibilityReport check_reversible_wpric(const MetricSpec& m, const CheckGrid& grid,
                                                  double tol = kCheckerTolerance) {
  if (m.structure() != Structure::Randers) throw SpecError("reversibility checker needs a Randers metric");
  ReversibilityReport rep;
  rep.formula_verdict = rep.direct_verdict = true;
  PipelineOptions opt{VolumeSpec::closed_form_for(m), ReferenceVolume{}};
  for (const auto& x : grid.points) {
    AlphaBetaFrame f = build_frame(m, x);
    for (const auto& d : grid.directions) {
      Eigen::VectorXd y = *check_detail::admissible_direction(f, d, false);
      const double wp = compute_bundle(m, {x, check_detail::as_std(y)}, opt).WPRic0;
      const double wm = compute_bundle(m, {x, check_detail::as_std(-y)}, opt).WPRic0;
      const double scale = std::max({1.0, std::abs(wp), std::abs(wm)});
      const double formula = std::abs(f.div_s0(y));
      const double direct = std::abs(wp - wm) / 4.0;
      rep.max_div_s = std::max(rep.max_div_s, formula);
      rep.max_asymmetry = std::max(rep.max_asymmetry, direct);
      if (formula > tol * scale) rep.formula_verdict = false;
      if (direct > tol * scale) rep.direct_verdict = false;
      ++rep.samples;
    }
  }
  rep.agree = rep.formula_verdict == rep.direct_verdict;
  return rep;
}

// -- Kropina ---------------------------------------------------------------

struct KropinaFlatReport {
  bool applicable = false;  // beta conformal on the grid
  bool verdict = false;
  double conformal_deviation = 0.0;
  ConditionResidual ric;      // the Ric_bar condition as stated (lambda alpha^2 / ((n+1)^2 b^4))
  ConditionResidual ric_alt;  // same with lambda alpha^2 / b^2, reported only
  ConditionResidual sm_sm;    // s^m s_m + b^2 t^m_m / 2
  double max_wpric = 0.0;     // compositional closed form, diagnostic
  int samples = 0;
  std::string note;
};

/// Max over grid directions of |r00/alpha^2 - mean| at one base point, in
/// units of max(1, |r00/alpha^2|).
inline double conformal_deviation(const AlphaBetaFrame& f, const std::vector<std::vector<double>>& dirs) {
  std::vector<double> k;
  for (const auto& d : dirs) {
    Eigen::VectorXd y = check_detail::as_vec(d);
    k.push_back(f.r00(y) / f.alpha2(y));
  }
  double mean = 0.0, big = 1.0;
  for (double v : k) {
    mean += v;
    big = std::max(big, std::abs(v));
  }
  mean /= static_cast<double>(k.size());
  double dev = 0.0;
  for (double v : k) dev = std::max(dev, std::abs(v - mean));
  return dev / big;
}

inline KropinaFlatReport check_kropina_wpric_flat(const MetricSpec& m, const CheckGrid& grid,
                                                  double tol = kCheckerTolerance) {
  if (m.structure() != Structure::Kropina) throw SpecError("Kropina checker needs a Kropina metric");
  KropinaFlatReport rep;
  rep.ric.name = "ric_bar";
  rep.ric_alt.name = "ric_bar_alt_scaling";
  rep.sm_sm.name = "sm_sm";
  std::vector<AlphaBetaFrame> frames;
  for (const auto& x : grid.points) {
    frames.push_back(build_frame(m, x));
    rep.conformal_deviation = std::max(rep.conformal_deviation, conformal_deviation(frames.back(), grid.directions));
  }
  rep.applicable = !frames.empty() && rep.conformal_deviation <= kConformalityTolerance;
  if (!rep.applicable) {
    rep.note = "beta is not conformal on the grid; conditions not applicable";
    return rep;
  }

  for (const auto& f : frames) {
    const double n = f.n, b2 = f.b2, b4 = b2 * b2, sg = f.sigma_conf;
    const double ss = f.sm_sm(), half_bt = 0.5 * b2 * f.t_trace;
    rep.sm_sm.add(ss + half_bt, max_abs_of({ss, half_bt}), tol);
    for (const auto& d : grid.directions) {
      auto yo = check_detail::admissible_direction(f, d, true);
      if (!yo) continue;
      const Eigen::VectorXd& y = *yo;
      const double a2 = f.alpha2(y), be = f.beta(y), s0 = f.s0(y);
      const double th = f.theta_k0(y), thh = kropina_theta_horizontal(f, y);
      const double rb = f.ric_bar_y(y);
      const double lam_term = f.lambda * a2 / ((n + 1.0) * (n + 1.0) * b4);
      const double lam_alt = f.lambda * a2 / b2;
      const double mid =
          (n - 2.0) / b4 * (b2 * f.s0_0(y) - (s0 + be * sg) * (s0 + be * sg) + b2 * be * f.sigma_grad.dot(y));
      const double tail = (n - 1.0) / ((n + 1.0) * (n + 1.0)) * (th * th + (n + 1.0) * thh);
      rep.ric.add(rb - lam_term + mid + tail, max_abs_of({rb, lam_term, mid, tail}), tol);
      rep.ric_alt.add(rb - lam_alt + mid + tail, max_abs_of({rb, lam_alt, mid, tail}), tol);
      rep.max_wpric = std::max(rep.max_wpric, std::abs(kropina_wpric(f, y)));
      ++rep.samples;
    }
  }
  rep.verdict = rep.samples > 0 && rep.ric.pass && rep.sm_sm.pass;
  return rep;
}

struct IsotropicSReport {
  bool isotropic = true;  // (i)  S / ((n+1) F) independent of direction
  bool conformal_r = true;  // (ii) r00 / alpha^2 independent of direction
  bool s_zero = true;     // (iii) S = 0
  bool conformal_b = true;  // (iv) b_{i;j} + b_{j;i} proportional to a_ij
  bool all_or_none = true;
  double max_c_spread = 0.0, max_k_spread = 0.0, max_s_rel = 0.0, max_r_offdiag = 0.0;
};

inline IsotropicSReport check_isotropic_s_equivalences(const MetricSpec& m, const CheckGrid& grid,
                                                       double tol = kCheckerTolerance) {
  if (m.structure() != Structure::Kropina) throw SpecError("isotropic-S check needs a Kropina metric");
  IsotropicSReport rep;
  for (const auto& x : grid.points) {
    AlphaBetaFrame f = build_frame(m, x);
    const double n1 = f.n + 1.0;
    std::vector<double> cs, ks;
    double c_big = 1.0, k_big = 1.0;
    for (const auto& d : grid.directions) {
      auto yo = check_detail::admissible_direction(f, d, true);
      if (!yo) continue;
      const Eigen::VectorXd& y = *yo;
      const double F = f.alpha2(y) / f.beta(y);
      const double S = kropina_s_curvature(f, y);
      const double c = S / (n1 * F), k = f.r00(y) / f.alpha2(y);
      cs.push_back(c);
      ks.push_back(k);
      c_big = std::max(c_big, std::abs(c));
      k_big = std::max(k_big, std::abs(k));
      // terms of S = (n+1)(F r0 - r00) / (F b^2)
      const double scale = max_abs_of({n1 * f.r0(y) / f.b2, n1 * f.r00(y) / (F * f.b2), kAbsoluteFloor * F});
      const double rel = std::abs(S) / scale;
      rep.max_s_rel = std::max(rep.max_s_rel, rel);
      if (rel > tol) rep.s_zero = false;
    }
    auto spread = [](const std::vector<double>& v) {
      if (v.empty()) return 0.0;
      auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return *hi - *lo;
    };
    const double cspread = spread(cs) / c_big, kspread = spread(ks) / k_big;
    rep.max_c_spread = std::max(rep.max_c_spread, cspread);
    rep.max_k_spread = std::max(rep.max_k_spread, kspread);
    if (cspread > tol) rep.isotropic = false;
    if (kspread > tol) rep.conformal_r = false;

    const double k = (f.a_inv * f.r).trace() / f.n;
    const double off = (f.r - k * f.a).norm() / std::max(1.0, f.r.norm());
    rep.max_r_offdiag = std::max(rep.max_r_offdiag, off);
    if (off > tol) rep.conformal_b = false;
  }
  const int count = rep.isotropic + rep.conformal_r + rep.s_zero + rep.conformal_b;
  rep.all_or_none = count == 0 || count == 4;
  return rep;
}

// -- projectively flat metrics ---------------------------------------------

/// Projective data at one sample. Only the fields a given use needs are
/// read: projectively_flat_ricci reads P, P0; the reconstruction reads the
/// rest.
struct ProjectiveData {
  double P = 0.0;
  double P0 = 0.0;
  double c = 0.0;
  double c0 = 0.0;
  double sigma_iso = 0.0;
  double eta = 0.0;
  double eta0 = 0.0;
};

inline double projectively_flat_ricci(const ProjectiveData& pd, int n) { return (n - 1.0) * (pd.P * pd.P - pd.P0); }

struct ProjectiveFactor {
  bool flat = false;  // G^i = P y^i on every component
  double P = 0.0;
  double P0 = 0.0;    // P_{x^j} y^j
  double mismatch = 0.0;
};

/// P = G^k / y^k on the largest |y^k|, checked on every other component
/// to 1e-8; P0 from the x-derivatives of the same quotient.
inline ProjectiveFactor extract_projective_factor(const MetricSpec& m, const TangentSample& s,
                                                  double consistency = 1e-8) {
  SprayContext ctx(m, s);
  const int n = ctx.dim();
  int k = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(s.y[i]) > std::abs(s.y[k])) k = i;
  ProjectiveFactor out;
  MultiJet P = ctx.G(k) / ctx.Y()[k];
  out.P = P.value();
  double gmax = 0.0;
  for (int i = 0; i < n; ++i) gmax = std::max(gmax, std::abs(ctx.G(i).value()));
  for (int i = 0; i < n; ++i)
    out.mismatch = std::max(out.mismatch, std::abs(ctx.G(i).value() - out.P * s.y[i]));
  out.mismatch /= std::max(gmax, kAbsoluteFloor * ctx.F() * ctx.F());
  out.flat = out.mismatch <= consistency;
  for (int j = 0; j < n; ++j) out.P0 += s.y[j] * SprayContext::d1(P, ctx.xvar(j));
  return out;
}

enum class ReconstructionCase { Kropina, Randers };

struct Reconstruction {
  double F = 0.0;
  ReconstructionCase kind = ReconstructionCase::Randers;
  double residual = 0.0;  // of (sigma - c^2) F^2 - (2 c eta - c0) F + (P0 - P^2 - eta^2 - eta0)
};

inline const char* to_string(ReconstructionCase c) { return c == ReconstructionCase::Kropina ? "kropina" : "randers"; }

inline double t1_residual(const ProjectiveData& pd, double F) {
  const double A = pd.sigma_iso - pd.c * pd.c;
  const double B = 2.0 * pd.c * pd.eta - pd.c0;
  const double C = pd.P0 - pd.P * pd.P - pd.eta * pd.eta - pd.eta0;
  return A * F * F - B * F + C;
}

inline Reconstruction reconstruct_metric_from_projective_data(const ProjectiveData& pd, double zero_tol = 1e-14) {
  const double A = pd.sigma_iso - pd.c * pd.c;
  const double B = 2.0 * pd.c * pd.eta - pd.c0;
  const double C = pd.P0 - pd.P * pd.P - pd.eta * pd.eta - pd.eta0;
  const double scale = std::max({1.0, std::abs(pd.sigma_iso), pd.c * pd.c});
  Reconstruction r;
  if (std::abs(A) <= zero_tol * scale) {
    if (std::abs(B) <= zero_tol * std::max(1.0, std::abs(2.0 * pd.c * pd.eta) + std::abs(pd.c0)))
      throw DomainError("degenerate projective data: sigma = c^2 and 2 c eta - c0 = 0");
    r.kind = ReconstructionCase::Kropina;
    r.F = C / B;
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) throw DomainError("negative discriminant in the quadratic for F");
    r.kind = ReconstructionCase::Randers;
    r.F = (std::sqrt(disc) + B) / (2.0 * A);
  }
  if (!(r.F > 0.0)) throw DomainError("reconstructed F is not positive (" + std::to_string(r.F) + ")");
  r.residual = t1_residual(pd, r.F);
  return r;
}

}  // namespace finsler
