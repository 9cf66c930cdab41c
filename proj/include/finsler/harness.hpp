#pragma once

// Scenario runner: randomized metric families, domain-aware samplers, the
// registered scenarios and their JSON reports.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/alpha_beta.hpp"
#include "finsler/catalog.hpp"
#include "finsler/checkers.hpp"
#include "finsler/core.hpp"
#include "finsler/errors.hpp"
#include "finsler/fd_audit.hpp"
#include "finsler/metric.hpp"
#include "finsler/volume.hpp"

namespace finsler {

class SamplerExhausted : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kGeneratorName = "mt19937_64";

// -- sampling ----------------------------------------------------------------

struct SamplerOptions {
  double half_width = kDefaultBoxHalfWidth;
  std::optional<double> ball_radius;  // sample x in a Euclidean ball instead of the box
  double kropina_min_ratio = 0.1;     // beta >= ratio * alpha inside the cone
};

inline std::optional<TangentSample> try_sample(const MetricSpec& m, std::mt19937_64& rng, const SamplerOptions& o) {
  const int n = m.dim();
  const double r = o.ball_radius.value_or(o.half_width);
  std::uniform_real_distribution<double> box(-r, r);
  std::normal_distribution<double> gauss;
  TangentSample s;
  s.x.resize(n);
  s.y.resize(n);
  for (auto& v : s.x) v = box(rng);
  for (auto& v : s.y) v = gauss(rng);
  if (o.ball_radius) {
    double q = 0.0;
    for (double v : s.x) q += v * v;
    if (q >= r * r) return std::nullopt;
  }
  try {
    m.check_sample(s.x, s.y);
    if (m.structure() == Structure::Kropina) {
      const double a2 = m.alpha_squared<double>(s.x, s.y);
      const double b = m.beta_value<double>(s.x, s.y);
      if (b < o.kropina_min_ratio * std::sqrt(a2)) return std::nullopt;
    }
    if (!(m.F(s.x, s.y) > 0.0)) return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
  return s;
}

/// `count` domain-valid samples; gives up after 100 attempts per sample.
inline std::vector<TangentSample> draw_samples(const MetricSpec& m, std::mt19937_64& rng, int count,
                                               const SamplerOptions& o = {}) {
  std::vector<TangentSample> out;
  const long budget = 100L * std::max(count, 1);
  for (long attempt = 0; attempt < budget && static_cast<int>(out.size()) < count; ++attempt)
    if (auto s = try_sample(m, rng, o)) out.push_back(std::move(*s));
  if (static_cast<int>(out.size()) < count)
    throw SamplerExhausted("could not find " + std::to_string(count) + " valid samples for '" + m.name() +
                           "' after " + std::to_string(budget) + " attempts");
  return out;
}

/// Volume used when a scenario has no reason to prefer another: the closed
/// form where one exists, quadrature for general metrics in dimension 2
/// and 3, and a constant density otherwise (x-independent metrics only).
inline VolumeSpec default_volume(const MetricSpec& m) {
  VolumeSpec v = VolumeSpec::closed_form_for(m);
  if (v.kind == VolumeSpec::Kind::BusemannHausdorff && m.dim() != 2 && m.dim() != 3)
    return VolumeSpec::constant_density(1.0);
  return v;
}

// -- random metric families ---------------------------------------------------

enum class Family { Randers, Kropina };

namespace harness_detail {

inline std::vector<std::vector<double>> box_grid(int n, int per_axis, double half_width) {
  std::vector<std::vector<double>> pts;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= per_axis;
  for (int k = 0; k < total; ++k) {
    std::vector<double> x(n);
    int r = k;
    for (int i = 0; i < n; ++i) {
      x[i] = half_width * (2.0 * (r % per_axis) / (per_axis - 1) - 1.0);
      r /= per_axis;
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

inline std::string affine(double c, const std::vector<double>& lin) {
  std::string e = catalog_detail::num(c);
  for (std::size_t k = 0; k < lin.size(); ++k)
    if (lin[k] != 0.0) e += " + " + catalog_detail::num(lin[k]) + "*" + catalog_detail::xv(static_cast<int>(k));
  return e;
}

inline RiemannianSpec random_alpha(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  RiemannianSpec a(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::string e = i == j ? "1" : "0";
      for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) e += " + " + catalog_detail::num(u(rng)) + "*" + catalog_detail::xv(k) + "*" + catalog_detail::xv(l);
      a.set(i, j, parse(e));
    }
  return a;
}

/// max and min of b^2 over a 5^n grid of the sampling box, with alpha PD.
inline std::pair<double, double> b2_range(const RiemannianSpec& a, const OneFormSpec& b) {
  double lo = 1e300, hi = 0.0;
  const int n = a.dim();
  for (const auto& x : box_grid(n, 5, kDefaultBoxHalfWidth)) {
    Eigen::MatrixXd A = a.matrix(x);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) return {1e300, 0.0};
    auto bv = b.evaluate_at<double>(std::span<const double>(x));
    Eigen::VectorXd bb = Eigen::Map<Eigen::VectorXd>(bv.data(), n);
    const double q = bb.dot(llt.solve(bb));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  return {hi, lo};
}

}  // namespace harness_detail

/// a = delta + quadratic perturbation (coefficients <= 0.1); b affine.
/// Randers: b rescaled so b^2 <= 0.45 on the box. Kropina: b(0) a unit
/// vector, b^2 kept in [0.3, 3] on the box.
inline MetricSpec random_metric(Family family, int dim, std::uint64_t seed) {
  if (dim < 2 || dim > 3) throw SpecError("random_metric supports dimension 2 and 3");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(family), static_cast<std::uint32_t>(dim)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::string tag = std::string(family == Family::Randers ? "random-randers" : "random-kropina") +
                          std::to_string(dim) + "-" + std::to_string(seed);
  for (int attempt = 0; attempt < 32; ++attempt) {
    RiemannianSpec a = harness_detail::random_alpha(dim, rng);
    std::vector<double> c(dim);
    std::vector<std::vector<double>> L(dim, std::vector<double>(dim));
    if (family == Family::Randers) {
      for (auto& v : c) v = 0.4 * u(rng);
    } else {
      double q = 0.0;
      for (auto& v : c) q += (v = u(rng)) * v;
      if (q < 0.05) continue;
      for (auto& v : c) v /= std::sqrt(q);
    }
    for (auto& row : L)
      for (auto& v : row) v = 0.4 * u(rng);

    auto build = [&](double scale) {
      OneFormSpec b{dim, {}};
      for (int i = 0; i < dim; ++i) {
        std::vector<double> lin(dim);
        for (int k = 0; k < dim; ++k) lin[k] = scale * L[i][k];
        b.b.push_back(parse(harness_detail::affine(scale * c[i], lin)));
      }
      return b;
    };
    OneFormSpec b = build(1.0);
    auto [hi, lo] = harness_detail::b2_range(a, b);
    if (hi >= 1e300) continue;
    try {
      if (family == Family::Randers) {
        if (hi > 0.45) b = build(std::sqrt(0.45 / hi));
        return MetricSpec::randers(std::move(a), std::move(b), tag);
      }
      if (lo < 0.3 || hi > 3.0) continue;
      return MetricSpec::kropina(std::move(a), std::move(b), tag);
    } catch (const SpecError&) {
      continue;
    }
  }
  throw SpecError("random_metric: no admissible metric after 32 attempts");
}

/// Kropina metric with a conformal 1-form: alpha = e^{2 phi} delta and
/// b_i = e^{2 phi} V_i with V a conformal vector field of the flat metric
/// (translation + dilation + rotation + special conformal part). Conformal
/// vector fields survive conformal changes of the metric, so beta stays
/// conformal for alpha.
inline MetricSpec random_conformal_kropina(int dim, std::uint64_t seed, bool warped = true) {
  using catalog_detail::num;
  using catalog_detail::xv;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 7u,
                    static_cast<std::uint32_t>(dim)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(dim), v(dim);
  for (auto& t : c) t = 0.3 * u(rng);
  c[0] = 1.0;
  for (auto& t : v) t = 0.3 * u(rng);
  const double k = 0.5 * u(rng);
  std::vector<std::vector<double>> A(dim, std::vector<double>(dim, 0.0));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) A[j][i] = -(A[i][j] = 0.4 * u(rng));
  const std::string phi =
      warped ? "(" + num(0.2 * u(rng)) + "*x1 + " + num(0.2 * u(rng)) + "*x2*x2)" : std::string("0");
  std::string r2 = "0", vx = "0";
  for (int i = 0; i < dim; ++i) {
    r2 += " + " + xv(i) + "^2";
    vx += " + " + num(v[i]) + "*" + xv(i);
  }
  RiemannianSpec a(dim);
  OneFormSpec b{dim, {}};
  for (int i = 0; i < dim; ++i) {
    a.set(i, i, parse("exp(2*" + phi + ")"));
    std::string e = num(c[i]) + " + " + num(k) + "*" + xv(i);
    for (int j = 0; j < dim; ++j)
      if (A[i][j] != 0.0) e += " + " + num(A[i][j]) + "*" + xv(j);
    e += " + 2*(" + vx + ")*" + xv(i) + " - (" + r2 + ")*" + num(v[i]);
    b.b.push_back(parse("exp(2*" + phi + ")*(" + e + ")"));
  }
  return MetricSpec::kropina(std::move(a), std::move(b), "conformal-kropina" + std::to_string(dim) + "-" +
                                                             std::to_string(seed));
}

/// Kropina metric on Euclidean alpha with a random constant b.
inline MetricSpec random_constant_kropina(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + dim);
  std::uniform_real_distribution<double> u(0.3, 1.2);
  std::vector<double> b(dim);
  for (auto& v : b) v = u(rng);
  return constant_kropina_metric(b);
}

// -- checks and reports -------------------------------------------------------

struct CheckResult {
  std::string name;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double tol = 0.0;
  double floor = 0.0;
  bool pass = true;
  bool informational = false;  // reported, never part of the verdict
  long count = 0;

  /// pass iff |residual| <= max(tol * scale, floor)
  void add(double residual, double scale) {
    const double a = std::abs(residual);
    max_abs = std::max(max_abs, a);
    if (scale > 0.0) max_rel = std::max(max_rel, a / scale);
    if (!(a <= std::max(tol * scale, floor))) pass = false;
    ++count;
  }
  void require(bool ok) { add(ok ? 0.0 : 1.0, 1.0); }
};

struct VerificationReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::string generator = kGeneratorName;
  int samples = 0;
  std::vector<CheckResult> checks;
  double elapsed_ms = 0.0;
  std::string error;

  bool pass() const {
    if (!error.empty()) return false;
    for (const auto& c : checks)
      if (!c.informational && !c.pass) return false;
    return true;
  }

  nlohmann::ordered_json to_json(bool with_time = true) const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["generator"] = generator;
    j["samples"] = samples;
    j["pass"] = pass();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json cj;
      cj["name"] = c.name;
      cj["max_abs"] = c.max_abs;
      cj["max_rel"] = c.max_rel;
      cj["tol"] = c.tol;
      cj["pass"] = c.pass;
      if (c.informational) cj["informational"] = true;
      arr.push_back(std::move(cj));
    }
    j["checks"] = std::move(arr);
    if (!error.empty()) j["error"] = error;
    if (with_time) j["elapsed_ms"] = elapsed_ms;
    return j;
  }
};

/// State handed to a scenario body.
class ScenarioRun {
 public:
  ScenarioRun(std::uint64_t seed, int samples, std::optional<double> tol) : rng(seed), samples(samples), tol_(tol) {}

  std::mt19937_64 rng;
  int samples;

  /// A named check; `default_tol` is replaced by --tol when given unless
  /// the check is pinned.
  CheckResult& check(const std::string& name, double default_tol, double floor = kAbsoluteFloor, bool pinned = false) {
    auto it = index_.find(name);
    if (it != index_.end()) return checks_[it->second];
    CheckResult c;
    c.name = name;
    c.tol = (!pinned && tol_) ? *tol_ : default_tol;
    c.floor = floor;
    index_[name] = checks_.size();
    checks_.push_back(std::move(c));
    return checks_.back();
  }
  CheckResult& info(const std::string& name, double tol) {
    CheckResult& c = check(name, tol, 0.0, true);
    c.informational = true;
    return c;
  }
  std::uint64_t next_seed() { return rng(); }
  std::vector<CheckResult> take() { return {checks_.begin(), checks_.end()}; }

 private:
  std::optional<double> tol_;
  std::deque<CheckResult> checks_;  // references handed out stay valid
  std::map<std::string, std::size_t> index_;
};

struct Scenario {
  std::string name;
  std::string description;
  int default_samples = 50;
  std::function<void(ScenarioRun&)> body;
};

namespace scen {

inline Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double rel_scale(std::initializer_list<double> terms) { return max_abs_of(terms); }

inline PipelineOptions alpha_ref(const MetricSpec& m, VolumeSpec vol) { return {vol, ReferenceVolume{}}; }

/// funk2 identities on the unit ball.
inline void funk_inequality(ScenarioRun& run) {
  const MetricSpec m = builtin_metric("funk2");
  SamplerOptions so;
  so.ball_radius = 0.9;
  auto& formula = run.check("wpric-minus-ric-formula", 1e-6);
  auto& ineq = run.check("wpric-le-ric", 0.0, 1e-9, true);
  for (const auto& s : draw_samples(m, run.rng, run.samples, so)) {
    auto B = compute_bundle(m, s, alpha_ref(m, VolumeSpec::busemann_hausdorff()));
    const double a = std::sqrt(m.alpha_squared<double>(s.x, s.y)), b = m.beta_value<double>(s.x, s.y);
    const double expect = (b - a) * (3.0 * a + b) / 4.0;
    formula.add(B.WPRic0 - B.Ric - expect, B.F * B.F);
    ineq.add(std::max(B.WPRic0 - B.Ric, 0.0), 1.0);
  }
}

inline void funk_s_curvature(ScenarioRun& run) {
  SamplerOptions so;
  so.ball_radius = 0.9;
  for (int n : {2, 3}) {
    const MetricSpec m = funk_metric(n);
    auto& c = run.check("S-equals-(n+1)F/2-n" + std::to_string(n), 1e-6);
    const int count = n == 2 ? run.samples : std::max(1, run.samples / 5);
    for (const auto& s : draw_samples(m, run.rng, count, so)) {
      auto B = compute_bundle(m, s, {VolumeSpec::busemann_hausdorff(), std::nullopt});
      c.add(B.S - (n + 1.0) / 2.0 * B.F, B.F);
    }
  }
}

inline void riemannian_s_zero(ScenarioRun& run) {
  std::vector<MetricSpec> ms = {builtin_metric("exp-warped"), builtin_metric("klein2"),
                                random_metric(Family::Randers, 3, run.next_seed()).alpha_metric()};
  auto& sz = run.check("S-zero", 1e-8, 0.0, true);
  auto& wp = run.check("sfrak-zero-implies-wpric-eq-ric", 0.0, 1e-10, true);
  auto& pr = run.check("pric-eq-ric", 1e-8, 0.0, true);
  const int per = std::max(1, run.samples / static_cast<int>(ms.size()));
  for (const auto& m : ms)
    for (const auto& s : draw_samples(m, run.rng, per)) {
      auto B = compute_bundle(m, s, {VolumeSpec::riemannian_density(), std::nullopt});
      sz.add(B.S, B.F);
      wp.add(B.WPRic0 - B.Ric, 1.0);
      pr.add(B.PRic - B.Ric, std::max(1.0, std::abs(B.Ric)));
    }
}

inline double vec_scale(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::max(a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>());
}

/// Dual-pipeline comparison on random Randers or Kropina metrics.
inline void oracle(ScenarioRun& run, Family fam) {
  auto& spray = run.check("spray", 1e-6);
  auto& ric = run.check("ric", 1e-6);
  auto& S = run.check("S", 1e-6);
  auto& sf = run.check("sfrak", 1e-6);
  auto& sfh = run.check("sfrak-horizontal", 1e-6);
  auto& wp = run.check("wpric", 1e-6);
  CheckResult* printed_sfh = nullptr;
  CheckResult* printed_wk = nullptr;
  if (fam == Family::Kropina) {
    printed_sfh = &run.info("printed-sfrak-horizontal-discrepancy", 1e-6);
    printed_wk = &run.info("printed-wpric-expansion-discrepancy", 1e-6);
  }
  const int per_metric = 5;
  const int metrics = std::max(1, (run.samples + per_metric - 1) / per_metric);
  int done = 0;
  for (int k = 0; k < metrics; ++k) {
    const int n = 2 + k % 2;
    const MetricSpec m = random_metric(fam, n, run.next_seed());
    const int count = std::min(per_metric, run.samples - done);
    if (count <= 0) break;
    for (const auto& s : draw_samples(m, run.rng, count)) {
      auto B = compute_bundle(m, s, alpha_ref(m, VolumeSpec::closed_form_for(m)));
      AlphaBetaFrame f = build_frame(m, s.x);
      Eigen::VectorXd y = vec(s.y);
      const bool R = fam == Family::Randers;
      Eigen::VectorXd G = R ? randers_spray(f, y) : kropina_spray(f, y);
      spray.add((G - B.G).lpNorm<Eigen::Infinity>(), vec_scale(G, B.G));
      const double ric_c = R ? randers_ricci(f, y) : kropina_ricci(f, y);
      ric.add(ric_c - B.Ric, rel_scale({ric_c, B.Ric}));
      const double S_c = R ? randers_s_curvature(f, y) : kropina_s_curvature(f, y);
      S.add(S_c - B.S, rel_scale({S_c, B.S, B.F}));
      const double sf_c = R ? randers_sfrak(f, y) : kropina_sfrak(f, y);
      sf.add(sf_c - B.Sfrak, rel_scale({sf_c, B.Sfrak, B.F}));
      const double sfh_c = R ? (n - 1.0) * randers_sfrak_horizontal(f, y) : kropina_sfrak_horizontal(f, y);
      const double sfh_g = (n - 1.0) * B.Sfrak_h;
      sfh.add(sfh_c - sfh_g, rel_scale({sfh_c, sfh_g, B.F * B.F}));
      const double w_c = R ? randers_wpric(f, y) : kropina_wpric(f, y);
      wp.add(w_c - B.WPRic0, rel_scale({w_c, B.WPRic0, B.Ric}));
      if (!R) {
        const double p = kropina_sfrak_horizontal_printed(f, y);
        printed_sfh->add(p - sfh_g, rel_scale({p, sfh_g, B.F * B.F}));
        const double pw = kropina_wpric_printed_expansion(f, y);
        printed_wk->add(pw - B.WPRic0, rel_scale({pw, B.WPRic0, B.Ric}));
      }
      ++done;
    }
  }
}

inline void closed_beta_wpric(ScenarioRun& run) {
  auto& gen = run.check("wpric-eq-ric-bar", 1e-6);
  auto& cf = run.check("closed-form-wpric-eq-ric-bar", 1e-6);
  for (const char* name : {"closed-beta", "funk2"}) {
    const MetricSpec m = builtin_metric(name);
    const MetricSpec alpha = m.alpha_metric();
    SamplerOptions so;
    if (std::string(name) == "funk2") so.ball_radius = 0.9;
    for (const auto& s : draw_samples(m, run.rng, std::max(1, run.samples / 2), so)) {
      auto B = compute_bundle(m, s, alpha_ref(m, VolumeSpec::closed_form_for(m)));
      const double ric_bar = ricci(alpha, s);
      gen.add(B.WPRic0 - ric_bar, rel_scale({B.WPRic0, ric_bar}));
      AlphaBetaFrame f = build_frame(m, s.x);
      const double w = randers_wpric(f, vec(s.y));
      cf.add(w - ric_bar, rel_scale({w, ric_bar}));
    }
  }
}

/// Generic |WPRic_0| over the checker grid (alpha-normalized directions).
inline double generic_wpric_on_grid(const MetricSpec& m, const CheckGrid& grid) {
  double worst = 0.0;
  const bool kropina = m.structure() == Structure::Kropina;
  PipelineOptions opt{VolumeSpec::closed_form_for(m), ReferenceVolume{}};
  for (const auto& x : grid.points) {
    AlphaBetaFrame f = build_frame(m, x);
    for (const auto& d : grid.directions) {
      auto y = check_detail::admissible_direction(f, d, kropina);
      if (!y) continue;
      worst = std::max(worst, std::abs(compute_bundle(m, {x, check_detail::as_std(*y)}, opt).WPRic0));
    }
  }
  return worst;
}

inline void randers_flat_positive(ScenarioRun& run) {
  const MetricSpec m = builtin_metric("randers-const");
  CheckGrid grid = default_grid(m);
  auto rep = check_randers_wpric_flat(m, grid);
  run.check("verdict-true", 0.0, 0.0, true).require(rep.verdict);
  run.check("generic-wpric-zero", 0.0, 1e-9, true).add(generic_wpric_on_grid(m, grid), 1.0);
  const MetricSpec rot = builtin_metric("rotational");
  auto rv = check_reversible_wpric(rot, default_grid(rot));
  run.check("rotational-reversible", 0.0, 0.0, true).require(rv.formula_verdict && rv.direct_verdict);
}

inline void randers_flat_negative(ScenarioRun& run) {
  const MetricSpec m = builtin_metric("funk2");
  CheckGrid grid = default_grid(m);
  auto rep = check_randers_wpric_flat(m, grid);
  run.check("verdict-false", 0.0, 0.0, true).require(!rep.verdict);
  const MetricSpec alpha = m.alpha_metric();
  double ric_bar = 0.0;
  for (const auto& x : grid.points) {
    AlphaBetaFrame f = build_frame(m, x);
    for (const auto& d : grid.directions) {
      Eigen::VectorXd y = *check_detail::admissible_direction(f, d, false);
      ric_bar = std::max(ric_bar, std::abs(ricci(alpha, {x, check_detail::as_std(y)})));
    }
  }
  run.check("condition-i-residual-vs-ric-bar", 0.1, 0.0, true).add(rep.ric.max_abs - ric_bar, ric_bar);
  // random non-closed beta: formula and direct reversibility verdicts agree
  auto& agree = run.check("reversibility-verdicts-agree", 0.0, 0.0, true);
  for (int k = 0; k < 3; ++k) {
    const MetricSpec r = random_metric(Family::Randers, 2 + k % 2, run.next_seed());
    CheckGrid g = default_grid(r, 2, 8);
    agree.require(check_reversible_wpric(r, g).agree);
  }
}

inline void kropina_flat_positive(ScenarioRun& run) {
  const MetricSpec m = builtin_metric("kropina-const");
  CheckGrid grid = default_grid(m);
  auto rep = check_kropina_wpric_flat(m, grid);
  run.check("conformal-gate", 0.0, 0.0, true).require(rep.applicable);
  run.check("verdict-true", 0.0, 0.0, true).require(rep.verdict);
  run.check("generic-wpric-zero", 0.0, 1e-9, true).add(generic_wpric_on_grid(m, grid), 1.0);
}

/// Checker verdict against the generic pipeline on a mix of constant-b,
/// conformal and non-conformal Kropina metrics.
inline void kropina_flat_vs_generic(ScenarioRun& run) {
  const MetricSpec m = builtin_metric("kropina-funk-alpha");
  CheckGrid grid = default_grid(m);
  auto rep = check_kropina_wpric_flat(m, grid);
  run.check("funk-alpha-verdict-false", 0.0, 0.0, true).require(!rep.verdict);
  run.check("funk-alpha-generic-nonzero", 0.0, 0.0, true).require(generic_wpric_on_grid(m, grid) > 1e-6);

  auto& match = run.check("verdict-matches-generic", 0.0, 0.0, true);
  const int cases = std::clamp(run.samples, 1, 20);
  for (int k = 0; k < cases; ++k) {
    const int n = 2 + k % 2;
    const std::uint64_t seed = run.next_seed();
    MetricSpec inst = k % 3 == 0   ? random_constant_kropina(n, seed)
                      : k % 3 == 1 ? random_conformal_kropina(n, seed, k % 2 == 0)
                                   : random_metric(Family::Kropina, n, seed);
    CheckGrid g = default_grid(inst, 4, 12);
    auto r = check_kropina_wpric_flat(inst, g);
    const bool flat = generic_wpric_on_grid(inst, g) <= 1e-7;
    match.require(r.verdict == flat);
  }
}

inline void kropina_isotropic_s(ScenarioRun& run) {
  auto& aon = run.check("all-or-none", 0.0, 0.0, true);
  auto& pos = run.check("conformal-all-hold", 0.0, 0.0, true);
  auto& neg = run.check("non-conformal-all-fail", 0.0, 0.0, true);
  auto hold = [](const IsotropicSReport& r) { return r.isotropic && r.conformal_r && r.s_zero && r.conformal_b; };
  auto none = [](const IsotropicSReport& r) { return !r.isotropic && !r.conformal_r && !r.s_zero && !r.conformal_b; };
  {
    auto r = check_isotropic_s_equivalences(builtin_metric("kropina-const"), default_grid(builtin_metric("kropina-const")));
    aon.require(r.all_or_none);
    pos.require(hold(r));
  }
  const int cases = std::clamp(run.samples / 5, 1, 10);
  for (int k = 0; k < cases; ++k) {
    const int n = 2 + k % 2;
    MetricSpec c = random_conformal_kropina(n, run.next_seed(), k % 2 == 1);
    auto rc = check_isotropic_s_equivalences(c, default_grid(c, 4, 12));
    aon.require(rc.all_or_none);
    pos.require(hold(rc));
    MetricSpec nc = random_metric(Family::Kropina, n, run.next_seed());
    auto rn = check_isotropic_s_equivalences(nc, default_grid(nc, 4, 12));
    aon.require(rn.all_or_none);
    neg.require(none(rn));
  }
  auto rf = check_isotropic_s_equivalences(builtin_metric("kropina-funk-alpha"),
                                           default_grid(builtin_metric("kropina-funk-alpha")));
  aon.require(rf.all_or_none);
  neg.require(none(rf));
}

inline void quartic_root_flat(ScenarioRun& run) {
  auto& ric = run.check("ric-zero", 0.0, 1e-8, true);
  auto& S = run.check("S-zero", 0.0, 1e-8, true);
  auto& pric = run.check("pric-zero", 0.0, 1e-8, true);
  for (const char* name : {"quartic", "quartic22"}) {
    const MetricSpec m = builtin_metric(name);
    const int count = m.dim() == 2 ? run.samples : std::max(1, run.samples / 5);
    for (const auto& s : draw_samples(m, run.rng, count)) {
      auto B = compute_bundle(m, s, {default_volume(m), std::nullopt});
      ric.add(B.Ric, 1.0);
      S.add(B.S, 1.0);
      pric.add(B.PRic, 1.0);
    }
  }
}

inline void bao_shen_s_zero(ScenarioRun& run) {
  const MetricSpec m = builtin_metric("bao-shen");
  auto& S = run.check("S-zero", 1e-7, 0.0, true);
  for (const auto& s : draw_samples(m, run.rng, std::max(1, run.samples / 2))) {
    auto B = compute_bundle(m, s, {VolumeSpec::busemann_hausdorff(), std::nullopt});
    S.add(B.S, B.F);
  }
}

inline void cs_randers_formulas(ScenarioRun& run) {
  auto& S = run.check("S-isotropic", 1e-5);
  auto& ric = run.check("ric-formula", 1e-5);
  auto& pric = run.check("pric-formula", 1e-5);
  auto& we = run.check("weakly-einstein", 1e-5);
  for (const std::vector<double>& avec : {std::vector<double>{0.1, 0.0}, std::vector<double>{0.1, 0.0, 0.0}}) {
    const int n = static_cast<int>(avec.size());
    const MetricSpec m = cs_randers_metric(avec);
    Eigen::VectorXd a = vec(avec);
    WeaklyEinsteinSpec wes;
    std::string kappa = "3*(" + catalog_detail::dot(avec, catalog_detail::xv) + ")^2 - 2*" +
                        catalog_detail::num(a.squaredNorm()) + "*(" + catalog_detail::sum_of_squares(n, catalog_detail::xv) + ")";
    wes.kappa = parse(kappa);
    wes.theta_we.dim = n;
    for (double v : avec) wes.theta_we.b.push_back(parse(catalog_detail::num(v)));
    const int count = n == 2 ? run.samples : std::max(1, run.samples / 5);
    for (const auto& s : draw_samples(m, run.rng, count)) {
      auto B = compute_bundle(m, s, {VolumeSpec::busemann_hausdorff(), std::nullopt});
      Eigen::VectorXd x = vec(s.x), y = vec(s.y);
      const double c = a.dot(x), c0 = a.dot(y), rho = 3.0 * c * c - 2.0 * a.squaredNorm() * x.squaredNorm();
      const double F = B.F;
      const double S_e = (n + 1.0) * c * F;
      S.add(B.S - S_e, rel_scale({B.S, S_e, 1e-3 * F}));
      const double ric_e = (n - 1.0) * (3.0 * c0 * F + rho * F * F);
      ric.add(B.Ric - ric_e, rel_scale({B.Ric, (n - 1.0) * 3.0 * c0 * F, (n - 1.0) * rho * F * F}));
      const double pric_e = (n - 1.0) * (4.0 * c0 + (rho + c * c) * F) * F;
      pric.add(B.PRic - pric_e, rel_scale({B.PRic, (n - 1.0) * 4.0 * c0 * F, (n - 1.0) * (rho + c * c) * F * F}));
      we.add(weakly_einstein_residual(m, wes, s), rel_scale({B.Ric, (n - 1.0) * 3.0 * c0 * F, (n - 1.0) * rho * F * F}));
    }
  }
}

inline void projflat(ScenarioRun& run) {
  auto& flat = run.check("projectively-flat", 0.0, 0.0, true);
  auto& r1 = run.check("ric-eq-(n-1)(P^2-P0)", 1e-6);
  auto& half = run.check("funk-P-eq-F/2", 1e-6);
  SamplerOptions so;
  so.ball_radius = 0.9;
  for (const char* name : {"funk2", "funk3", "klein2"}) {
    const MetricSpec m = builtin_metric(name);
    const int count = m.dim() == 2 ? run.samples : std::max(1, run.samples / 5);
    for (const auto& s : draw_samples(m, run.rng, count, so)) {
      auto pf = extract_projective_factor(m, s);
      flat.require(pf.flat);
      const double ric = ricci(m, s);
      ProjectiveData pd;
      pd.P = pf.P;
      pd.P0 = pf.P0;
      const double n1 = m.dim() - 1.0;
      r1.add(ric - projectively_flat_ricci(pd, m.dim()), rel_scale({ric, n1 * pf.P * pf.P, n1 * pf.P0}));
      if (m.kind() == MetricKind::Funk) {
        const double F = m.F(s.x, s.y);
        half.add(pf.P - 0.5 * F, F);
      }
    }
  }
}

/// Admissible projective data with a known positive root.
inline ProjectiveData random_projective_data(std::mt19937_64& rng, bool kropina_case) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.2, 2.0);
  for (;;) {
    ProjectiveData pd;
    pd.P = u(rng);
    pd.c = u(rng);
    pd.c0 = u(rng);
    pd.eta = u(rng);
    pd.eta0 = u(rng);
    const double F = pos(rng);
    const double A = kropina_case ? 0.0 : u(rng);
    pd.sigma_iso = pd.c * pd.c + A;
    const double B = 2.0 * pd.c * pd.eta - pd.c0;
    if (std::abs(B) < 0.05 && kropina_case) continue;
    if (!kropina_case && std::abs(A) < 0.05) continue;
    const double C = B * F - A * F * F;
    pd.P0 = C + pd.P * pd.P + pd.eta * pd.eta + pd.eta0;
    if (!kropina_case) {
      const double disc = B * B - 4.0 * A * C;
      if (disc < 0.0 || (std::sqrt(disc) + B) / (2.0 * A) <= 0.0) continue;
    }
    return pd;
  }
}

inline void reconstruct_t1(ScenarioRun& run) {
  auto& res = run.check("T1-residual", 0.0, 1e-10, true);
  auto& cases = run.check("case-tag", 0.0, 0.0, true);
  for (int k = 0; k < run.samples; ++k) {
    const bool kro = k % 2 == 0;
    ProjectiveData pd = random_projective_data(run.rng, kro);
    auto r = reconstruct_metric_from_projective_data(pd);
    res.add(r.residual, 1.0);
    cases.require((r.kind == ReconstructionCase::Kropina) == kro);
  }
}

/// Jet derivatives of F^2 and of the spray against finite differences, and
/// the homogeneity ladder, on every catalog metric.
inline void jet_vs_fd(ScenarioRun& run) {
  auto& f2 = run.check("F2-derivatives", 1e-5, 0.0, true);
  auto& gd = run.check("spray-derivatives", 1e-5, 0.0, true);
  auto& hom = run.check("homogeneity", 1e-9, 0.0, true);
  const int per = std::max(1, run.samples / 10);
  for (const auto& entry : catalog_entries()) {
    const MetricSpec m = entry.make();
    const int n = m.dim(), nv = 2 * n;
    SamplerOptions so;
    if (m.kind() == MetricKind::Funk) so.ball_radius = 0.9;
    for (const auto& s : draw_samples(m, run.rng, per, so)) {
      std::vector<double> p(s.x);
      p.insert(p.end(), s.y.begin(), s.y.end());
      SprayContext ctx(m, s);
      const double F2v = ctx.F2().value();
      ScalarField F2f = [&](std::span<const double> q) {
        return m.F2<double>(q.subspan(0, n), q.subspan(n, n));
      };
      for (int v = 0; v < nv; ++v)
        for (int w = -1; w <= v; ++w) {
          MultiIndex k{};
          k[v] += 1;
          if (w >= 0) k[w] += 1;
          const double jet = extract_derivative(ctx.F2(), k);
          f2.add(finite_difference_audit(F2f, p, k) - jet, std::max(std::abs(jet), F2v));
        }
      // dG/dx, dG/dy, d2G/dx dy, d2G/dy dy: what the Riemann curvature uses
      for (int i = 0; i < n; ++i) {
        ScalarField Gi = [&, i](std::span<const double> q) {
          TangentSample t{{q.begin(), q.begin() + n}, {q.begin() + n, q.end()}};
          return SprayContext(m, t, 1e12, 2).spray()(i);
        };
        for (int v = 0; v < nv; ++v)
          for (int w = -1; w < nv; ++w) {
            if (w >= 0 && (w < n || w > v)) continue;  // second order: y in the second slot only
            MultiIndex k{};
            k[v] += 1;
            if (w >= 0) k[w] += 1;
            const double jet = extract_derivative(ctx.G(i), k);
            gd.add(finite_difference_audit(Gi, p, k) - jet, std::max(std::abs(jet), F2v));
          }
      }
      // homogeneity ladder, lambda = 2
      TangentSample s2 = s;
      for (auto& v : s2.y) v *= 2.0;
      const VolumeSpec vol = default_volume(m);
      auto B1 = compute_bundle(m, s, {vol, std::nullopt});
      auto B2 = compute_bundle(m, s2, {vol, std::nullopt});
      const double F = B1.F;
      hom.add(B2.F - 2.0 * B1.F, F);
      hom.add((B2.G - 4.0 * B1.G).lpNorm<Eigen::Infinity>(), std::max(B1.G.lpNorm<Eigen::Infinity>(), 1e-3 * F * F));
      hom.add((B2.R - 4.0 * B1.R).lpNorm<Eigen::Infinity>(), std::max(B1.R.lpNorm<Eigen::Infinity>(), 1e-3 * F * F));
      hom.add(B2.Ric - 4.0 * B1.Ric, std::max(std::abs(B1.Ric), 1e-3 * F * F));
      hom.add(B2.S - 2.0 * B1.S, std::max(std::abs(B1.S), 1e-3 * F));
      hom.add(B2.Sfrak - 2.0 * B1.Sfrak, std::max(std::abs(B1.Sfrak), 1e-3 * F));
      hom.add(B2.WPRic0 - 4.0 * B1.WPRic0, std::max(std::abs(B1.WPRic0), 1e-3 * F * F));
    }
  }
}

inline void volume_closed_vs_quadrature(ScenarioRun& run) {
  auto& c2 = run.check("n2", 1e-6, 0.0, true);
  auto& c3 = run.check("n3", 1e-5, 0.0, true);
  auto compare = [&](const MetricSpec& m, const std::vector<double>& x) {
    const double q = volume_density(m, VolumeSpec::busemann_hausdorff(), x);
    const double c = volume_density(m, VolumeSpec::closed_form_for(m), x);
    (m.dim() == 2 ? c2 : c3).add(q - c, c);
  };
  compare(MetricSpec::euclidean(2), {0.0, 0.0});
  compare(builtin_metric("randers-const"), {0.0, 0.0});
  compare(builtin_metric("kropina-const"), {0.0, 0.0});
  const int cases = std::max(1, run.samples / 10);
  for (int k = 0; k < cases; ++k)
    for (Family fam : {Family::Randers, Family::Kropina})
      for (int n : {2, 3}) {
        const MetricSpec m = random_metric(fam, n, run.next_seed());
        compare(m, draw_samples(m, run.rng, 1)[0].x);
      }
}

}  // namespace scen

inline const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> all = {
      {"funk-inequality", "funk2: WPRic_0 - Ric = (beta - alpha)(3 alpha + beta)/4 <= 0 (alpha reference)", 100,
       scen::funk_inequality},
      {"funk-s-curvature", "Funk metrics: S = (n+1) F / 2 with the Busemann-Hausdorff volume", 100,
       scen::funk_s_curvature},
      {"riemannian-s-zero", "Riemannian metrics with their own density: S = 0, PRic = WPRic_0 = Ric", 30,
       scen::riemannian_s_zero},
      {"randers-oracle", "random Randers metrics: generic vs closed-form spray, Ric, S, Sfrak, WPRic_0", 50,
       [](ScenarioRun& r) { scen::oracle(r, Family::Randers); }},
      {"kropina-oracle", "random Kropina metrics: generic vs closed-form spray, Ric (T), S, Sfrak_|0, WPRic_0", 50,
       [](ScenarioRun& r) { scen::oracle(r, Family::Kropina); }},
      {"closed-beta-wpric", "closed beta Randers: WPRic_0 = Ric of alpha", 30, scen::closed_beta_wpric},
      {"thm12-positive", "Randers flatness checker, constant b: verdict true, WPRic_0 = 0", 1, scen::randers_flat_positive},
      {"thm12-negative", "Randers flatness checker, funk2: verdict false, residual = Ric of alpha", 1,
       scen::randers_flat_negative},
      {"thm13-positive", "Kropina flatness checker, constant b: verdict true, WPRic_0 = 0", 1, scen::kropina_flat_positive},
      {"thm13-negative", "Kropina flatness checker vs generic WPRic_0 on seeded instances", 20,
       scen::kropina_flat_vs_generic},
      {"remark52-equivalences", "Kropina isotropic-S equivalences hold all-or-none", 20, scen::kropina_isotropic_s},
      {"example1-quartic", "4-th root metrics: Ric = S = PRic = 0", 20, scen::quartic_root_flat},
      {"example3-baoshen", "Bao-Shen metric: S = 0", 20, scen::bao_shen_s_zero},
      {"example4-cs", "isotropic-S Randers: S, Ric, PRic formulas and weakly-Einstein split", 30, scen::cs_randers_formulas},
      {"projflat-ricci", "projectively flat metrics: Ric = (n-1)(P^2 - P_0)", 50, scen::projflat},
      {"reconstruct-T1", "quadratic reconstruction of F from projective data", 200, scen::reconstruct_t1},
      {"jet-vs-fd", "jet derivatives vs finite differences, homogeneity ladder, every catalog metric", 20,
       scen::jet_vs_fd},
      {"volume-closed-vs-quadrature", "Busemann-Hausdorff quadrature vs closed-form densities", 20,
       scen::volume_closed_vs_quadrature},
  };
  return all;
}

inline const Scenario* find_scenario(const std::string& name) {
  for (const auto& s : scenarios())
    if (s.name == name) return &s;
  return nullptr;
}

inline VerificationReport run_scenario(const Scenario& sc, std::uint64_t seed, std::optional<int> samples = {},
                                       std::optional<double> tol = {}) {
  VerificationReport rep;
  rep.scenario = sc.name;
  rep.seed = seed;
  rep.samples = samples.value_or(sc.default_samples);
  ScenarioRun run(seed, rep.samples, tol);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    sc.body(run);
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  rep.checks = run.take();
  return rep;
}

/// Scenarios named by a suite: "all" or a single scenario name.
inline std::vector<const Scenario*> scenario_suite(const std::string& suite) {
  std::vector<const Scenario*> out;
  if (suite == "all") {
    for (const auto& s : scenarios()) out.push_back(&s);
  } else if (const Scenario* s = find_scenario(suite)) {
    out.push_back(s);
  } else {
    throw SpecError("unknown suite '" + suite + "'");
  }
  return out;
}

}  // namespace finsler
