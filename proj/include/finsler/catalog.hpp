#pragma once

// Named metric families. Each one is assembled from expression text so that
// the generic pipeline sees exactly the printed formula; numbers are printed
// with 17 significant digits so nothing is lost on the way.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/expr.hpp"
#include "finsler/metric.hpp"

namespace finsler {

namespace catalog_detail {

inline std::string num(double v) { return "(" + expr_detail::format_number(v) + ")"; }
inline std::string xv(int i) { return "x" + std::to_string(i + 1); }
inline std::string yv(int i) { return "y" + std::to_string(i + 1); }

inline std::string sum_of_squares(int n, std::string (*var)(int)) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? " + " : "") + var(i) + "^2";
  return "(" + s + ")";
}

inline std::string dot(const std::vector<double>& a, std::string (*var)(int)) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? " + " : "") + num(a[i]) + "*" + var(static_cast<int>(i));
  return "(" + s + ")";
}

}  // namespace catalog_detail

/// Funk metric on the unit ball of R^n, written as alpha + beta.
inline MetricSpec funk_metric(int n) {
  using namespace catalog_detail;
  if (n < 2 || n > 3) throw SpecError("Funk metric is provided for n = 2 or 3");
  const std::string r2 = sum_of_squares(n, xv);
  const std::string D = "(1 - " + r2 + ")";
  RiemannianSpec a(n);
  OneFormSpec b{n, {}};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::string num_ij = (i == j ? D + " + " + xv(i) + "^2" : xv(i) + "*" + xv(j));
      a.set(i, j, parse("(" + num_ij + ")/" + D + "^2"));
    }
    b.b.push_back(parse(xv(i) + "/" + D));
  }
  return MetricSpec::randers(std::move(a), std::move(b), "funk" + std::to_string(n))
      .tagged(MetricKind::Funk, "funk" + std::to_string(n), {{"n", n}});
}

/// The isotropic-S Randers family determined by a vector a with
/// D = 1 - |a|^2 |x|^4 and w = |x|^2 a - 2 <a,x> x:
/// alpha^2 = (D |y|^2 + <w,y>^2) / D^2, beta = -<w,y> / D.
/// With this sign S = (n+1) <a,x> F. Passing flip_beta = true gives
/// beta = +<w,y> / D, which is the same family with a replaced by -a.
inline MetricSpec cs_randers_metric(const std::vector<double>& avec, bool flip_beta = false) {
  using namespace catalog_detail;
  const int n = static_cast<int>(avec.size());
  if (n < 2 || n > 3) throw SpecError("CS Randers metric is provided for n = 2 or 3");
  double a2 = 0.0;
  for (double v : avec) a2 += v * v;
  // the sampling box reaches |x|^2 = n/4; keep D > 0 there with margin
  const double max_r2 = n * kDefaultBoxHalfWidth * kDefaultBoxHalfWidth;
  if (!(std::sqrt(a2) * max_r2 * max_r2 < 0.9))
    throw SpecError("|a| too large: CS Randers denominators must stay positive on the sampling box");
  const std::string r2 = sum_of_squares(n, xv);
  const std::string ax = dot(avec, xv);
  const std::string D = "(1 - " + num(a2) + "*" + r2 + "^2)";
  std::vector<std::string> w(n);
  for (int i = 0; i < n; ++i) w[i] = "(" + r2 + "*" + num(avec[i]) + " - 2*" + ax + "*" + xv(i) + ")";
  RiemannianSpec a(n);
  OneFormSpec b{n, {}};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      std::string top = (i == j ? D + " + " : "") + w[i] + "*" + w[j];
      a.set(i, j, parse("(" + top + ")/" + D + "^2"));
    }
    b.b.push_back(parse((flip_beta ? "" : "-") + w[i] + "/" + D));
  }
  std::vector<std::pair<std::string, double>> params;
  for (int i = 0; i < n; ++i) params.push_back({"a" + std::to_string(i + 1), avec[i]});
  return MetricSpec::randers(std::move(a), std::move(b), "cs-randers")
      .tagged(MetricKind::CSRanders, "cs-randers", std::move(params));
}

/// Bao-Shen Randers metrics of constant flag curvature on S^3 in the chart
/// (x, y, z) = (x1, x2, x3), tangent (u, v, w) = (y1, y2, y3). The constant
/// c of the printed formula is taken to be 1.
inline MetricSpec bao_shen_metric(double varrho, int sign = 1) {
  using namespace catalog_detail;
  if (!(varrho > 1.0)) throw SpecError("Bao-Shen metric requires varrho > 1, got " + std::to_string(varrho));
  if (sign != 1 && sign != -1) throw SpecError("Bao-Shen sign must be +1 or -1");
  // rows m_k with alpha^2 = (varrho (m1.y)^2 + (m2.y)^2 + (m3.y)^2) / (1 + |p|^2)^2
  const std::string m[3][3] = {{"1", "(-x3)", "x2"}, {"x3", "1", "(-x1)"}, {"(-x2)", "x1", "1"}};
  const double weight[3] = {varrho, 1.0, 1.0};
  const std::string den = "(1 + x1^2 + x2^2 + x3^2)";
  RiemannianSpec a(3);
  OneFormSpec b{3, {}};
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      std::string s;
      for (int k = 0; k < 3; ++k) s += (k ? " + " : "") + num(weight[k]) + "*" + m[k][i] + "*" + m[k][j];
      a.set(i, j, parse("(" + s + ")/" + den + "^2"));
    }
    b.b.push_back(parse(num(sign * std::sqrt(varrho - 1.0)) + "*" + m[0][i] + "/" + den));
  }
  return MetricSpec::randers(std::move(a), std::move(b), "bao-shen")
      .tagged(MetricKind::BaoShen, "bao-shen", {{"varrho", varrho}, {"sign", sign}});
}

/// Throws SpecError unless g = (1/2) Hess_y F^2 is positive definite at 64
/// directions over a few base points.
inline void check_strong_convexity(const MetricSpec& m) {
  const int n = m.dim();
  std::mt19937_64 rng(0xc0ffee);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> box(-kDefaultBoxHalfWidth, kDefaultBoxHalfWidth);
  for (int s = 0; s < 64; ++s) {
    std::vector<MultiJet> x, y;
    for (int i = 0; i < n; ++i) x.push_back(MultiJet::constant(n, 2, s % 8 == 0 ? 0.0 : box(rng)));
    for (int i = 0; i < n; ++i) y.push_back(MultiJet::variable(n, 2, i, gauss(rng)));
    MultiJet f2 = m.F2<MultiJet>(x, y);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        MultiIndex k{};
        k[i] += 1;
        k[j] += 1;
        g(i, j) = 0.5 * extract_derivative(f2, k);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 0.0))
      throw SpecError("metric '" + m.name() + "' is not strongly convex: fundamental tensor has eigenvalue " +
                      std::to_string(es.eigenvalues()(0)));
  }
}

/// 4-th root metric (alpha1^4 + 2c alpha1^2 alpha2^2 + alpha2^4)^(1/4) on
/// R^{n1} x R^{n2} with Euclidean factors.
inline MetricSpec quartic_root_metric(int n1, int n2, double c = 0.5) {
  using namespace catalog_detail;
  if (n1 < 1 || n2 < 1 || n1 + n2 > 4) throw SpecError("quartic-root metric needs n1, n2 >= 1 and n1 + n2 <= 4");
  if (!(c > -1.0)) throw SpecError("quartic-root coupling c must exceed -1 for F to be positive");
  std::string A1, A2;
  for (int i = 0; i < n1; ++i) A1 += (i ? " + " : "") + yv(i) + "^2";
  for (int i = 0; i < n2; ++i) A2 += (i ? " + " : "") + yv(n1 + i) + "^2";
  A1 = "(" + A1 + ")";
  A2 = "(" + A2 + ")";
  Expr F = parse("(" + A1 + "^2 + 2*" + num(c) + "*" + A1 + "*" + A2 + " + " + A2 + "^2)^0.25");
  auto m = MetricSpec::general(n1 + n2, std::move(F), "quartic-root")
               .tagged(MetricKind::QuarticRoot, "quartic-root", {{"n1", n1}, {"n2", n2}, {"c", c}});
  check_strong_convexity(m);
  return m;
}

/// Riemannian metric on R^2 with a11 = exp(2 x1), a22 = 1.
inline MetricSpec exp_warped_metric() {
  RiemannianSpec a(2);
  a.set(0, 0, parse("exp(2*x1)"));
  return MetricSpec::riemannian(std::move(a), "exp-warped");
}

/// Randers metric with Euclidean alpha and a closed beta = d(phi) with
/// phi = 0.2 x1^2 + 0.15 x1 x2 - 0.1 x2^2 + 0.1 x1.
inline MetricSpec closed_beta_randers_metric() {
  OneFormSpec b{2, {parse("0.4*x1 + 0.15*x2 + 0.1"), parse("0.15*x1 - 0.2*x2")}};
  return MetricSpec::randers(RiemannianSpec::identity(2), std::move(b), "closed-beta");
}

/// Randers metric with Euclidean alpha and the rotational 1-form
/// kappa (x2, -x1); d(beta) is a constant 2-form.
inline MetricSpec rotational_randers_metric(double kappa = 0.5) {
  OneFormSpec b{2, {parse(catalog_detail::num(kappa) + "*x2"), parse(catalog_detail::num(-kappa) + "*x1")}};
  return MetricSpec::randers(RiemannianSpec::identity(2), std::move(b), "rotational");
}

inline MetricSpec constant_randers_metric(std::vector<double> b = {0.5, 0.0}) {
  const int n = static_cast<int>(b.size());
  OneFormSpec beta{n, {}};
  for (double v : b) beta.b.push_back(Expr::lit(v));
  return MetricSpec::randers(RiemannianSpec::identity(n), std::move(beta), "randers-const");
}

inline MetricSpec constant_kropina_metric(std::vector<double> b = {1.0, 0.0}) {
  const int n = static_cast<int>(b.size());
  OneFormSpec beta{n, {}};
  for (double v : b) beta.b.push_back(Expr::lit(v));
  return MetricSpec::kropina(RiemannianSpec::identity(n), std::move(beta), "kropina-const");
}

/// Kropina metric built on the Riemannian part of the Funk metric with
/// beta = dx1 + 0.3 x2 dx1: non-flat alpha, non-conformal beta.
inline MetricSpec funk_alpha_kropina_metric() {
  MetricSpec f = funk_metric(2);
  OneFormSpec b{2, {parse("1 + 0.3*x2"), parse("0")}};
  return MetricSpec::kropina(*f.alpha(), std::move(b), "kropina-funk-alpha");
}

struct CatalogEntry {
  const char* name;
  const char* description;
  MetricSpec (*make)();
};

inline const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"euclidean2", "Euclidean metric on R^2", [] { return MetricSpec::euclidean(2); }},
      {"euclidean3", "Euclidean metric on R^3", [] { return MetricSpec::euclidean(3); }},
      {"funk2", "Funk metric on the unit disk", [] { return funk_metric(2); }},
      {"funk3", "Funk metric on the unit ball of R^3", [] { return funk_metric(3); }},
      {"klein2", "Riemannian part of funk2 (Klein-type metric)", [] { return funk_metric(2).alpha_metric(); }},
      {"quartic", "4-th root metric on R x R, c = 1/2", [] { return quartic_root_metric(1, 1, 0.5); }},
      {"quartic22", "4-th root metric on R^2 x R^2, c = 1/2", [] { return quartic_root_metric(2, 2, 0.5); }},
      {"bao-shen", "Bao-Shen Randers metric on S^3, varrho = 2", [] { return bao_shen_metric(2.0, 1); }},
      {"cs2", "isotropic-S Randers metric, a = (0.1, 0)", [] { return cs_randers_metric({0.1, 0.0}); }},
      {"cs3", "isotropic-S Randers metric, a = (0.1, 0, 0)", [] { return cs_randers_metric({0.1, 0.0, 0.0}); }},
      {"randers-const", "Euclidean alpha, constant b = (0.5, 0)", [] { return constant_randers_metric(); }},
      {"kropina-const", "Kropina metric, Euclidean alpha, b = (1, 0)", [] { return constant_kropina_metric(); }},
      {"kropina-funk-alpha", "Kropina metric on the Klein-type alpha, b = (1 + 0.3 x2, 0)",
       [] { return funk_alpha_kropina_metric(); }},
      {"closed-beta", "Randers metric, Euclidean alpha, beta exact", [] { return closed_beta_randers_metric(); }},
      {"rotational", "Randers metric, Euclidean alpha, beta = 0.5 (x2 dx1 - x1 dx2)",
       [] { return rotational_randers_metric(0.5); }},
      {"exp-warped", "Riemannian metric exp(2 x1) dx1^2 + dx2^2", [] { return exp_warped_metric(); }},
  };
  return entries;
}

inline MetricSpec builtin_metric(const std::string& name) {
  for (const auto& e : catalog_entries())
    if (name == e.name) return e.make();
  throw SpecError("unknown builtin metric '" + name + "'");
}

}  // namespace finsler
