#pragma once

// The generic pipeline: every invariant is computed from F^2 by jet
// differentiation alone, with no use of the metric's algebraic structure
// beyond evaluating F.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"
#include "finsler/volume.hpp"

namespace finsler {

struct TangentSample {
  std::vector<double> x;
  std::vector<double> y;
};

/// Reference density sigma_0 for the weighted invariants. Without a metric
/// the density is taken on the metric under study (so `alpha` is
/// {RiemannianDensity, nullopt} and `self` is the main volume choice).
struct ReferenceVolume {
  VolumeSpec vol = VolumeSpec::riemannian_density();
  std::optional<MetricSpec> metric;
};

struct PipelineOptions {
  VolumeSpec volume = VolumeSpec::busemann_hausdorff();
  std::optional<ReferenceVolume> reference;  // nullopt: same as `volume` (Sigma = 1)
  double max_condition = 1e12;
};

struct CurvatureBundle {
  int n = 0;
  double F = 0.0;
  Eigen::MatrixXd g, g_inv;
  Eigen::VectorXd G;
  Eigen::MatrixXd N;
  Eigen::MatrixXd R;
  double Ric = 0.0;
  double sigma_F = 0.0;
  double sigma_ref = 0.0;
  double tau = 0.0;
  double S = 0.0;
  double S_h = 0.0;      // S_{|k} y^k
  double Sigma = 1.0;    // sigma_F / sigma_ref
  double theta = 0.0;    // d ln Sigma applied to y
  double Sfrak = 0.0;
  double Sfrak_h = 0.0;  // Sfrak_{|k} y^k
  double PRic = 0.0;
  double WPRic0 = 0.0;
};

/// Lifted jets at one tangent sample and the spray built from them. All
/// jets live over 2n variables (x^1..x^n, y^1..y^n).
class SprayContext {
 public:
  /// `order` below 4 is only for callers that want G values alone (order 2).
  SprayContext(const MetricSpec& m, const TangentSample& s, double max_condition = 1e12, int order = kMaxJetOrder)
      : m_(m), s_(s) {
    n_ = m.dim();
    m.check_sample(s.x, s.y);
    const int nv = 2 * n_;
    for (int i = 0; i < n_; ++i) X_.push_back(MultiJet::variable(nv, order, i, s.x[i]));
    for (int i = 0; i < n_; ++i) Y_.push_back(MultiJet::variable(nv, order, n_ + i, s.y[i]));
    F2_ = m.F2<MultiJet>(X_, Y_);
    F_ = math::sqrt(F2_.value());
    if (!(F_ > 0.0)) throw DomainError("F vanishes at a nonzero tangent vector");

    g_.reserve(n_ * n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) g_.push_back(0.5 * derivative(derivative(F2_, yvar(i)), yvar(j)));
    check_fundamental_tensor(max_condition);
    g_inv_ = inverse(n_, g_);

    std::vector<MultiJet> A;
    for (int l = 0; l < n_; ++l) {
      MultiJet dyl = derivative(F2_, yvar(l));
      MultiJet a = -derivative(F2_, xvar(l));
      for (int k = 0; k < n_; ++k) a = a + derivative(dyl, xvar(k)) * Y_[k];
      A.push_back(a);
    }
    for (int i = 0; i < n_; ++i) {
      MultiJet gi = MultiJet::constant(nv, 2, 0.0);
      for (int l = 0; l < n_; ++l) gi = gi + g_inv_[i * n_ + l] * A[l];
      G_.push_back(0.25 * gi);
    }
  }

  int dim() const noexcept { return n_; }
  double F() const noexcept { return F_; }
  const MetricSpec& metric() const noexcept { return m_; }
  const TangentSample& sample() const noexcept { return s_; }
  int xvar(int i) const { return i; }
  int yvar(int i) const { return n_ + i; }
  std::span<const MultiJet> X() const { return X_; }
  std::span<const MultiJet> Y() const { return Y_; }
  const MultiJet& F2() const { return F2_; }
  const MultiJet& G(int i) const { return G_[i]; }
  const MultiJet& g(int i, int j) const { return g_[i * n_ + j]; }

  /// Value of d f / d v at the base point, for any variable v.
  static double d1(const MultiJet& f, int v) {
    MultiIndex k{};
    k.at(v) = 1;
    return extract_derivative(f, k);
  }
  static double d2(const MultiJet& f, int v, int w) {
    MultiIndex k{};
    k.at(v) += 1;
    k.at(w) += 1;
    return extract_derivative(f, k);
  }

  /// f_{|k} y^k = y^k df/dx^k - 2 G^m df/dy^m for a jet of order >= 1.
  double horizontal(const MultiJet& f) const {
    double h = 0.0;
    for (int k = 0; k < n_; ++k) h += s_.y[k] * d1(f, xvar(k)) - 2.0 * G_[k].value() * d1(f, yvar(k));
    return h;
  }

  /// A jet over the n x-variables re-expressed over all 2n variables.
  MultiJet lift_x_field(const MultiJet& f) const { return embed(f, 2 * n_, 0); }

  /// x-jets (n variables, order 2) for evaluating densities.
  std::vector<MultiJet> x_jets(int order = 2) const {
    std::vector<MultiJet> out;
    for (int i = 0; i < n_; ++i) out.push_back(MultiJet::variable(n_, order, i, s_.x[i]));
    return out;
  }

  Eigen::MatrixXd g_matrix() const { return values(g_); }
  Eigen::MatrixXd g_inv_matrix() const { return values(g_inv_); }

  Eigen::VectorXd spray() const {
    Eigen::VectorXd v(n_);
    for (int i = 0; i < n_; ++i) v(i) = G_[i].value();
    return v;
  }

  Eigen::MatrixXd connection() const {
    Eigen::MatrixXd N(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) N(i, j) = d1(G_[i], yvar(j));
    return N;
  }

  /// R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
  ///         - N^i_j N^j_k
  Eigen::MatrixXd riemann() const {
    Eigen::MatrixXd N = connection();
    Eigen::MatrixXd R(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        double r = 2.0 * d1(G_[i], xvar(k));
        for (int j = 0; j < n_; ++j) {
          r -= s_.y[j] * d2(G_[i], xvar(j), yvar(k));
          r += 2.0 * G_[j].value() * d2(G_[i], yvar(j), yvar(k));
          r -= N(i, j) * N(j, k);
        }
        R(i, k) = r;
      }
    return R;
  }

  /// ln sigma(x) as a 2n-variable jet of order 2.
  MultiJet log_density(const MetricSpec& m, const VolumeSpec& v) const {
    if (m.dim() != n_) throw SpecError("reference metric dimension differs from the metric's");
    auto xj = x_jets(2);
    MultiJet sigma = volume_density<MultiJet>(m, v, std::span<const MultiJet>(xj));
    return lift_x_field(math::log(sigma));
  }

  /// S as an order-1 jet: dG^m/dy^m - y^m d(ln sigma)/dx^m.
  MultiJet s_curvature_jet(const MultiJet& ln_sigma) const {
    MultiJet S = MultiJet::constant(2 * n_, 1, 0.0);
    for (int m = 0; m < n_; ++m) S = S + derivative(G_[m], yvar(m)) - Y_[m] * derivative(ln_sigma, xvar(m));
    return S;
  }

  /// y^m d/dx^m of an x-only jet, as an order-1 jet.
  MultiJet contract_dx(const MultiJet& f) const {
    MultiJet out = MultiJet::constant(2 * n_, 1, 0.0);
    for (int m = 0; m < n_; ++m) out = out + Y_[m] * derivative(f, xvar(m));
    return out;
  }

 private:
  Eigen::MatrixXd values(const std::vector<MultiJet>& v) const {
    Eigen::MatrixXd out(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) out(i, j) = v[i * n_ + j].value();
    return out;
  }

  void check_fundamental_tensor(double max_condition) const {
    Eigen::MatrixXd gm = values(g_);
    if (!gm.allFinite()) throw SingularEvaluation("non-finite fundamental tensor", 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gm, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(n_ - 1);
    if (!(lo > 0.0)) throw DegenerateTensor("fundamental tensor is not positive definite", lo);
    if (hi / lo > max_condition)
      throw DegenerateTensor("fundamental tensor condition number " + std::to_string(hi / lo) + " exceeds limit", lo);
  }

  const MetricSpec& m_;
  TangentSample s_;
  int n_ = 0;
  double F_ = 0.0;
  std::vector<MultiJet> X_, Y_;
  MultiJet F2_;
  std::vector<MultiJet> g_, g_inv_, G_;
};

/// Every generic invariant at one sample.
inline CurvatureBundle compute_bundle(const MetricSpec& m, const TangentSample& s, const PipelineOptions& opt = {}) {
  SprayContext ctx(m, s, opt.max_condition);
  const int n = ctx.dim();
  CurvatureBundle b;
  b.n = n;
  b.F = ctx.F();
  b.g = ctx.g_matrix();
  b.g_inv = ctx.g_inv_matrix();
  b.G = ctx.spray();
  b.N = ctx.connection();
  b.R = ctx.riemann();
  b.Ric = b.R.trace();

  MultiJet ln_sigma = ctx.log_density(m, opt.volume);
  MultiJet ln_ref = ln_sigma;
  if (opt.reference) ln_ref = ctx.log_density(opt.reference->metric ? *opt.reference->metric : m, opt.reference->vol);
  b.sigma_F = std::exp(ln_sigma.value());
  b.sigma_ref = std::exp(ln_ref.value());
  b.Sigma = b.sigma_F / b.sigma_ref;
  b.tau = 0.5 * std::log(b.g.determinant()) - ln_sigma.value();

  MultiJet S = ctx.s_curvature_jet(ln_sigma);
  MultiJet theta = ctx.contract_dx(ln_sigma - ln_ref);
  MultiJet Sfrak = (S + theta) / static_cast<double>(n + 1);
  b.S = S.value();
  b.theta = theta.value();
  b.Sfrak = Sfrak.value();
  b.S_h = ctx.horizontal(S);
  b.Sfrak_h = ctx.horizontal(Sfrak);
  const double n1 = n + 1.0;
  b.PRic = b.Ric + (n - 1.0) / n1 * b.S_h + (n - 1.0) / (n1 * n1) * b.S * b.S;
  b.WPRic0 = b.Ric + (n - 1.0) * (b.Sfrak * b.Sfrak + b.Sfrak_h);
  return b;
}

// -- single-invariant entry points --------------------------------------------

inline Eigen::MatrixXd fundamental_tensor(const MetricSpec& m, const TangentSample& s) {
  return SprayContext(m, s).g_matrix();
}

inline Eigen::VectorXd spray(const MetricSpec& m, const TangentSample& s) { return SprayContext(m, s).spray(); }

inline Eigen::MatrixXd riemann_curvature(const MetricSpec& m, const TangentSample& s) {
  return SprayContext(m, s).riemann();
}

inline double ricci(const MetricSpec& m, const TangentSample& s) { return riemann_curvature(m, s).trace(); }

inline double distortion(const MetricSpec& m, const VolumeSpec& vol, const TangentSample& s) {
  SprayContext ctx(m, s);
  return 0.5 * std::log(ctx.g_matrix().determinant()) - std::log(volume_density(m, vol, s.x));
}

inline double s_curvature(const MetricSpec& m, const VolumeSpec& vol, const TangentSample& s) {
  SprayContext ctx(m, s);
  return ctx.s_curvature_jet(ctx.log_density(m, vol)).value();
}

/// A scalar field on TM, evaluated on 2n-variable jets (x then y).
using JetField = std::function<MultiJet(std::span<const MultiJet> x, std::span<const MultiJet> y)>;

inline double horizontal_derivative_along_spray(const JetField& field, const MetricSpec& m, const TangentSample& s) {
  SprayContext ctx(m, s);
  return ctx.horizontal(field(ctx.X(), ctx.Y()));
}

inline double projective_ricci(const MetricSpec& m, const VolumeSpec& vol, const TangentSample& s) {
  return compute_bundle(m, s, {vol, std::nullopt}).PRic;
}

inline double weighted_projective_ricci(const MetricSpec& m, const VolumeSpec& vol, const ReferenceVolume& ref,
                                        const TangentSample& s) {
  return compute_bundle(m, s, {vol, ref}).WPRic0;
}

/// Ric = (n-1)(kappa + 3 theta/F) F^2 with kappa(x) and theta = theta_i(x) y^i.
struct WeaklyEinsteinSpec {
  Expr kappa;
  OneFormSpec theta_we;
};

inline double weakly_einstein_residual(const MetricSpec& m, const WeaklyEinsteinSpec& we, const TangentSample& s) {
  const int n = m.dim();
  const double F = m.F(s.x, s.y);
  const double kappa = evaluate<double>(we.kappa, std::span<const double>(s.x), std::span<const double>{});
  auto th = we.theta_we.evaluate_at<double>(std::span<const double>(s.x));
  double theta = 0.0;
  for (int i = 0; i < n; ++i) theta += th[i] * s.y[i];
  return ricci(m, s) - (n - 1.0) * (kappa + 3.0 * theta / F) * F * F;
}

}  // namespace finsler
