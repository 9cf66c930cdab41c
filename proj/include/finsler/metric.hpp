#pragma once

// Declarative Finsler metrics: general F(x, y) expressions, Randers and
// Kropina metrics built from a Riemannian alpha and a 1-form beta, and the
// named families of the built-in catalog.

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/expr.hpp"
#include "finsler/jet.hpp"

namespace finsler {

/// alpha = sqrt(a_ij(x) y^i y^j); a is stored full and kept symmetric.
class RiemannianSpec {
 public:
  RiemannianSpec() = default;
  explicit RiemannianSpec(int dim) : dim_(dim), a_(dim * dim) {
    for (int i = 0; i < dim; ++i) a_[i * dim + i] = Expr::lit(1.0);
  }

  static RiemannianSpec identity(int dim) { return RiemannianSpec(dim); }

  int dim() const noexcept { return dim_; }
  const Expr& at(int i, int j) const { return a_[i * dim_ + j]; }
  void set(int i, int j, Expr e) {
    a_[i * dim_ + j] = e;
    a_[j * dim_ + i] = std::move(e);
  }

  template <class T>
  std::vector<T> evaluate_at(std::span<const T> x) const {
    std::vector<T> out;
    out.reserve(a_.size());
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        if (j < i)
          out.push_back(out[j * dim_ + i]);
        else
          out.push_back(evaluate<T>(at(i, j), x, std::span<const T>{}));
      }
    return out;
  }

  Eigen::MatrixXd matrix(std::span<const double> x) const {
    auto v = evaluate_at<double>(x);
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m(i, j) = v[i * dim_ + j];
    return m;
  }

 private:
  int dim_ = 0;
  std::vector<Expr> a_;
};

/// beta = b_i(x) y^i.
struct OneFormSpec {
  int dim = 0;
  std::vector<Expr> b;

  template <class T>
  std::vector<T> evaluate_at(std::span<const T> x) const {
    std::vector<T> out;
    out.reserve(b.size());
    for (const auto& e : b) out.push_back(evaluate<T>(e, x, std::span<const T>{}));
    return out;
  }
};

enum class MetricKind { General, Randers, Kropina, QuarticRoot, Funk, CSRanders, BaoShen, Riemannian, Euclidean };

/// The algebraic shape a metric's F takes, which decides the closed forms
/// available for it.
enum class Structure { General, Randers, Kropina, Riemannian };

inline const char* to_string(MetricKind k) {
  switch (k) {
    case MetricKind::General: return "general";
    case MetricKind::Randers: return "randers";
    case MetricKind::Kropina: return "kropina";
    case MetricKind::QuarticRoot: return "quartic-root";
    case MetricKind::Funk: return "funk";
    case MetricKind::CSRanders: return "cs-randers";
    case MetricKind::BaoShen: return "bao-shen";
    case MetricKind::Riemannian: return "riemannian";
    case MetricKind::Euclidean: return "euclidean";
  }
  return "?";
}

/// Coordinate box used for construction-time spot checks and, by default,
/// for sampling.
inline constexpr double kDefaultBoxHalfWidth = 0.5;

class MetricSpec {
 public:
  MetricKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::pair<std::string, double>>& params() const noexcept { return params_; }

  Structure structure() const noexcept {
    switch (kind_) {
      case MetricKind::Randers:
      case MetricKind::Funk:
      case MetricKind::CSRanders:
      case MetricKind::BaoShen: return Structure::Randers;
      case MetricKind::Kropina: return Structure::Kropina;
      case MetricKind::Riemannian:
      case MetricKind::Euclidean: return Structure::Riemannian;
      default: return Structure::General;
    }
  }

  const RiemannianSpec* alpha() const { return alpha_ ? &*alpha_ : nullptr; }
  const OneFormSpec* beta() const { return beta_ ? &*beta_ : nullptr; }
  const Expr* general_F() const { return F_ ? &*F_ : nullptr; }

  // -- evaluation -----------------------------------------------------------

  template <class T>
  T alpha_squared(std::span<const T> x, std::span<const T> y) const {
    T s = constant_like(y[0], 0.0);
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j) {
        T aij = evaluate<T>(alpha_->at(i, j), x, std::span<const T>{});
        s += (i == j ? 1.0 : 2.0) * aij * y[i] * y[j];
      }
    return s;
  }

  template <class T>
  T beta_value(std::span<const T> x, std::span<const T> y) const {
    T s = constant_like(y[0], 0.0);
    for (int i = 0; i < dim_; ++i) s += evaluate<T>(beta_->b[i], x, std::span<const T>{}) * y[i];
    return s;
  }

  /// F(x, y). Kropina evaluation outside the cone beta > 0 is a DomainError.
  template <class T>
  T F(std::span<const T> x, std::span<const T> y) const {
    switch (structure()) {
      case Structure::Riemannian: return math::sqrt(alpha_squared(x, y));
      case Structure::Randers: return math::sqrt(alpha_squared(x, y)) + beta_value(x, y);
      case Structure::Kropina: {
        T b = kropina_beta(x, y);
        return alpha_squared(x, y) / b;
      }
      case Structure::General: return evaluate<T>(*F_, x, y);
    }
    return constant_like(y[0], 0.0);
  }

  /// F^2, avoiding the square root where the structure allows it.
  template <class T>
  T F2(std::span<const T> x, std::span<const T> y) const {
    switch (structure()) {
      case Structure::Riemannian: return alpha_squared(x, y);
      case Structure::Randers: {
        T f = math::sqrt(alpha_squared(x, y)) + beta_value(x, y);
        return f * f;
      }
      case Structure::Kropina: {
        T b = kropina_beta(x, y);
        T a2 = alpha_squared(x, y);
        return (a2 * a2) / (b * b);
      }
      case Structure::General: {
        T f = evaluate<T>(*F_, x, y);
        return f * f;
      }
    }
    return constant_like(y[0], 0.0);
  }

  double F(const std::vector<double>& x, const std::vector<double>& y) const {
    return F<double>(std::span<const double>(x), std::span<const double>(y));
  }

  /// Throws DomainError when the base point lies outside the metric's
  /// domain: chart restrictions, alpha not positive definite, b^2 >= 1 for
  /// Randers, b = 0 for Kropina.
  void check_domain(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw DomainError("base point has " + std::to_string(x.size()) + " coordinates, metric dimension is " +
                        std::to_string(dim_));
    double r2 = 0.0;
    for (double v : x) {
      if (!std::isfinite(v)) throw DomainError("non-finite base point");
      r2 += v * v;
    }
    if (kind_ == MetricKind::Funk && !(r2 < 1.0)) throw DomainError("Funk metric requires |x| < 1");
    if (kind_ == MetricKind::CSRanders) {
      double a2 = 0.0;
      for (const auto& [k, v] : params_)
        if (k.rfind("a", 0) == 0) a2 += v * v;
      if (!(std::sqrt(a2) * r2 < 1.0)) throw DomainError("CS Randers metric requires |a| |x|^2 < 1");
    }
    if (!alpha_) return;
    Eigen::MatrixXd a = alpha_->matrix(x);
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success || !a.allFinite()) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
      throw DegenerateTensor("alpha is not positive definite at base point", es.eigenvalues()(0));
    }
    if (beta_) {
      Eigen::VectorXd b(dim_);
      auto bv = beta_->evaluate_at<double>(x);
      for (int i = 0; i < dim_; ++i) b(i) = bv[i];
      const double b2 = b.dot(llt.solve(b));
      if (structure() == Structure::Randers && !(b2 < 1.0))
        throw DomainError("Randers metric requires b^2 < 1 (b^2 = " + std::to_string(b2) + ")");
      if (structure() == Structure::Kropina && !(b2 > 0.0)) throw DomainError("Kropina metric requires b != 0");
    }
  }

  /// Full sample validation: base point domain, y != 0, Kropina cone.
  void check_sample(std::span<const double> x, std::span<const double> y) const {
    check_domain(x);
    if (static_cast<int>(y.size()) != dim_) throw DomainError("tangent vector has wrong dimension");
    bool nonzero = false;
    for (double v : y) nonzero |= (v != 0.0);
    if (!nonzero) throw DomainError("tangent vector y must be nonzero");
    if (structure() == Structure::Kropina) kropina_beta(x, y);
  }

  // -- construction ---------------------------------------------------------

  static MetricSpec general(int dim, Expr F, std::string name = "general") {
    MetricSpec m(MetricKind::General, dim, std::move(name));
    require_variables(F, dim, true, "F");
    m.F_ = std::move(F);
    m.check_homogeneity();
    return m;
  }

  static MetricSpec riemannian(RiemannianSpec a, std::string name = "riemannian") {
    MetricSpec m(MetricKind::Riemannian, a.dim(), std::move(name));
    m.set_alpha(std::move(a));
    m.spot_check_alpha();
    return m;
  }

  static MetricSpec euclidean(int dim) {
    MetricSpec m(MetricKind::Euclidean, dim, "euclidean" + std::to_string(dim));
    m.alpha_ = RiemannianSpec::identity(dim);
    return m;
  }

  static MetricSpec randers(RiemannianSpec a, OneFormSpec b, std::string name = "randers") {
    MetricSpec m(MetricKind::Randers, a.dim(), std::move(name));
    m.set_alpha(std::move(a));
    m.set_beta(std::move(b));
    m.spot_check_alpha();
    return m;
  }

  static MetricSpec kropina(RiemannianSpec a, OneFormSpec b, std::string name = "kropina") {
    MetricSpec m(MetricKind::Kropina, a.dim(), std::move(name));
    m.set_alpha(std::move(a));
    m.set_beta(std::move(b));
    m.spot_check_alpha();
    return m;
  }

  /// Re-tags a spec as one of the named families (after it was assembled
  /// as a plain Randers or general metric).
  MetricSpec tagged(MetricKind kind, std::string name, std::vector<std::pair<std::string, double>> params) && {
    kind_ = kind;
    name_ = std::move(name);
    params_ = std::move(params);
    return std::move(*this);
  }

  /// The Riemannian metric alpha of a Randers/Kropina metric.
  MetricSpec alpha_metric() const {
    if (!alpha_) throw SpecError("metric '" + name_ + "' has no Riemannian part");
    MetricSpec m(MetricKind::Riemannian, dim_, name_ + ":alpha");
    m.alpha_ = alpha_;
    m.params_ = params_;
    if (kind_ == MetricKind::Funk) m.kind_ = MetricKind::Riemannian;
    return m;
  }

 private:
  MetricSpec(MetricKind kind, int dim, std::string name) : kind_(kind), dim_(dim), name_(std::move(name)) {
    if (dim < 1 || dim > 4) throw SpecError("metric dimension must be between 1 and 4, got " + std::to_string(dim));
  }

  template <class T>
  T kropina_beta(std::span<const T> x, std::span<const T> y) const {
    T b = beta_value(x, y);
    if (!(math::value_of(b) > 0.0))
      throw DomainError("sample outside the Kropina cone beta > 0 (beta = " + std::to_string(math::value_of(b)) + ")");
    return b;
  }

  static void require_variables(const Expr& e, int dim, bool allow_y, const std::string& what) {
    if (max_variable_index(e, VarKind::X) >= dim)
      throw SpecError(what + " uses x" + std::to_string(max_variable_index(e, VarKind::X) + 1) +
                      " beyond dimension " + std::to_string(dim));
    const int yi = max_variable_index(e, VarKind::Y);
    if (!allow_y && yi >= 0) throw SpecError(what + " must depend on x only");
    if (yi >= dim) throw SpecError(what + " uses y" + std::to_string(yi + 1) + " beyond dimension " + std::to_string(dim));
  }

  void set_alpha(RiemannianSpec a) {
    if (a.dim() != dim_) throw SpecError("alpha dimension mismatch");
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        require_variables(a.at(i, j), dim_, false, "a[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
    alpha_ = std::move(a);
  }

  void set_beta(OneFormSpec b) {
    if (b.dim != dim_ || static_cast<int>(b.b.size()) != dim_)
      throw SpecError("dimension mismatch between a (" + std::to_string(dim_) + ") and b (" +
                      std::to_string(b.b.size()) + ")");
    for (int i = 0; i < dim_; ++i) require_variables(b.b[i], dim_, false, "b[" + std::to_string(i + 1) + "]");
    beta_ = std::move(b);
  }

  /// Box grid points (3 per axis) used for construction-time checks.
  std::vector<std::vector<double>> check_points() const {
    std::vector<std::vector<double>> pts;
    int total = 1;
    for (int i = 0; i < dim_; ++i) total *= 3;
    for (int k = 0; k < total; ++k) {
      std::vector<double> x(dim_);
      int r = k;
      for (int i = 0; i < dim_; ++i) {
        x[i] = (r % 3 - 1) * kDefaultBoxHalfWidth;
        r /= 3;
      }
      pts.push_back(std::move(x));
    }
    return pts;
  }

  /// alpha positive definite and (Randers) b^2 < 1 on the check grid;
  /// points where the coefficient expressions cannot be evaluated are
  /// outside the chart and skipped.
  void spot_check_alpha() const {
    for (const auto& x : check_points()) {
      try {
        check_domain(x);
      } catch (const SingularEvaluation&) {
        continue;
      } catch (const DomainError& e) {
        if (structure() == Structure::Kropina) continue;
        throw SpecError(std::string("metric '") + name_ + "' invalid at a check point: " + e.what());
      } catch (const DegenerateTensor& e) {
        throw SpecError(std::string("metric '") + name_ + "': " + e.what());
      }
    }
  }

  /// F(x, 2y) = 2 F(x, y) on 10 random samples, relative 1e-9.
  void check_homogeneity() const {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> box(-0.5 * kDefaultBoxHalfWidth, 0.5 * kDefaultBoxHalfWidth);
    std::normal_distribution<double> gauss;
    int checked = 0;
    for (int attempt = 0; attempt < 100 && checked < 10; ++attempt) {
      std::vector<double> x(dim_), y(dim_), y2(dim_);
      for (auto& v : x) v = box(rng);
      for (int i = 0; i < dim_; ++i) {
        y[i] = gauss(rng);
        y2[i] = 2.0 * y[i];
      }
      double f1, f2;
      try {
        f1 = F(x, y);
        f2 = F(x, y2);
      } catch (const Error&) {
        continue;
      }
      ++checked;
      if (std::abs(f2 - 2.0 * f1) > 1e-9 * std::max(std::abs(f1), 1e-300))
        throw SpecError("F is not positively 1-homogeneous in y (F(x,2y) = " + std::to_string(f2) +
                        ", 2F(x,y) = " + std::to_string(2.0 * f1) + ")");
    }
  }

  MetricKind kind_;
  int dim_;
  std::string name_;
  std::vector<std::pair<std::string, double>> params_;
  std::optional<RiemannianSpec> alpha_;
  std::optional<OneFormSpec> beta_;
  std::optional<Expr> F_;
};

}  // namespace finsler
