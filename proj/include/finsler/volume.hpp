#pragma once

// Volume densities sigma(x): Busemann-Hausdorff by quadrature over the
// unit sphere of directions, plus the closed forms for Randers, Kropina and
// Riemannian metrics. Everything is templated on the scalar so a density
// can be carried as a jet in x (needed for d ln sigma).

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"

namespace finsler {

struct VolumeSpec {
  enum class Kind { BusemannHausdorff, ClosedFormRanders, ClosedFormKropina, RiemannianDensity, ConstantDensity };
  Kind kind = Kind::BusemannHausdorff;
  double constant = 1.0;

  static VolumeSpec busemann_hausdorff() { return {Kind::BusemannHausdorff, 1.0}; }
  static VolumeSpec closed_form_randers() { return {Kind::ClosedFormRanders, 1.0}; }
  static VolumeSpec closed_form_kropina() { return {Kind::ClosedFormKropina, 1.0}; }
  static VolumeSpec riemannian_density() { return {Kind::RiemannianDensity, 1.0}; }
  static VolumeSpec constant_density(double v) {
    if (!(v > 0.0)) throw SpecError("constant density must be positive");
    return {Kind::ConstantDensity, v};
  }

  /// The closed form matching the metric's structure, or quadrature when
  /// there is none.
  static VolumeSpec closed_form_for(const MetricSpec& m) {
    switch (m.structure()) {
      case Structure::Randers: return closed_form_randers();
      case Structure::Kropina: return closed_form_kropina();
      case Structure::Riemannian: return riemannian_density();
      case Structure::General: break;
    }
    return busemann_hausdorff();
  }
};

inline const char* to_string(VolumeSpec::Kind k) {
  switch (k) {
    case VolumeSpec::Kind::BusemannHausdorff: return "busemann-hausdorff";
    case VolumeSpec::Kind::ClosedFormRanders: return "closed-form-randers";
    case VolumeSpec::Kind::ClosedFormKropina: return "closed-form-kropina";
    case VolumeSpec::Kind::RiemannianDensity: return "riemannian";
    case VolumeSpec::Kind::ConstantDensity: return "constant";
  }
  return "?";
}

inline double unit_ball_volume(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    case 4: return std::numbers::pi * std::numbers::pi / 2.0;
  }
  throw SpecError("unit ball volume requested for unsupported dimension");
}

/// Gauss-Legendre nodes and weights on [-1, 1], cached per count.
struct GaussLegendre {
  std::vector<double> nodes, weights;

  static const GaussLegendre& get(int count) {
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(count);
    if (it == cache.end()) it = cache.emplace(count, build(count)).first;
    return it->second;
  }

 private:
  static GaussLegendre build(int m) {
    GaussLegendre gl;
    gl.nodes.resize(m);
    gl.weights.resize(m);
    for (int i = 0; i < m; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= m; ++k) {
          double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = m * (z * p1 - p0) / (z * z - 1.0);
        double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      gl.nodes[i] = z;
      gl.weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return gl;
  }
};

namespace volume_detail {

template <class T>
double max_rel_change(const T& a, const T& b) {
  if constexpr (std::is_same_v<T, double>) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
  } else {
    double scale = 1e-300, diff = 0.0;
    for (std::size_t k = 0; k < b.coeffs().size(); ++k) {
      scale = std::max(scale, std::abs(b[k]));
      diff = std::max(diff, std::abs(a[k] - b[k]));
    }
    return diff / scale;
  }
}

/// F(x, theta)^(-n) for a fixed direction, using coefficient values that
/// were evaluated once per base point.
template <class T>
struct Integrand {
  const MetricSpec& m;
  std::span<const T> x;
  std::vector<T> a, b;

  Integrand(const MetricSpec& metric, std::span<const T> xs) : m(metric), x(xs) {
    if (m.alpha()) a = m.alpha()->template evaluate_at<T>(x);
    if (m.beta()) b = m.beta()->template evaluate_at<T>(x);
  }

  T operator()(std::span<const double> theta) const {
    const int n = m.dim();
    if (m.structure() == Structure::General) {
      std::vector<T> y;
      for (double t : theta) y.push_back(constant_like(x[0], t));
      return math::pow(m.F<T>(x, std::span<const T>(y)), -static_cast<double>(n));
    }
    T a2 = constant_like(x[0], 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a2 = a2 + a[i * n + j] * (theta[i] * theta[j]);
    T beta = constant_like(x[0], 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) beta = beta + b[i] * theta[i];
    T F = constant_like(x[0], 0.0);
    switch (m.structure()) {
      case Structure::Riemannian: F = math::sqrt(a2); break;
      case Structure::Randers: F = math::sqrt(a2) + beta; break;
      case Structure::Kropina: return math::pow(beta / a2, static_cast<double>(n));
      case Structure::General: break;
    }
    return math::pow(F, -static_cast<double>(n));
  }
};

/// (1/n) * integral of f over S^{n-1} at refinement level `level`.
/// Kropina integrands are integrated over the half of the sphere where
/// beta > 0 (the rest contributes nothing).
template <class T>
T sphere_integral(const Integrand<T>& f, int n, int level) {
  T total = constant_like(f.x[0], 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  const bool half = f.m.structure() == Structure::Kropina;
  std::vector<double> e;
  if (half) {
    double norm = 0.0;
    for (const auto& bi : f.b) norm += math::value_of(bi) * math::value_of(bi);
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw DomainError("Kropina volume requires b != 0");
    for (const auto& bi : f.b) e.push_back(math::value_of(bi) / norm);
  }
  if (n == 2) {
    if (half) {
      const auto& gl = GaussLegendre::get(64 << level);
      const double phi0 = std::atan2(e[1], e[0]);
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double phi = phi0 + 0.5 * std::numbers::pi * gl.nodes[k];
        const double th[2] = {std::cos(phi), std::sin(phi)};
        total = total + f(th) * (0.5 * std::numbers::pi * gl.weights[k]);
      }
    } else {
      const int N = 512 << level;
      for (int k = 0; k < N; ++k) {
        const double phi = two_pi * k / N;
        const double th[2] = {std::cos(phi), std::sin(phi)};
        total = total + f(th) * (two_pi / N);
      }
    }
    return total / 2.0;
  }
  if (n == 3) {
    // orthonormal frame (p, u, v); p is the pole of the polar angle
    std::array<double, 3> p{0, 0, 1}, u{1, 0, 0}, v{0, 1, 0};
    if (half) {
      p = {e[0], e[1], e[2]};
      std::array<double, 3> t = std::abs(p[0]) < 0.9 ? std::array<double, 3>{1, 0, 0} : std::array<double, 3>{0, 1, 0};
      double d = t[0] * p[0] + t[1] * p[1] + t[2] * p[2];
      for (int i = 0; i < 3; ++i) u[i] = t[i] - d * p[i];
      double un = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
      for (auto& c : u) c /= un;
      v = {p[1] * u[2] - p[2] * u[1], p[2] * u[0] - p[0] * u[2], p[0] * u[1] - p[1] * u[0]};
    }
    const auto& gl = GaussLegendre::get(64 << level);
    const int N = 128 << level;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      // half: cos(polar) in [0, 1]; full: in [-1, 1]
      const double t = half ? 0.5 * (gl.nodes[k] + 1.0) : gl.nodes[k];
      const double wt = half ? 0.5 * gl.weights[k] : gl.weights[k];
      const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (int j = 0; j < N; ++j) {
        const double psi = two_pi * j / N;
        const double c = s * std::cos(psi), d = s * std::sin(psi);
        double th[3];
        for (int i = 0; i < 3; ++i) th[i] = t * p[i] + c * u[i] + d * v[i];
        total = total + f(th) * (wt * two_pi / N);
      }
    }
    return total / 3.0;
  }
  throw SpecError("quadrature volume is implemented for n = 2 and n = 3 only");
}

}  // namespace volume_detail

/// Euclidean volume of {y : F(x, y) < 1}, refined by doubling until two
/// successive levels agree to 1e-9 relative (all jet coefficients).
template <class T>
T unit_ball_volume_of(const MetricSpec& m, std::span<const T> x, double rel_tol = 1e-9) {
  volume_detail::Integrand<T> f(m, x);
  T prev = volume_detail::sphere_integral(f, m.dim(), 0);
  for (int level = 1; level <= 4; ++level) {
    T next = volume_detail::sphere_integral(f, m.dim(), level);
    if (volume_detail::max_rel_change(next, prev) < rel_tol) return next;
    prev = std::move(next);
  }
  throw QuadratureError("Busemann-Hausdorff quadrature did not converge for metric '" + m.name() + "'");
}

/// sqrt(det a(x)).
template <class T>
T riemannian_density_of(const MetricSpec& m, std::span<const T> x) {
  if (!m.alpha()) throw SpecError("metric '" + m.name() + "' has no Riemannian part for a Riemannian density");
  return math::sqrt(determinant(m.dim(), m.alpha()->template evaluate_at<T>(x)));
}

/// b(x)^2 = a^{ij} b_i b_j.
template <class T>
T b_squared(const MetricSpec& m, std::span<const T> x) {
  auto a = m.alpha()->template evaluate_at<T>(x);
  auto b = m.beta()->template evaluate_at<T>(x);
  return quadratic_form(m.dim(), inverse(m.dim(), std::move(a)), std::span<const T>(b));
}

/// sigma(x) for the given volume choice; throws if the result is not
/// strictly positive.
template <class T>
T volume_density(const MetricSpec& m, const VolumeSpec& v, std::span<const T> x) {
  const int n = m.dim();
  T sigma = constant_like(x[0], v.constant);
  switch (v.kind) {
    case VolumeSpec::Kind::ConstantDensity: break;
    case VolumeSpec::Kind::RiemannianDensity: sigma = riemannian_density_of(m, x); break;
    case VolumeSpec::Kind::BusemannHausdorff: sigma = unit_ball_volume(n) / unit_ball_volume_of(m, x); break;
    case VolumeSpec::Kind::ClosedFormRanders: {
      if (m.structure() != Structure::Randers) throw SpecError("Randers closed-form density needs a Randers metric");
      T one_minus = 1.0 - b_squared(m, x);
      sigma = riemannian_density_of(m, x) * math::pow(one_minus, 0.5 * (n + 1));
      break;
    }
    case VolumeSpec::Kind::ClosedFormKropina: {
      if (m.structure() != Structure::Kropina) throw SpecError("Kropina closed-form density needs a Kropina metric");
      T bnorm = math::sqrt(b_squared(m, x));
      sigma = riemannian_density_of(m, x) * math::pow(2.0 / bnorm, static_cast<double>(n));
      break;
    }
  }
  if (!(math::value_of(sigma) > 0.0))
    throw DomainError("volume density is not positive (" + std::to_string(math::value_of(sigma)) + ")");
  return sigma;
}

inline double volume_density(const MetricSpec& m, const VolumeSpec& v, const std::vector<double>& x) {
  return volume_density<double>(m, v, std::span<const double>(x));
}

}  // namespace finsler
