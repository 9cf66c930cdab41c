#pragma once

// Truncated multivariate Taylor arithmetic ("jets").
//
// A MultiJet over V variables and order p stores the Taylor coefficients
// c_k = (1/k!) d^k f of a function at a base point, for every multi-index
// k with |k| <= p. Coefficients are laid out densely in graded order: all
// degree-0 entries, then degree 1, ... so that the layout of order p - 1 is a
// prefix of the layout of order p. Truncation is therefore a resize, and
// jets of different orders combine by truncating to the smaller one.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {

inline constexpr int kMaxJetVars = 8;
inline constexpr int kMaxJetOrder = 4;

using MultiIndex = std::array<std::uint8_t, kMaxJetVars>;

inline int total_degree(const MultiIndex& k) {
  int d = 0;
  for (auto e : k) d += e;
  return d;
}

inline double multi_index_factorial(const MultiIndex& k) {
  static constexpr double fact[] = {1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0};
  double f = 1.0;
  for (auto e : k) f *= fact[e];
  return f;
}

/// Shared, immutable bookkeeping for one (num_vars, order) pair.
class JetLayout {
 public:
  struct Product {
    std::uint32_t lhs, rhs, out;
  };
  struct Shift {
    std::uint32_t target;  // index in the order - 1 layout
    std::uint32_t source;  // index in this layout
    double factor;
  };

  static const JetLayout& get(int num_vars, int order) {
    if (num_vars < 0 || num_vars > kMaxJetVars || order < 0 || order > kMaxJetOrder)
      throw std::invalid_argument("jet layout out of range: vars=" + std::to_string(num_vars) +
                                  " order=" + std::to_string(order));
    struct Slot {
      std::once_flag once;
      std::unique_ptr<JetLayout> layout;
    };
    static std::array<std::array<Slot, kMaxJetOrder + 1>, kMaxJetVars + 1> cache;
    Slot& slot = cache[num_vars][order];
    std::call_once(slot.once, [&] { slot.layout.reset(new JetLayout(num_vars, order)); });
    return *slot.layout;
  }

  int num_vars() const noexcept { return num_vars_; }
  int order() const noexcept { return order_; }
  std::size_t size() const noexcept { return indices_.size(); }
  const MultiIndex& index(std::size_t k) const { return indices_[k]; }
  int degree(std::size_t k) const { return degrees_[k]; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t find(const MultiIndex& k) const {
    for (int v = num_vars_; v < kMaxJetVars; ++v)
      if (k[v] != 0) return npos;
    if (total_degree(k) > order_) return npos;
    auto it = lookup_.find(encode(k));
    return it == lookup_.end() ? npos : it->second;
  }

  std::span<const Product> products() const noexcept { return products_; }
  std::span<const Shift> derivative_map(int var) const { return shifts_.at(var); }

 private:
  JetLayout(int num_vars, int order) : num_vars_(num_vars), order_(order) {
    for (int d = 0; d <= order; ++d) {
      MultiIndex k{};
      enumerate(k, 0, d);
    }
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      lookup_.emplace(encode(indices_[i]), i);
      degrees_.push_back(total_degree(indices_[i]));
    }
    for (std::uint32_t a = 0; a < indices_.size(); ++a) {
      for (std::uint32_t b = 0; b < indices_.size(); ++b) {
        if (degrees_[a] + degrees_[b] > order_) continue;
        MultiIndex sum{};
        for (int v = 0; v < kMaxJetVars; ++v) sum[v] = indices_[a][v] + indices_[b][v];
        products_.push_back({a, b, static_cast<std::uint32_t>(find(sum))});
      }
    }
    shifts_.resize(num_vars_);
    for (int v = 0; v < num_vars_; ++v) {
      for (std::uint32_t t = 0; t < indices_.size(); ++t) {
        if (degrees_[t] >= order_) continue;
        MultiIndex up = indices_[t];
        up[v] += 1;
        shifts_[v].push_back(
            {t, static_cast<std::uint32_t>(find(up)), static_cast<double>(up[v])});
      }
    }
  }

  void enumerate(MultiIndex& k, int var, int remaining) {
    if (var == num_vars_ - 1 || num_vars_ == 0) {
      if (num_vars_ == 0) {
        if (remaining == 0) indices_.push_back(k);
        return;
      }
      k[var] = static_cast<std::uint8_t>(remaining);
      indices_.push_back(k);
      k[var] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      k[var] = static_cast<std::uint8_t>(e);
      enumerate(k, var + 1, remaining - e);
    }
    k[var] = 0;
  }

  static std::uint32_t encode(const MultiIndex& k) {
    std::uint32_t key = 0;
    for (int v = 0; v < kMaxJetVars; ++v) key = key * (kMaxJetOrder + 1) + k[v];
    return key;
  }

  int num_vars_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::unordered_map<std::uint32_t, std::size_t> lookup_;
  std::vector<int> degrees_;
  std::vector<Product> products_;
  std::vector<std::vector<Shift>> shifts_;
};

class MultiJet {
 public:
  MultiJet() : layout_(&JetLayout::get(0, 0)), c_(1, 0.0) {}
  explicit MultiJet(const JetLayout& layout) : layout_(&layout), c_(layout.size(), 0.0) {}

  static MultiJet constant(int num_vars, int order, double value) {
    MultiJet j(JetLayout::get(num_vars, order));
    j.c_[0] = value;
    return j;
  }

  /// The jet of the coordinate function v_index at the given base value.
  static MultiJet variable(int num_vars, int order, int index, double value) {
    if (index < 0 || index >= num_vars)
      throw std::out_of_range("jet variable index " + std::to_string(index) + " out of range");
    MultiJet j = constant(num_vars, order, value);
    if (order >= 1) j.c_[1 + index] = 1.0;
    return j;
  }

  int num_vars() const noexcept { return layout_->num_vars(); }
  int order() const noexcept { return layout_->order(); }
  const JetLayout& layout() const noexcept { return *layout_; }
  double value() const noexcept { return c_[0]; }
  std::span<const double> coeffs() const noexcept { return c_; }
  std::span<double> coeffs() noexcept { return c_; }
  double& operator[](std::size_t k) { return c_[k]; }
  double operator[](std::size_t k) const { return c_[k]; }

  /// Taylor coefficient at a multi-index; zero when the index lies beyond
  /// the stored order.
  double coeff(const MultiIndex& k) const {
    std::size_t i = layout_->find(k);
    return i == JetLayout::npos ? 0.0 : c_[i];
  }

  MultiJet truncated(int order) const {
    if (order >= this->order()) return *this;
    MultiJet j(JetLayout::get(num_vars(), order));
    std::copy_n(c_.begin(), j.c_.size(), j.c_.begin());
    return j;
  }

  bool all_finite() const {
    for (double v : c_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  MultiJet operator-() const {
    MultiJet j = *this;
    for (double& v : j.c_) v = -v;
    return j;
  }

  MultiJet& operator+=(const MultiJet& o) { return *this = *this + o; }
  MultiJet& operator-=(const MultiJet& o) { return *this = *this - o; }
  MultiJet& operator*=(const MultiJet& o) { return *this = *this * o; }
  MultiJet& operator/=(const MultiJet& o) { return *this = *this / o; }
  MultiJet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  MultiJet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  MultiJet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  MultiJet& operator/=(double s) {
    if (s == 0.0) throw SingularEvaluation("division of a jet by zero", s);
    for (double& v : c_) v /= s;
    return *this;
  }

  friend MultiJet operator+(const MultiJet& a, const MultiJet& b) {
    auto [out, n] = common(a, b);
    for (std::size_t k = 0; k < n; ++k) out.c_[k] = a.c_[k] + b.c_[k];
    return out;
  }
  friend MultiJet operator-(const MultiJet& a, const MultiJet& b) {
    auto [out, n] = common(a, b);
    for (std::size_t k = 0; k < n; ++k) out.c_[k] = a.c_[k] - b.c_[k];
    return out;
  }
  friend MultiJet operator*(const MultiJet& a, const MultiJet& b) {
    auto [out, n] = common(a, b);
    (void)n;
    const double* pa = a.c_.data();
    const double* pb = b.c_.data();
    double* po = out.c_.data();
    for (const auto& t : out.layout_->products()) po[t.out] += pa[t.lhs] * pb[t.rhs];
    return out;
  }
  friend MultiJet operator/(const MultiJet& a, const MultiJet& b) { return a * reciprocal(b); }

  friend MultiJet operator+(MultiJet a, double s) { return a += s; }
  friend MultiJet operator+(double s, MultiJet a) { return a += s; }
  friend MultiJet operator-(MultiJet a, double s) { return a -= s; }
  friend MultiJet operator-(double s, const MultiJet& a) { return (-a) += s; }
  friend MultiJet operator*(MultiJet a, double s) { return a *= s; }
  friend MultiJet operator*(double s, MultiJet a) { return a *= s; }
  friend MultiJet operator/(MultiJet a, double s) { return a /= s; }
  friend MultiJet operator/(double s, const MultiJet& a) { return reciprocal(a) *= s; }

  /// f(a) for a univariate f given by its scaled derivatives
  /// d[k] = f^(k)(a0) / k!, k = 0..order.
  friend MultiJet compose(const MultiJet& a, std::span<const double> d) {
    const int p = a.order();
    MultiJet h = a;
    h.c_[0] = 0.0;
    MultiJet r = constant(a.num_vars(), p, d[p]);
    for (int k = p - 1; k >= 0; --k) {
      r = r * h;
      r.c_[0] += d[k];
    }
    return r;
  }

  friend MultiJet reciprocal(const MultiJet& a) {
    const double v = a.value();
    if (v == 0.0 || !std::isfinite(v)) throw SingularEvaluation("division by a zero-valued jet", v);
    std::array<double, kMaxJetOrder + 1> d{};
    double inv = 1.0 / v;
    double p = inv;
    for (int k = 0; k <= a.order(); ++k) {
      d[k] = (k % 2 == 0 ? p : -p);
      p *= inv;
    }
    return checked(compose(a, std::span<const double>(d.data(), a.order() + 1)), "reciprocal");
  }

  static MultiJet checked(MultiJet j, const char* what) {
    if (!j.all_finite()) throw SingularEvaluation(std::string("non-finite jet after ") + what, j.value());
    return j;
  }

 private:
  static std::pair<MultiJet, std::size_t> common(const MultiJet& a, const MultiJet& b) {
    if (a.num_vars() != b.num_vars())
      throw std::invalid_argument("jet variable count mismatch: " + std::to_string(a.num_vars()) +
                                  " vs " + std::to_string(b.num_vars()));
    const JetLayout& l = a.order() <= b.order() ? *a.layout_ : *b.layout_;
    return {MultiJet(l), l.size()};
  }

  const JetLayout* layout_;
  std::vector<double> c_;
};

/// A constant of the same scalar kind (and jet shape) as ref.
template <class T>
T constant_like(const T& ref, double v) {
  if constexpr (std::is_same_v<T, double>) {
    (void)ref;
    return v;
  } else {
    return T::constant(ref.num_vars(), ref.order(), v);
  }
}

/// Base values of the jet variables plus the subset carried as directions.
struct SeedPoint {
  std::vector<double> values;
  std::vector<bool> active;  // empty means all active

  bool is_active(std::size_t i) const { return active.empty() || active.at(i); }
};

inline MultiJet lift_variable(const SeedPoint& point, std::size_t index, int order = kMaxJetOrder) {
  const int n = static_cast<int>(point.values.size());
  if (index >= point.values.size())
    throw std::out_of_range("lift_variable: index " + std::to_string(index) + " >= " + std::to_string(n));
  if (!point.is_active(index)) return MultiJet::constant(n, order, point.values[index]);
  return MultiJet::variable(n, order, static_cast<int>(index), point.values[index]);
}

inline std::vector<MultiJet> lift_all(const SeedPoint& point, int order = kMaxJetOrder) {
  std::vector<MultiJet> out;
  out.reserve(point.values.size());
  for (std::size_t i = 0; i < point.values.size(); ++i) out.push_back(lift_variable(point, i, order));
  return out;
}

/// d/dv_var of a jet; the result has one order less.
inline MultiJet derivative(const MultiJet& a, int var) {
  if (a.order() == 0) throw std::logic_error("cannot differentiate an order-0 jet");
  if (var < 0 || var >= a.num_vars()) throw std::out_of_range("derivative: variable out of range");
  MultiJet out(JetLayout::get(a.num_vars(), a.order() - 1));
  for (const auto& s : a.layout().derivative_map(var)) out[s.target] = s.factor * a[s.source];
  return out;
}

/// Partial derivative value d^|k| f / dv^k at the base point.
inline double extract_derivative(const MultiJet& a, const MultiIndex& k) {
  return a.coeff(k) * multi_index_factorial(k);
}

inline MultiIndex make_index(std::initializer_list<int> exps) {
  MultiIndex k{};
  int i = 0;
  for (int e : exps) k[i++] = static_cast<std::uint8_t>(e);
  return k;
}

/// Re-express a jet over `from.num_vars()` variables as a jet over
/// `total_vars` variables, placing variable i at slot offset + i.
inline MultiJet embed(const MultiJet& from, int total_vars, int offset = 0) {
  MultiJet out(JetLayout::get(total_vars, from.order()));
  const auto& src = from.layout();
  for (std::size_t i = 0; i < src.size(); ++i) {
    MultiIndex k{};
    for (int v = 0; v < src.num_vars(); ++v) k[offset + v] = src.index(i)[v];
    out[out.layout().find(k)] = from[i];
  }
  return out;
}

// Checked elementary functions over doubles and jets. Generic code calls
// math::sqrt(x) for either scalar type.
namespace math {

inline double sqrt(double v) {
  if (!(v > 0.0)) {
    if (v == 0.0) return 0.0;
    throw SingularEvaluation("sqrt of a negative value", v);
  }
  return std::sqrt(v);
}
inline double exp(double v) {
  double r = std::exp(v);
  if (!std::isfinite(r)) throw SingularEvaluation("exp overflow", v);
  return r;
}
inline double log(double v) {
  if (!(v > 0.0)) throw SingularEvaluation("ln of a non-positive value", v);
  return std::log(v);
}
inline double sin(double v) { return std::sin(v); }
inline double cos(double v) { return std::cos(v); }
inline double div(double a, double b) {
  if (b == 0.0) throw SingularEvaluation("division by zero", b);
  return a / b;
}

inline bool is_small_integer(double e) { return e == std::floor(e) && std::abs(e) <= 64.0; }

inline double pow(double base, double e) {
  if (is_small_integer(e)) {
    if (e < 0 && base == 0.0) throw SingularEvaluation("zero raised to a negative power", base);
    return std::pow(base, e);
  }
  if (!(base > 0.0)) throw SingularEvaluation("non-integer power of a non-positive value", base);
  return std::pow(base, e);
}

inline MultiJet sqrt(const MultiJet& a) {
  const double v = a.value();
  if (!(v > 0.0)) throw SingularEvaluation("sqrt of a non-positive jet", v);
  std::array<double, kMaxJetOrder + 1> d{};
  // binom(1/2, k) v^(1/2 - k)
  double coef = 1.0, p = std::sqrt(v);
  for (int k = 0; k <= a.order(); ++k) {
    d[k] = coef * p;
    coef *= (0.5 - k) / (k + 1);
    p /= v;
  }
  return MultiJet::checked(compose(a, std::span<const double>(d.data(), a.order() + 1)), "sqrt");
}

inline MultiJet exp(const MultiJet& a) {
  std::array<double, kMaxJetOrder + 1> d{};
  double e = exp(a.value()), f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    d[k] = e / f;
    f *= (k + 1);
  }
  return MultiJet::checked(compose(a, std::span<const double>(d.data(), a.order() + 1)), "exp");
}

inline MultiJet log(const MultiJet& a) {
  const double v = a.value();
  if (!(v > 0.0)) throw SingularEvaluation("ln of a non-positive jet", v);
  std::array<double, kMaxJetOrder + 1> d{};
  d[0] = std::log(v);
  double p = 1.0;
  for (int k = 1; k <= a.order(); ++k) {
    p /= v;
    d[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
  }
  return MultiJet::checked(compose(a, std::span<const double>(d.data(), a.order() + 1)), "ln");
}

inline MultiJet sin(const MultiJet& a) {
  std::array<double, kMaxJetOrder + 1> d{};
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {s, c, -s, -c};
  double f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    d[k] = cyc[k % 4] / f;
    f *= (k + 1);
  }
  return compose(a, std::span<const double>(d.data(), a.order() + 1));
}

inline MultiJet cos(const MultiJet& a) {
  std::array<double, kMaxJetOrder + 1> d{};
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cyc[4] = {c, -s, -c, s};
  double f = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    d[k] = cyc[k % 4] / f;
    f *= (k + 1);
  }
  return compose(a, std::span<const double>(d.data(), a.order() + 1));
}

inline MultiJet div(const MultiJet& a, const MultiJet& b) { return a / b; }

/// a^e for a constant exponent. Small integer exponents use exact repeated
/// products (valid for any sign of the base); other exponents need a > 0.
inline MultiJet pow(const MultiJet& a, double e) {
  if (is_small_integer(e)) {
    int k = static_cast<int>(std::abs(e));
    MultiJet r = MultiJet::constant(a.num_vars(), a.order(), 1.0);
    MultiJet base = a;
    while (k > 0) {
      if (k & 1) r = r * base;
      k >>= 1;
      if (k) base = base * base;
    }
    return e < 0 ? reciprocal(r) : r;
  }
  const double v = a.value();
  if (!(v > 0.0)) throw SingularEvaluation("non-integer power of a non-positive jet", v);
  std::array<double, kMaxJetOrder + 1> d{};
  double coef = 1.0, p = std::pow(v, e);
  for (int k = 0; k <= a.order(); ++k) {
    d[k] = coef * p;
    coef *= (e - k) / (k + 1);
    p /= v;
  }
  return MultiJet::checked(compose(a, std::span<const double>(d.data(), a.order() + 1)), "pow");
}

/// General power with a jet-valued exponent: exp(e ln a).
inline MultiJet pow(const MultiJet& a, const MultiJet& e) {
  bool constant_exponent = true;
  for (std::size_t k = 1; k < e.coeffs().size(); ++k)
    if (e[k] != 0.0) constant_exponent = false;
  if (constant_exponent) return pow(a, e.value());
  return exp(e * log(a));
}

inline double value_of(double v) { return v; }
inline double value_of(const MultiJet& j) { return j.value(); }

}  // namespace math
}  // namespace finsler
