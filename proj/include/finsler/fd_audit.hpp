#pragma once

// Central differences with one Richardson level. Only the tests use this,
// as an independent check on the jet derivatives.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "finsler/jet.hpp"

namespace finsler {

using ScalarField = std::function<double(std::span<const double>)>;

namespace fd_detail {

inline double step(double coord, int order) {
  const double eps = std::numeric_limits<double>::epsilon();
  // second differences lose two powers of h to rounding, hence the larger step
  const double base = order == 1 ? std::cbrt(eps) : std::sqrt(std::sqrt(eps));
  return base * std::max(1.0, std::abs(coord));
}

inline double eval_shifted(const ScalarField& f, std::vector<double> p, int v, double dv, int w, double dw) {
  p[v] += dv;
  if (w >= 0) p[w] += dw;
  return f(p);
}

inline double first(const ScalarField& f, const std::vector<double>& p, int v, double h) {
  return (eval_shifted(f, p, v, h, -1, 0) - eval_shifted(f, p, v, -h, -1, 0)) / (2.0 * h);
}

inline double second(const ScalarField& f, const std::vector<double>& p, int v, int w, double hv, double hw) {
  if (v == w) {
    const double f0 = f(p);
    return (eval_shifted(f, p, v, hv, -1, 0) - 2.0 * f0 + eval_shifted(f, p, v, -hv, -1, 0)) / (hv * hv);
  }
  const double pp = eval_shifted(f, p, v, hv, w, hw), pm = eval_shifted(f, p, v, hv, w, -hw);
  const double mp = eval_shifted(f, p, v, -hv, w, hw), mm = eval_shifted(f, p, v, -hv, w, -hw);
  return (pp - pm - mp + mm) / (4.0 * hv * hw);
}

}  // namespace fd_detail

/// Estimate of the partial derivative selected by `idx` (order 1 or 2).
inline double finite_difference_audit(const ScalarField& field, std::span<const double> point, const MultiIndex& idx) {
  std::vector<double> p(point.begin(), point.end());
  std::vector<int> vars;
  for (int v = 0; v < kMaxJetVars; ++v)
    for (int c = 0; c < idx[v]; ++c) vars.push_back(v);
  if (vars.empty()) return field(p);
  if (vars.size() > 2) throw std::invalid_argument("finite_difference_audit supports order <= 2");
  for (int v : vars)
    if (v >= static_cast<int>(p.size())) throw std::invalid_argument("multi-index names a variable past the point");

  const int order = static_cast<int>(vars.size());
  auto estimate = [&](double scale) {
    if (order == 1) return fd_detail::first(field, p, vars[0], scale * fd_detail::step(p[vars[0]], 1));
    return fd_detail::second(field, p, vars[0], vars[1], scale * fd_detail::step(p[vars[0]], 2),
                             scale * fd_detail::step(p[vars[1]], 2));
  };
  const double coarse = estimate(1.0), fine = estimate(0.5);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace finsler
