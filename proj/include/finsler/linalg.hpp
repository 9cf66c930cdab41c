#pragma once

// Small dense linear algebra over doubles or jets (row-major n x n in a flat
// vector). Pivoting decisions use the point values only, so the same pivot
// sequence is applied to every Taylor coefficient.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

template <class T>
T determinant(int n, std::vector<T> m) {
  T det = constant_like(m[0], 1.0);
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(math::value_of(m[r * n + c])) > std::abs(math::value_of(m[p * n + c]))) p = r;
    if (math::value_of(m[p * n + c]) == 0.0) return constant_like(m[0], 0.0);
    if (p != c) {
      for (int k = 0; k < n; ++k) std::swap(m[p * n + k], m[c * n + k]);
      det = -det;
    }
    det = det * m[c * n + c];
    T inv = 1.0 / m[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      T f = m[r * n + c] * inv;
      for (int k = c; k < n; ++k) m[r * n + k] = m[r * n + k] - f * m[c * n + k];
    }
  }
  return det;
}

/// Gauss-Jordan inverse; throws SingularEvaluation on a zero pivot.
template <class T>
std::vector<T> inverse(int n, std::vector<T> m) {
  std::vector<T> inv(n * n, constant_like(m[0], 0.0));
  for (int i = 0; i < n; ++i) inv[i * n + i] = constant_like(m[0], 1.0);
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(math::value_of(m[r * n + c])) > std::abs(math::value_of(m[p * n + c]))) p = r;
    if (math::value_of(m[p * n + c]) == 0.0) throw SingularEvaluation("singular matrix in inverse", 0.0);
    if (p != c)
      for (int k = 0; k < n; ++k) {
        std::swap(m[p * n + k], m[c * n + k]);
        std::swap(inv[p * n + k], inv[c * n + k]);
      }
    T piv = 1.0 / m[c * n + c];
    for (int k = 0; k < n; ++k) {
      m[c * n + k] = m[c * n + k] * piv;
      inv[c * n + k] = inv[c * n + k] * piv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      T f = m[r * n + c];
      for (int k = 0; k < n; ++k) {
        m[r * n + k] = m[r * n + k] - f * m[c * n + k];
        inv[r * n + k] = inv[r * n + k] - f * inv[c * n + k];
      }
    }
  }
  return inv;
}

/// a^{ij} v_i v_j given the inverse matrix.
template <class T>
T quadratic_form(int n, const std::vector<T>& m, std::span<const T> v) {
  T s = constant_like(v[0], 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s = s + m[i * n + j] * v[i] * v[j];
  return s;
}

}  // namespace finsler
