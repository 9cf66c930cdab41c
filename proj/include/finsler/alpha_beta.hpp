#pragma once

// Closed-form pipeline for Randers (alpha + beta) and Kropina (alpha^2/beta)
// metrics: Christoffel symbols of alpha, the covariant derivative algebra of
// beta and the spray / Ricci / S-curvature formulas built from it.
//
// Index conventions: ';' is the Levi-Civita covariant derivative of alpha,
// b_{i;j} = db_i/dx^j - b_k gamma^k_ij, and a subscript 0 means contraction
// with y. t_ij = s_im s^m_j (so t_00 <= 0); this is the sign under which the
// Randers and Kropina Ricci formulas agree with the generic pipeline.

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"

namespace finsler {

/// gamma^i_jk stored at [i][j][k] in a flat vector.
struct Tensor3 {
  int n = 0;
  std::vector<double> v;

  Tensor3() = default;
  explicit Tensor3(int dim) : n(dim), v(dim * dim * dim, 0.0) {}
  double& operator()(int i, int j, int k) { return v[(i * n + j) * n + k]; }
  double operator()(int i, int j, int k) const { return v[(i * n + j) * n + k]; }
};

inline Tensor3 christoffel(const RiemannianSpec& alpha, std::span<const double> x);

class AlphaBetaFrame {
 public:
  int n = 0;
  Eigen::MatrixXd a, a_inv;
  Tensor3 christoffel;
  Eigen::VectorXd b, b_up;
  double b2 = 0.0;
  double rho = 0.0;            // ln sqrt(1 - b^2), Randers only (NaN otherwise)
  Eigen::VectorXd rho_grad;    // d rho / dx^m
  Eigen::MatrixXd nabla_b;     // (i, j) -> b_{i;j}
  Eigen::MatrixXd r, s;        // r_ij, s_ij
  Eigen::MatrixXd r_up, s_up;  // (k, i) -> r^k_i, s^k_i
  Eigen::VectorXd r_i, s_i;    // r_j = b^i r_ij, s_j = b^i s_ij
  Eigen::VectorXd s_up_vec;    // s^m = a^{mk} s_k
  double r_scalar = 0.0;       // r_ij b^i b^j
  Eigen::MatrixXd e, t, q;
  double t_trace = 0.0;        // t^m_m
  Eigen::VectorXd t_i, q_i;    // b^i t_ij, b^i q_ij
  Tensor3 r_cov, s_cov;        // r_{ij;k}, s_{ij;k}
  Eigen::MatrixXd r1_cov, s1_cov;  // r_{i;j}, s_{i;j}
  Eigen::VectorXd div_s;       // (j) -> s^m_{j;m}
  double s_div = 0.0;          // s^m_{;m}
  double sigma_conf = 0.0;     // r^m_m / n
  Eigen::VectorXd sigma_grad;  // d sigma_conf / dx^m
  double lambda = 0.0;         // (n-4)/2 t^m_m - (n-2) sigma^2 + s^m_{;m} - sigma_m b^m
  Eigen::MatrixXd ric_bar;     // Ricci tensor of alpha
  Eigen::VectorXd theta_k;     // d ln((2/b)^n), the Kropina volume ratio
  Eigen::MatrixXd theta_k_cov; // theta_{i;k}

  // -- contractions with y ------------------------------------------------
  static double quad(const Eigen::MatrixXd& m, const Eigen::VectorXd& y) { return y.dot(m * y); }

  double alpha2(const Eigen::VectorXd& y) const { return quad(a, y); }
  double alpha(const Eigen::VectorXd& y) const { return std::sqrt(alpha2(y)); }
  double beta(const Eigen::VectorXd& y) const { return b.dot(y); }
  double r00(const Eigen::VectorXd& y) const { return quad(r, y); }
  double e00(const Eigen::VectorXd& y) const { return quad(e, y); }
  double t00(const Eigen::VectorXd& y) const { return quad(t, y); }
  double q00(const Eigen::VectorXd& y) const { return quad(q, y); }
  double r0(const Eigen::VectorXd& y) const { return r_i.dot(y); }
  double s0(const Eigen::VectorXd& y) const { return s_i.dot(y); }
  double t0(const Eigen::VectorXd& y) const { return t_i.dot(y); }
  double q0(const Eigen::VectorXd& y) const { return q_i.dot(y); }
  double rho0(const Eigen::VectorXd& y) const { return rho_grad.dot(y); }
  Eigen::VectorXd s_up0(const Eigen::VectorXd& y) const { return s_up * y; }  // s^i_0
  double ric_bar_y(const Eigen::VectorXd& y) const { return quad(ric_bar, y); }
  double s00_check(const Eigen::VectorXd& y) const { return quad(s, y); }

  double r00_0(const Eigen::VectorXd& y) const {  // r_{00;0}
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) v += r_cov(i, j, k) * y(i) * y(j) * y(k);
    return v;
  }
  double r00_m_b(const Eigen::VectorXd& y) const {  // b^m r_{00;m}
    double v = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) v += r_cov(i, j, k) * y(i) * y(j) * b_up(k);
    return v;
  }
  double s0_0(const Eigen::VectorXd& y) const { return quad(s1_cov, y); }  // s_{0;0}
  double r0_0(const Eigen::VectorXd& y) const { return quad(r1_cov, y); }  // r_{0;0}
  double s0_m_b(const Eigen::VectorXd& y) const { return y.dot(s1_cov * b_up); }  // b^m s_{0;m}
  double div_s0(const Eigen::VectorXd& y) const { return div_s.dot(y); }  // s^m_{0;m}
  double sm_sm() const { return s_up_vec.dot(s_i); }
  double sm_r0m(const Eigen::VectorXd& y) const { return y.dot(r * s_up_vec); }  // s^m r_{0m}

  /// Spray coefficients of alpha: (1/2) gamma^i_jk y^j y^k.
  Eigen::VectorXd G_bar(const Eigen::VectorXd& y) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) g(i) += 0.5 * christoffel(i, j, k) * y(j) * y(k);
    return g;
  }

  double theta_k0(const Eigen::VectorXd& y) const { return theta_k.dot(y); }
};

namespace ab_detail {

using Jet = MultiJet;

inline double d(const Jet& f, int var) {
  MultiIndex k{};
  k[var] = 1;
  return extract_derivative(f, k);
}

/// Christoffel symbols as order-1 jets from a (order-2 jets).
inline std::vector<Jet> christoffel_jets(int n, const std::vector<Jet>& a, const std::vector<Jet>& a_inv) {
  std::vector<Jet> da(n * n * n);  // d a_ij / dx^k at [(i n + j) n + k]
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) da[(i * n + j) * n + k] = derivative(a[i * n + j], k);
  std::vector<Jet> gam;
  gam.reserve(n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet s = Jet::constant(n, 1, 0.0);
        for (int l = 0; l < n; ++l)
          s = s + a_inv[i * n + l] * (da[(l * n + j) * n + k] + da[(l * n + k) * n + j] - da[(j * n + k) * n + l]);
        gam.push_back(0.5 * s);
      }
  return gam;
}

}  // namespace ab_detail

inline Tensor3 christoffel(const RiemannianSpec& alpha, std::span<const double> x) {
  using ab_detail::Jet;
  const int n = alpha.dim();
  std::vector<Jet> xj;
  for (int i = 0; i < n; ++i) xj.push_back(Jet::variable(n, 2, i, x[i]));
  auto a = alpha.evaluate_at<Jet>(xj);
  auto a_inv = inverse(n, a);
  auto gam = ab_detail::christoffel_jets(n, a, a_inv);
  Tensor3 out(n);
  for (std::size_t k = 0; k < gam.size(); ++k) out.v[k] = gam[k].value();
  return out;
}

/// Builds the full frame at base point x. Randers-only and Kropina-only
/// quantities are filled whenever they are defined.
inline AlphaBetaFrame build_frame(const RiemannianSpec& alpha, const OneFormSpec& beta, std::span<const double> x) {
  using ab_detail::d;
  using ab_detail::Jet;
  const int n = alpha.dim();
  if (beta.dim != n) throw SpecError("alpha and beta dimensions differ");
  AlphaBetaFrame f;
  f.n = n;

  std::vector<Jet> xj;
  for (int i = 0; i < n; ++i) xj.push_back(Jet::variable(n, 2, i, x[i]));
  auto A = alpha.evaluate_at<Jet>(xj);
  {
    Eigen::MatrixXd av(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) av(i, j) = A[i * n + j].value();
    Eigen::LLT<Eigen::MatrixXd> llt(av);
    if (llt.info() != Eigen::Success) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(av, Eigen::EigenvaluesOnly);
      throw DegenerateTensor("alpha is not positive definite", es.eigenvalues()(0));
    }
  }
  auto Ainv = inverse(n, A);
  auto B = beta.evaluate_at<Jet>(xj);
  auto gam = ab_detail::christoffel_jets(n, A, Ainv);
  auto G = [&](int i, int j, int k) -> const Jet& { return gam[(i * n + j) * n + k]; };

  // b^i and b^2 as order-2 jets
  std::vector<Jet> Bup(n, Jet::constant(n, 2, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Bup[i] = Bup[i] + Ainv[i * n + j] * B[j];
  Jet B2 = Jet::constant(n, 2, 0.0);
  for (int i = 0; i < n; ++i) B2 = B2 + Bup[i] * B[i];

  // b_{i;j}, r_ij, s_ij as order-1 jets
  std::vector<Jet> nb(n * n), R(n * n), S(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet v = derivative(B[i], j);
      for (int k = 0; k < n; ++k) v = v - B[k] * G(k, i, j);
      nb[i * n + j] = v;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      R[i * n + j] = 0.5 * (nb[i * n + j] + nb[j * n + i]);
      S[i * n + j] = 0.5 * (nb[i * n + j] - nb[j * n + i]);
    }
  // r_j = b^i r_ij, s_j = b^i s_ij (order 1)
  std::vector<Jet> Ri(n, Jet::constant(n, 1, 0.0)), Si(n, Jet::constant(n, 1, 0.0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Ri[j] = Ri[j] + Bup[i] * R[i * n + j];
      Si[j] = Si[j] + Bup[i] * S[i * n + j];
    }
  Jet trace_r = Jet::constant(n, 1, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) trace_r = trace_r + Ainv[i * n + j] * R[i * n + j];

  auto val = [&](const std::vector<Jet>& v) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = v[i * n + j].value();
    return m;
  };
  auto vec = [&](const std::vector<Jet>& v) {
    Eigen::VectorXd m(n);
    for (int i = 0; i < n; ++i) m(i) = v[i].value();
    return m;
  };

  f.a = val(A);
  f.a_inv = val(Ainv);
  f.christoffel = Tensor3(n);
  for (std::size_t k = 0; k < gam.size(); ++k) f.christoffel.v[k] = gam[k].value();
  f.b = vec(B);
  f.b_up = vec(Bup);
  f.b2 = B2.value();
  f.nabla_b = val(nb);
  f.r = val(R);
  f.s = val(S);
  f.r_up = f.a_inv * f.r;
  f.s_up = f.a_inv * f.s;
  f.r_i = vec(Ri);
  f.s_i = vec(Si);
  f.s_up_vec = f.a_inv * f.s_i;
  f.r_scalar = f.b_up.dot(f.r * f.b_up);
  f.e = f.r + f.s_i * f.b.transpose() + f.b * f.s_i.transpose();
  f.t = f.s * f.s_up;              // t_ij = s_im s^m_j
  f.q = f.r_up.transpose() * f.s;  // q_ij = r^k_i s_kj
  f.t_trace = (f.a_inv * f.t).trace();
  f.t_i = f.t.transpose() * f.b_up;
  f.q_i = f.q.transpose() * f.b_up;

  f.rho = f.b2 < 1.0 ? 0.5 * std::log(1.0 - f.b2) : std::nan("");
  f.rho_grad = Eigen::VectorXd::Zero(n);
  if (f.b2 < 1.0)
    for (int m = 0; m < n; ++m) f.rho_grad(m) = -0.5 * d(B2, m) / (1.0 - f.b2);

  // covariant derivatives (values)
  f.r_cov = Tensor3(n);
  f.s_cov = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double rv = d(R[i * n + j], k), sv = d(S[i * n + j], k);
        for (int p = 0; p < n; ++p) {
          rv -= G(p, i, k).value() * R[p * n + j].value() + G(p, j, k).value() * R[i * n + p].value();
          sv -= G(p, i, k).value() * S[p * n + j].value() + G(p, j, k).value() * S[i * n + p].value();
        }
        f.r_cov(i, j, k) = rv;
        f.s_cov(i, j, k) = sv;
      }
  f.r1_cov.resize(n, n);
  f.s1_cov.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double rv = d(Ri[i], j), sv = d(Si[i], j);
      for (int p = 0; p < n; ++p) {
        rv -= G(p, i, j).value() * Ri[p].value();
        sv -= G(p, i, j).value() * Si[p].value();
      }
      f.r1_cov(i, j) = rv;
      f.s1_cov(i, j) = sv;
    }
  f.div_s = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) f.div_s(j) += f.a_inv(m, k) * f.s_cov(k, j, m);
  f.s_div = (f.a_inv * f.s1_cov.transpose()).trace();  // a^{mi} s_{i;m}
  f.sigma_conf = trace_r.value() / n;
  f.sigma_grad.resize(n);
  for (int m = 0; m < n; ++m) f.sigma_grad(m) = d(trace_r, m) / n;
  f.lambda = (n - 4) / 2.0 * f.t_trace - (n - 2) * f.sigma_conf * f.sigma_conf + f.s_div - f.sigma_grad.dot(f.b_up);

  // Ricci tensor of alpha
  f.ric_bar = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) {
        v += d(G(i, l, j), i) - d(G(i, i, j), l);
        for (int p = 0; p < n; ++p)
          v += G(i, i, p).value() * G(p, l, j).value() - G(i, l, p).value() * G(p, i, j).value();
      }
      f.ric_bar(j, l) = v;
    }
  f.ric_bar = 0.5 * (f.ric_bar + f.ric_bar.transpose());

  // theta = d ln (2/b)^n = -(n/2) d ln b^2, with its covariant derivative
  f.theta_k = Eigen::VectorXd::Zero(n);
  f.theta_k_cov = Eigen::MatrixXd::Zero(n, n);
  if (f.b2 > 0.0) {
    Jet lnb2 = math::log(B2);
    std::vector<Jet> th;
    for (int m = 0; m < n; ++m) th.push_back(-0.5 * n * derivative(lnb2, m));
    for (int i = 0; i < n; ++i) {
      f.theta_k(i) = th[i].value();
      for (int k = 0; k < n; ++k) {
        double v = d(th[i], k);
        for (int p = 0; p < n; ++p) v -= G(p, i, k).value() * th[p].value();
        f.theta_k_cov(i, k) = v;
      }
    }
  }
  return f;
}

inline AlphaBetaFrame build_frame(const MetricSpec& m, std::span<const double> x) {
  if (!m.alpha() || !m.beta()) throw SpecError("metric '" + m.name() + "' is not of (alpha, beta) type");
  m.check_domain(x);
  return build_frame(*m.alpha(), *m.beta(), x);
}

// -- Randers closed forms ---------------------------------------------------

inline Eigen::VectorXd randers_spray(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  const double al = f.alpha(y), F = al + f.beta(y);
  return f.G_bar(y) + al * f.s_up0(y) + (f.r00(y) - 2.0 * al * f.s0(y)) / (2.0 * F) * y;
}

inline double randers_ricci(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  const int n = f.n;
  const double al = f.alpha(y), a2 = al * al, F = al + f.beta(y);
  const double r00 = f.r00(y), s0 = f.s0(y);
  const double u = r00 - 2.0 * al * s0;
  return f.ric_bar_y(y) + (2.0 * al * f.div_s0(y) - 2.0 * f.t00(y) - a2 * f.t_trace) +
         (n - 1.0) * (3.0 / (4.0 * F * F) * u * u +
                      1.0 / (2.0 * F) * (4.0 * al * (f.q00(y) - al * f.t0(y)) - (f.r00_0(y) - 2.0 * al * f.s0_0(y))));
}

inline double randers_s_curvature(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  const double F = f.alpha(y) + f.beta(y);
  return (f.n + 1.0) * (f.e00(y) / (2.0 * F) - (f.s0(y) + f.rho0(y)));
}

/// Sfrak with respect to alpha's density: (r00 - 2 alpha s0) / (2F).
inline double randers_sfrak(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  const double al = f.alpha(y), F = al + f.beta(y);
  return (f.r00(y) - 2.0 * al * f.s0(y)) / (2.0 * F);
}

/// Sfrak_{|m} y^m assembled from its three pieces.
inline double randers_sfrak_horizontal(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  const double al = f.alpha(y), F = al + f.beta(y);
  const double r00 = f.r00(y), s0 = f.s0(y), u = r00 - 2.0 * al * s0;
  const double semicolon = (f.r00_0(y) - 2.0 * al * f.s0_0(y)) / (2.0 * F) - r00 / (2.0 * F * F) * u;
  const double vertical = 2.0 * al / F * (f.q00(y) - al * f.t0(y)) - al * s0 / (F * F) * u;
  const double last = u * u / (2.0 * F * F);
  return semicolon - vertical - last;
}

/// WPRic_0 with alpha's density as reference.
inline double randers_wpric(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  const double al = f.alpha(y);
  return f.ric_bar_y(y) + 2.0 * al * f.div_s0(y) - 2.0 * f.t00(y) - al * al * f.t_trace;
}

// -- Kropina closed forms ---------------------------------------------------

inline void require_kropina_cone(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  if (!(f.beta(y) > 0.0)) throw DomainError("sample outside the Kropina cone beta > 0");
  if (!(f.b2 > 0.0)) throw DomainError("Kropina frame requires b != 0");
}

inline Eigen::VectorXd kropina_spray(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  require_kropina_cone(f, y);
  const double F = f.alpha2(y) / f.beta(y);
  return f.G_bar(y) - F / 2.0 * f.s_up0(y) -
         (F * f.s0(y) + f.r00(y)) / (2.0 * f.b2 * F) * (2.0 * y - F * f.b_up);
}

inline double kropina_s_curvature(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  require_kropina_cone(f, y);
  const double F = f.alpha2(y) / f.beta(y);
  return (f.n + 1.0) / (F * f.b2) * (F * f.r0(y) - f.r00(y));
}

/// The T term of Ric = Ric_bar + T, term by term.
inline double kropina_T(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  require_kropina_cone(f, y);
  const double n = f.n;
  const double a2 = f.alpha2(y), a4 = a2 * a2, be = f.beta(y), b2 = f.b2, b4 = b2 * b2;
  const double r = f.r_scalar, r00 = f.r00(y), r0 = f.r0(y), s0 = f.s0(y);
  double T = 0.0;
  T += -a2 / (b4 * be) * s0 * r;
  T += -r / b4 * r00;
  T += a2 / (b2 * be) * f.s0_m_b(y);
  T += 1.0 / b2 * f.r00_m_b(y);
  T += (n - 2.0) / b2 * f.s0_0(y);
  T += (n - 1.0) / (b2 * a2) * be * f.r00_0(y);
  T += 1.0 / b2 * (a2 / be * s0 + r00) * (f.r_up.trace());
  T += -a2 / be * f.div_s0(y);
  T += -1.0 / b2 * f.r0_0(y);
  T += -2.0 * (2.0 * n - 3.0) / b4 * r0 * s0;
  T += -(n - 2.0) / b4 * s0 * s0;
  T += -4.0 * (n - 1.0) / (b4 * a2) * be * r00 * r0;
  T += 2.0 * (n - 1.0) / (b4 * a2) * be * r00 * s0;
  T += 3.0 * (n - 1.0) / (b4 * a4) * be * be * r00 * r00;
  T += 2.0 * n / b2 * f.q00(y);
  T += 1.0 / b4 * r0 * r0;
  T += -a2 / (b2 * be) * f.q0(y);
  T += (n - 1.0) / (b2 * be) * a2 * f.t0(y);
  T += -a4 / (2.0 * b2 * be * be) * f.sm_sm();
  T += -a2 / (b2 * be) * f.sm_r0m(y);
  T += -a4 / (4.0 * be * be) * f.t_trace;
  return T;
}

inline double kropina_ricci(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  return f.ric_bar_y(y) + kropina_T(f, y);
}

/// theta_{|0} for theta = d ln((2/b)^n): covariant part minus the spray
/// correction 2 (G^m - G_bar^m) theta_m.
inline double kropina_theta_horizontal(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  Eigen::VectorXd dG = kropina_spray(f, y) - f.G_bar(y);
  return AlphaBetaFrame::quad(f.theta_k_cov, y) - 2.0 * dG.dot(f.theta_k);
}

/// Sfrak = (F r0 - r00)/(F b^2) + theta/(n+1) with alpha's density as
/// reference.
inline double kropina_sfrak(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  const double F = f.alpha2(y) / f.beta(y);
  return (F * f.r0(y) - f.r00(y)) / (F * f.b2) + f.theta_k0(y) / (f.n + 1.0);
}

/// (n-1) Sfrak_{|m} y^m as printed, including the sign in front of the
/// theta term.
inline double kropina_sfrak_horizontal_printed(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  require_kropina_cone(f, y);
  const double n = f.n, b2 = f.b2;
  const double F = f.alpha2(y) / f.beta(y);
  const double r00 = f.r00(y), r0 = f.r0(y), s0 = f.s0(y);
  const double bracket = f.r0_0(y) - f.r00_0(y) / F + F * f.q0(y) - 2.0 * f.q00(y) +
                         2.0 / (F * b2) * (F * r0 - r00) * (s0 - r0) - 4.0 * r00 * r00 / (F * F * b2) -
                         1.0 / b2 * (F * s0 + r00) * f.r_scalar;
  return (n - 1.0) / b2 * bracket - (n - 1.0) / (n + 1.0) * kropina_theta_horizontal(f, y);
}

/// (n-1) Sfrak_{|m} y^m re-derived from the horizontal-derivative identity
/// for S and its four constituent pieces, with theta entering as +theta_{|0}.
inline double kropina_sfrak_horizontal(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  require_kropina_cone(f, y);
  const double n = f.n, b2 = f.b2;
  const double F = f.alpha2(y) / f.beta(y);
  const double r00 = f.r00(y), r0 = f.r0(y), s0 = f.s0(y);
  const double bracket = f.r0_0(y) - f.r00_0(y) / F + F * f.q0(y) - 2.0 * f.q00(y) +
                         2.0 / (F * b2) * (F * r0 - r00) * (s0 - r0) + 4.0 * r00 * (F * r0 - r00) / (F * F * b2) -
                         1.0 / b2 * (F * s0 + r00) * f.r_scalar;
  return (n - 1.0) / b2 * bracket + (n - 1.0) / (n + 1.0) * kropina_theta_horizontal(f, y);
}

/// WPRic_0 = Ric + (n-1)(Sfrak^2 + Sfrak_{|0}) from the closed-form pieces.
inline double kropina_wpric(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  const double Sf = kropina_sfrak(f, y);
  return kropina_ricci(f, y) + kropina_sfrak_horizontal(f, y) + (f.n - 1.0) * Sf * Sf;
}

/// The one-line WPRic_0 expansion as printed (it repeats the
/// -(F/b^2) s^m r_{0m} term); kept for comparison only.
inline double kropina_wpric_printed_expansion(const AlphaBetaFrame& f, const Eigen::VectorXd& y) {
  require_kropina_cone(f, y);
  const double n = f.n, b2 = f.b2, b4 = b2 * b2;
  const double F = f.alpha2(y) / f.beta(y);
  const double r00 = f.r00(y), r0 = f.r0(y), s0 = f.s0(y), r = f.r_scalar;
  const double th = f.theta_k0(y);
  double W = f.ric_bar_y(y);
  W += (n - 2.0) / b4 * (b2 * (f.r0_0(y) + f.s0_0(y)) - (r0 + s0) * (r0 + s0));
  W += (n - 1.0) / (b4 * F) * (b2 * F * F * f.t0(y) - 4.0 * r0 * r00);
  W += 2.0 / b2 * f.q00(y) - n * F / b4 * s0 * r - n / b4 * r * r00 + (n - 2.0) * F / b2 * f.q0(y);
  W += -F * f.div_s0(y) - F * F / 4.0 * f.t_trace - F / b2 * f.sm_r0m(y);
  W += F / b2 * f.s0_m_b(y) + 1.0 / b2 * f.r00_m_b(y) + 1.0 / b2 * (F * s0 + r00) * f.r_up.trace();
  W += -F * F / (2.0 * b2) * f.sm_sm() - F / b2 * f.sm_r0m(y);
  W += (n - 1.0) / (n + 1.0) *
       (kropina_theta_horizontal(f, y) + 2.0 * th / (F * b2) * (F * r0 - r00) + th * th / (n + 1.0));
  return W;
}

}  // namespace finsler
