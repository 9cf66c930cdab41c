#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "finsler/alpha_beta.hpp"
#include "finsler/catalog.hpp"
#include "finsler/core.hpp"
#include "finsler/harness.hpp"

using namespace finsler;

namespace {

Eigen::VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

double rel(double a, double b, double floor = 1e-9) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor}); }

struct Pick {
  MetricSpec m;
  TangentSample s;
};

std::vector<Pick> picks(Family fam, int metrics, int per, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Pick> out;
  for (int k = 0; k < metrics; ++k) {
    MetricSpec m = random_metric(fam, 2 + k % 2, rng());
    for (auto& s : draw_samples(m, rng, per)) out.push_back({m, s});
  }
  return out;
}

}  // namespace

TEST(AlphaBetaFrame, AlgebraicIdentities) {
  for (const auto& [m, s] : picks(Family::Randers, 6, 3, 1)) {
    AlphaBetaFrame f = build_frame(m, s.x);
    Eigen::VectorXd y = vec(s.y);
    EXPECT_TRUE(f.r.isApprox(f.r.transpose(), 1e-15));
    EXPECT_TRUE(f.s.isApprox(-f.s.transpose(), 1e-15));
    EXPECT_NEAR(f.s00_check(y), 0.0, 1e-15);
    EXPECT_NEAR(f.e00(y) - f.r00(y) - 2.0 * f.s0(y) * f.beta(y), 0.0, 1e-14);
    EXPECT_NEAR(f.b2, f.b.dot(f.a.ldlt().solve(f.b)), 1e-14);
  }
}

// S / (n+1) + rho_0 = (r00 - 2 alpha s0) / (2F).
TEST(AlphaBetaFrame, RandersSfrakReduction) {
  for (const auto& [m, s] : picks(Family::Randers, 8, 3, 2)) {
    AlphaBetaFrame f = build_frame(m, s.x);
    Eigen::VectorXd y = vec(s.y);
    const double F = f.alpha(y) + f.beta(y);
    const double lhs = randers_s_curvature(f, y) / (f.n + 1.0) + f.rho0(y);
    EXPECT_NEAR(lhs, (f.r00(y) - 2.0 * f.alpha(y) * f.s0(y)) / (2.0 * F), 1e-10);
  }
}

TEST(AlphaBetaFrame, ConstantBetaIsTrivial) {
  AlphaBetaFrame f = build_frame(builtin_metric("randers-const"), std::vector<double>{0.1, 0.2});
  EXPECT_NEAR(f.r.norm() + f.s.norm(), 0.0, 1e-15);
  EXPECT_NEAR(f.rho, 0.5 * std::log(0.75), 1e-15);
}

// Closed forms against the generic pipeline.
TEST(AlphaBetaOracle, Randers) {
  for (const auto& [m, s] : picks(Family::Randers, 10, 2, 3)) {
    AlphaBetaFrame f = build_frame(m, s.x);
    Eigen::VectorXd y = vec(s.y);
    auto B = compute_bundle(m, s, {VolumeSpec::closed_form_randers(), ReferenceVolume{}});
    EXPECT_LE((randers_spray(f, y) - B.G).lpNorm<Eigen::Infinity>(), 1e-6 * std::max(1.0, B.G.lpNorm<Eigen::Infinity>()));
    EXPECT_LE(rel(randers_ricci(f, y), B.Ric), 1e-6);
    EXPECT_LE(rel(randers_s_curvature(f, y), B.S, B.F), 1e-6);
    EXPECT_LE(rel(randers_wpric(f, y), B.WPRic0, std::abs(B.Ric)), 1e-6);
  }
}

TEST(AlphaBetaOracle, Kropina) {
  for (const auto& [m, s] : picks(Family::Kropina, 10, 2, 4)) {
    AlphaBetaFrame f = build_frame(m, s.x);
    Eigen::VectorXd y = vec(s.y);
    auto B = compute_bundle(m, s, {VolumeSpec::closed_form_kropina(), ReferenceVolume{}});
    EXPECT_LE((kropina_spray(f, y) - B.G).lpNorm<Eigen::Infinity>(), 1e-6 * std::max(1.0, B.G.lpNorm<Eigen::Infinity>()));
    EXPECT_LE(rel(kropina_ricci(f, y), B.Ric), 1e-6);
    EXPECT_LE(rel(kropina_s_curvature(f, y), B.S, B.F), 1e-6);
    EXPECT_LE(rel(kropina_sfrak_horizontal(f, y), (f.n - 1.0) * B.Sfrak_h, B.F * B.F), 1e-6);
    EXPECT_LE(rel(kropina_wpric(f, y), B.WPRic0, std::abs(B.Ric)), 1e-6);
  }
}

// The long expanded form of the Kropina WPRic_0 misses two terms. Adding
// them back reproduces the generic value.
TEST(AlphaBetaOracle, KropinaExpandedFormMissesTwoTerms) {
  double worst_raw = 0.0;
  for (const auto& [m, s] : picks(Family::Kropina, 6, 2, 5)) {
    AlphaBetaFrame f = build_frame(m, s.x);
    Eigen::VectorXd y = vec(s.y);
    auto B = compute_bundle(m, s, {VolumeSpec::closed_form_kropina(), ReferenceVolume{}});
    const double F = f.alpha2(y) / f.beta(y), b4 = f.b2 * f.b2;
    const double raw = kropina_wpric_printed_expansion(f, y);
    const double fixed = raw + F / f.b2 * f.sm_r0m(y) + 4.0 * (f.n - 1.0) * f.r0(y) * f.r00(y) / (F * b4);
    EXPECT_LE(rel(fixed, B.WPRic0, std::abs(B.Ric)), 1e-8);
    worst_raw = std::max(worst_raw, rel(raw, B.WPRic0, std::abs(B.Ric)));
  }
  EXPECT_GT(worst_raw, 1e-3);
}

TEST(AlphaBetaOracle, KropinaOutsideConeThrows) {
  AlphaBetaFrame f = build_frame(builtin_metric("kropina-const"), std::vector<double>{0.0, 0.0});
  Eigen::Vector2d y(-1.0, 0.2);
  EXPECT_THROW(kropina_spray(f, y), DomainError);
  EXPECT_THROW(kropina_ricci(f, y), DomainError);
}

// Closed beta: the weighted Ricci curvature is the Ricci curvature of alpha.
TEST(AlphaBetaOracle, ClosedBetaWeightedRicci) {
  const MetricSpec m = builtin_metric("closed-beta");
  std::mt19937_64 rng(6);
  for (const auto& s : draw_samples(m, rng, 5)) {
    AlphaBetaFrame f = build_frame(m, s.x);
    Eigen::VectorXd y = vec(s.y);
    EXPECT_NEAR(f.s.norm(), 0.0, 1e-14);
    auto B = compute_bundle(m, s, {VolumeSpec::closed_form_randers(), ReferenceVolume{}});
    EXPECT_NEAR(B.WPRic0, f.ric_bar_y(y), 1e-8 * std::max(1.0, std::abs(B.Ric)));
  }
}
