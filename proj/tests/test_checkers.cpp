#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "finsler/catalog.hpp"
#include "finsler/checkers.hpp"
#include "finsler/harness.hpp"

using namespace finsler;

namespace {

// Largest |WPRic_0| of the generic pipeline over a grid, alpha reference.
double generic_max(const MetricSpec& m, const CheckGrid& g) { return scen::generic_wpric_on_grid(m, g); }

ProjectiveData data(double A, double B, double C) {
  // c = 0, eta = 0, P = 0 gives A = sigma, B = -c0, C = P0 - eta0
  ProjectiveData pd;
  pd.sigma_iso = A;
  pd.c0 = -B;
  pd.P0 = C;
  return pd;
}

}  // namespace

TEST(Grid, DefaultShapeAndDomain) {
  const MetricSpec f = funk_metric(3);
  CheckGrid g = default_grid(f);
  EXPECT_EQ(g.points.size(), 8u);
  EXPECT_EQ(g.directions.size(), 16u);
  for (const auto& d : g.directions) {
    double q = 0.0;
    for (double v : d) q += v * v;
    EXPECT_NEAR(q, 1.0, 1e-14);
  }
  for (const auto& x : g.points) EXPECT_NO_THROW(f.check_domain(x));
}

TEST(RandersChecker, ConstantWindIsFlat) {
  const MetricSpec m = builtin_metric("randers-const");
  CheckGrid g = default_grid(m);
  auto rep = check_randers_wpric_flat(m, g);
  EXPECT_TRUE(rep.verdict);
  EXPECT_EQ(rep.samples, 8 * 16);
  EXPECT_LE(generic_max(m, g), 1e-9);
}

TEST(RandersChecker, FunkIsNotFlat) {
  const MetricSpec m = funk_metric(2);
  auto rep = check_randers_wpric_flat(m, default_grid(m));
  EXPECT_FALSE(rep.verdict);
  EXPECT_FALSE(rep.ric.pass);
  EXPECT_GT(rep.max_wpric, 1e-3);
}

TEST(RandersChecker, RejectsOtherStructures) {
  EXPECT_THROW(check_randers_wpric_flat(funk_metric(2).alpha_metric(), default_grid(funk_metric(2))), SpecError);
  EXPECT_THROW(check_kropina_wpric_flat(funk_metric(2), default_grid(funk_metric(2))), SpecError);
}

// A true verdict means the generic WPRic_0 vanishes on the grid; a false one
// means some grid sample is away from zero.
TEST(CheckerProperty, RandersVerdictIsSound) {
  std::vector<MetricSpec> ms = {builtin_metric("randers-const"), builtin_metric("closed-beta"),
                                builtin_metric("rotational"), funk_metric(2)};
  for (std::uint64_t seed = 0; seed < 4; ++seed) ms.push_back(random_metric(Family::Randers, 2 + seed % 2, seed));
  for (const auto& m : ms) {
    CheckGrid g = default_grid(m, 4, 8);
    auto rep = check_randers_wpric_flat(m, g);
    const double w = generic_max(m, g);
    if (rep.verdict)
      EXPECT_LE(w, 1e-7) << m.name();
    else
      EXPECT_GT(w, 1e-7) << m.name();
  }
}

TEST(CheckerProperty, KropinaVerdictIsSound) {
  std::vector<MetricSpec> ms = {builtin_metric("kropina-const"), builtin_metric("kropina-funk-alpha")};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    ms.push_back(random_constant_kropina(2 + seed % 2, seed));
    ms.push_back(random_conformal_kropina(2 + seed % 2, seed, seed % 2 == 0));
    ms.push_back(random_metric(Family::Kropina, 2 + seed % 2, seed));
  }
  for (const auto& m : ms) {
    CheckGrid g = default_grid(m, 4, 12);
    auto rep = check_kropina_wpric_flat(m, g);
    const double w = generic_max(m, g);
    if (rep.verdict)
      EXPECT_LE(w, 1e-7) << m.name();
    else
      EXPECT_GT(w, 1e-7) << m.name();
  }
}

TEST(KropinaChecker, ConformalGate) {
  auto c = check_kropina_wpric_flat(builtin_metric("kropina-const"), default_grid(builtin_metric("kropina-const")));
  EXPECT_TRUE(c.applicable);
  EXPECT_TRUE(c.verdict);
  const MetricSpec nc = random_metric(Family::Kropina, 2, 9);
  auto r = check_kropina_wpric_flat(nc, default_grid(nc));
  EXPECT_FALSE(r.applicable);
  EXPECT_FALSE(r.verdict);
  EXPECT_GT(r.conformal_deviation, kConformalityTolerance);
}

TEST(IsotropicS, AllOrNone) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const MetricSpec c = random_conformal_kropina(2 + seed % 2, seed, true);
    auto rc = check_isotropic_s_equivalences(c, default_grid(c, 4, 12));
    EXPECT_TRUE(rc.all_or_none);
    EXPECT_TRUE(rc.isotropic && rc.conformal_r && rc.s_zero && rc.conformal_b);
    const MetricSpec n = random_metric(Family::Kropina, 2 + seed % 2, seed);
    auto rn = check_isotropic_s_equivalences(n, default_grid(n, 4, 12));
    EXPECT_TRUE(rn.all_or_none);
    EXPECT_FALSE(rn.isotropic || rn.conformal_r || rn.s_zero || rn.conformal_b);
  }
}

TEST(ProjectiveFactor, FunkHalfF) {
  const MetricSpec m = funk_metric(2);
  std::mt19937_64 rng(4);
  SamplerOptions so;
  so.ball_radius = 0.8;
  for (const auto& s : draw_samples(m, rng, 10, so)) {
    auto pf = extract_projective_factor(m, s);
    ASSERT_TRUE(pf.flat);
    const double F = m.F(s.x, s.y);
    EXPECT_NEAR(pf.P, 0.5 * F, 1e-10 * F);
    ProjectiveData pd;
    pd.P = pf.P;
    pd.P0 = pf.P0;
    const double ric = ricci(m, s);
    EXPECT_NEAR(ric, projectively_flat_ricci(pd, 2), 1e-6 * std::max(std::abs(ric), F * F));
  }
}

TEST(ProjectiveFactor, WarpedChartIsNotFlat) {
  auto pf = extract_projective_factor(builtin_metric("exp-warped"), {{0.1, 0.1}, {1.0, 0.5}});
  EXPECT_FALSE(pf.flat);
  EXPECT_GT(pf.mismatch, 1e-3);
}

TEST(Reconstruction, WorkedCases) {
  auto r = reconstruct_metric_from_projective_data(data(1.0, 0.0, -1.0));
  EXPECT_EQ(r.kind, ReconstructionCase::Randers);
  EXPECT_DOUBLE_EQ(r.F, 1.0);
  auto k = reconstruct_metric_from_projective_data(data(0.0, 2.0, 3.0));
  EXPECT_EQ(k.kind, ReconstructionCase::Kropina);
  EXPECT_DOUBLE_EQ(k.F, 1.5);
  EXPECT_STREQ(to_string(k.kind), "kropina");
}

TEST(Reconstruction, Errors) {
  EXPECT_THROW(reconstruct_metric_from_projective_data(data(0.0, 0.0, 1.0)), DomainError);   // degenerate
  EXPECT_THROW(reconstruct_metric_from_projective_data(data(1.0, 0.0, 1.0)), DomainError);   // disc < 0
  EXPECT_THROW(reconstruct_metric_from_projective_data(data(0.0, 2.0, -3.0)), DomainError);  // F < 0
}

TEST(ReconstructionProperty, ResidualVanishes) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    auto r = reconstruct_metric_from_projective_data(scen::random_projective_data(rng, k % 2 == 0));
    EXPECT_GT(r.F, 0.0);
    EXPECT_LE(std::abs(r.residual), 1e-10);
  }
}
