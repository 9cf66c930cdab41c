#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "finsler/harness.hpp"

using namespace finsler;

TEST(RandomMetric, Deterministic) {
  for (Family fam : {Family::Randers, Family::Kropina}) {
    const MetricSpec a = random_metric(fam, 2, 0), b = random_metric(fam, 2, 0);
    std::mt19937_64 rng(1);
    for (const auto& s : draw_samples(a, rng, 20)) EXPECT_EQ(a.F(s.x, s.y), b.F(s.x, s.y));
  }
}

TEST(RandomMetric, RandersWindBound) {
  const MetricSpec m = random_metric(Family::Randers, 2, 0);
  for (const auto& x : harness_detail::box_grid(2, 11, 0.5)) {
    AlphaBetaFrame f = build_frame(m, x);
    EXPECT_LT(f.b2, 0.5);
  }
}

TEST(RandomMetric, FiftySeedsPassGates) {
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (Family fam : {Family::Randers, Family::Kropina})
      for (int n : {2, 3}) {
        const MetricSpec m = random_metric(fam, n, seed);
        for (const auto& x : harness_detail::box_grid(n, 3, 0.5)) {
          Eigen::MatrixXd a = m.alpha()->matrix(x);
          EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues()(0), 0.0);
        }
      }
  EXPECT_THROW(random_metric(Family::Randers, 4, 0), SpecError);
}

TEST(Sampler, RespectsDomains) {
  std::mt19937_64 rng(1);
  const MetricSpec k = builtin_metric("kropina-const");
  for (const auto& s : draw_samples(k, rng, 50)) EXPECT_GT(s.y[0], 0.0);
  SamplerOptions so;
  so.ball_radius = 0.9;
  for (const auto& s : draw_samples(funk_metric(2), rng, 50, so)) EXPECT_LT(std::hypot(s.x[0], s.x[1]), 0.9);
}

TEST(Sampler, ExhaustionIsReported) {
  std::mt19937_64 rng(2);
  SamplerOptions so;
  so.half_width = 50.0;
  EXPECT_THROW(draw_samples(funk_metric(3), rng, 10, so), SamplerExhausted);
}

TEST(Scenarios, SuiteAllCoversTheList) {
  const std::vector<std::string> want = {
      "funk-inequality", "funk-s-curvature", "riemannian-s-zero", "randers-oracle", "kropina-oracle",
      "closed-beta-wpric", "thm12-positive", "thm12-negative", "thm13-positive", "thm13-negative",
      "remark52-equivalences", "example1-quartic", "example3-baoshen", "example4-cs", "projflat-ricci",
      "reconstruct-T1", "jet-vs-fd", "volume-closed-vs-quadrature"};
  std::set<std::string> have;
  for (const Scenario* s : scenario_suite("all")) have.insert(s->name);
  EXPECT_EQ(have, std::set<std::string>(want.begin(), want.end()));
  EXPECT_EQ(scenario_suite("funk-inequality").size(), 1u);
  EXPECT_THROW(scenario_suite("nope"), SpecError);
}

TEST(Scenarios, ReportIsDeterministic) {
  for (const char* name : {"randers-oracle", "kropina-oracle", "reconstruct-T1", "thm13-negative"}) {
    const Scenario* sc = find_scenario(name);
    ASSERT_NE(sc, nullptr);
    const auto a = run_scenario(*sc, 42, 10).to_json(false).dump();
    const auto b = run_scenario(*sc, 42, 10).to_json(false).dump();
    EXPECT_EQ(a, b) << name;
  }
  const Scenario* sc = find_scenario("randers-oracle");
  EXPECT_NE(run_scenario(*sc, 1, 10).to_json(false).dump(), run_scenario(*sc, 2, 10).to_json(false).dump());
}

TEST(Scenarios, ReportFields) {
  auto r = run_scenario(*find_scenario("riemannian-s-zero"), 3);
  EXPECT_TRUE(r.pass());
  auto j = r.to_json();
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["generator"], "mt19937_64");
  EXPECT_EQ(j["seed"], 3);
  EXPECT_TRUE(j.contains("elapsed_ms"));
  EXPECT_FALSE(r.to_json(false).contains("elapsed_ms"));
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("max_abs"));
    EXPECT_TRUE(c.contains("max_rel"));
    EXPECT_TRUE(c.contains("tol"));
  }
}

TEST(Scenarios, ToleranceOverrideSparesPinnedChecks) {
  auto r = run_scenario(*find_scenario("funk-inequality"), 1, 5, 0.25);
  for (const auto& c : r.checks) {
    if (c.name == "wpric-minus-ric-formula") EXPECT_EQ(c.tol, 0.25);
    if (c.name == "wpric-le-ric") EXPECT_EQ(c.tol, 0.0);
  }
}

TEST(Scenarios, FailuresAndInformationalChecks) {
  VerificationReport r;
  CheckResult ok{"a", 0, 0, 1e-6, 0, true};
  CheckResult note{"b", 1, 1, 1e-6, 0, false, true};
  r.checks = {ok, note};
  EXPECT_TRUE(r.pass());
  CheckResult bad{"c", 0, 0, 1e-6, 0.0};
  bad.add(1.0, 1.0);
  EXPECT_FALSE(bad.pass);
  r.checks.push_back(bad);
  EXPECT_FALSE(r.pass());
  VerificationReport e;
  e.error = "sampler exhausted";
  EXPECT_FALSE(e.pass());
}

TEST(CheckResult, FloorAndScale) {
  CheckResult c{"x", 0, 0, 1e-6, 1e-9};
  c.add(5e-10, 0.0);
  EXPECT_TRUE(c.pass);
  c.add(1e-6, 2.0);
  EXPECT_TRUE(c.pass);
  c.add(3e-6, 2.0);
  EXPECT_FALSE(c.pass);
  EXPECT_DOUBLE_EQ(c.max_abs, 3e-6);
  EXPECT_DOUBLE_EQ(c.max_rel, 1.5e-6);
}
