#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "finsler/catalog.hpp"
#include "finsler/harness.hpp"
#include "finsler/volume.hpp"

using namespace finsler;

TEST(Volume, UnitBallVolumes) {
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-15);
  EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-15);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
  EXPECT_NEAR(unit_ball_volume(4), std::numbers::pi * std::numbers::pi / 2.0, 1e-14);
}

TEST(Volume, EuclideanDensityIsOne) {
  for (int n : {2, 3}) {
    std::vector<double> x(n, 0.1);
    EXPECT_NEAR(volume_density(MetricSpec::euclidean(n), VolumeSpec::busemann_hausdorff(), x), 1.0, 1e-12);
  }
}

TEST(Volume, ConstantKropinaIsFourInThePlane) {
  EXPECT_NEAR(volume_density(builtin_metric("kropina-const"), VolumeSpec::busemann_hausdorff(), {0.0, 0.0}), 4.0,
              4e-6);
}

// Randers: (1 - b^2)^{(n+1)/2}; checked against quadrature for several |b|.
TEST(Volume, RandersRatioByQuadrature) {
  for (double b : {0.0, 0.2, 0.5, 0.8}) {
    const MetricSpec m = constant_randers_metric({b, 0.0});
    const double q = volume_density(m, VolumeSpec::busemann_hausdorff(), {0.0, 0.0});
    EXPECT_NEAR(q, std::pow(1.0 - b * b, 1.5), 1e-6 * q) << b;
  }
}

TEST(Volume, ClosedFormsOnRandomMetrics) {
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    for (Family fam : {Family::Randers, Family::Kropina}) {
      const MetricSpec m = random_metric(fam, 2 + seed % 2, seed);
      std::vector<double> x(m.dim(), 0.1);
      const double q = volume_density(m, VolumeSpec::busemann_hausdorff(), x);
      const double c = volume_density(m, VolumeSpec::closed_form_for(m), x);
      EXPECT_NEAR(q, c, (m.dim() == 2 ? 1e-6 : 1e-5) * c) << m.name();
    }
}

TEST(Volume, ClosedFormNeedsMatchingStructure) {
  EXPECT_THROW(volume_density(funk_metric(2), VolumeSpec::closed_form_kropina(), {0.0, 0.0}), Error);
  EXPECT_THROW(VolumeSpec::constant_density(0.0), SpecError);
}

TEST(Volume, RiemannianDensityIsSqrtDet) {
  const MetricSpec m = builtin_metric("exp-warped");
  EXPECT_NEAR(volume_density(m, VolumeSpec::riemannian_density(), {0.3, 0.0}), std::exp(0.3), 1e-14);
  EXPECT_NEAR(volume_density(m, VolumeSpec::busemann_hausdorff(), {0.3, 0.0}), std::exp(0.3), 1e-8);
}
