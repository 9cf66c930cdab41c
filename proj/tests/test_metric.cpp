#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "finsler/catalog.hpp"
#include "finsler/metric.hpp"
#include "finsler/metric_file.hpp"

using namespace finsler;

namespace {

std::string data(const std::string& f) { return std::string(FINSLER_DATA_DIR) + "/" + f; }

MetricSpec randers_const(double b1) {
  OneFormSpec b{2, {Expr::lit(b1), Expr::lit(0.0)}};
  return MetricSpec::randers(RiemannianSpec::identity(2), b);
}

}  // namespace

TEST(Metric, RandersValue) {
  const MetricSpec m = randers_const(0.5);
  EXPECT_DOUBLE_EQ(m.F({0.0, 0.0}, {1.0, 0.0}), 1.5);
  EXPECT_DOUBLE_EQ(m.F({0.0, 0.0}, {-1.0, 0.0}), 0.5);
  EXPECT_DOUBLE_EQ(m.F({0.0, 0.0}, {0.0, 2.0}), 2.0);
}

TEST(Metric, KropinaValueAndCone) {
  const MetricSpec m = constant_kropina_metric();
  EXPECT_DOUBLE_EQ(m.F({0.0, 0.0}, {1.0, 1.0}), 2.0);
  EXPECT_THROW(m.F({0.0, 0.0}, {-1.0, 1.0}), DomainError);
  EXPECT_THROW(m.check_sample(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 1.0}), DomainError);
}

TEST(Metric, FunkValue) {
  const MetricSpec m = funk_metric(2);
  // alpha = 1/0.91, beta = 0.3/0.91 at x = (0.3, 0), y = (1, 0)
  EXPECT_NEAR(m.F({0.3, 0.0}, {1.0, 0.0}), 1.0 / 0.7, 1e-14);
  EXPECT_THROW(m.check_domain(std::vector<double>{1.0, 0.0}), DomainError);
}

TEST(Metric, SampleValidation) {
  const MetricSpec m = MetricSpec::euclidean(2);
  EXPECT_THROW(m.check_sample(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0}), DomainError);
  EXPECT_THROW(m.check_sample(std::vector<double>{0.0}, std::vector<double>{1.0, 0.0}), DomainError);
  EXPECT_NO_THROW(m.check_sample(std::vector<double>{0.1, 0.2}, std::vector<double>{1.0, 0.0}));
}

TEST(Metric, ConstructionRejectsBadInput) {
  EXPECT_THROW(randers_const(1.2), SpecError);
  RiemannianSpec bad(2);
  bad.set(0, 0, Expr::lit(-1.0));
  EXPECT_THROW(MetricSpec::riemannian(bad), SpecError);
  EXPECT_THROW(MetricSpec::general(2, parse("y1^2 + y2^2")), SpecError);  // not 1-homogeneous
  EXPECT_THROW(MetricSpec::general(2, parse("sqrt(y1^2 + y3^2)")), SpecError);
  RiemannianSpec ydep(2);
  ydep.set(0, 0, parse("1 + y1^2"));
  EXPECT_THROW(MetricSpec::riemannian(ydep), SpecError);
  EXPECT_THROW(MetricSpec::euclidean(5), SpecError);
}

TEST(Metric, HomogeneityOfCatalog) {
  for (const auto& e : catalog_entries()) {
    const MetricSpec m = e.make();
    std::vector<double> x(m.dim(), 0.05), y(m.dim(), 0.0), y3(m.dim(), 0.0);
    y[0] = 1.0;
    y[m.dim() - 1] += 0.4;
    for (int i = 0; i < m.dim(); ++i) y3[i] = 3.0 * y[i];
    EXPECT_NEAR(m.F(x, y3), 3.0 * m.F(x, y), 1e-12 * m.F(x, y)) << e.name;
  }
}

TEST(Metric, BuiltinLookup) {
  EXPECT_EQ(builtin_metric("funk3").dim(), 3);
  EXPECT_EQ(builtin_metric("quartic22").dim(), 4);
  EXPECT_THROW(builtin_metric("nope"), SpecError);
}

TEST(MetricFile, ParsesEveryDataFile) {
  struct Case {
    const char* file;
    Structure s;
    int dim;
  };
  for (const Case& c : {Case{"randers_const.metric", Structure::Randers, 2},
                        Case{"randers_warped.metric", Structure::Randers, 2},
                        Case{"kropina_const.metric", Structure::Kropina, 2}, Case{"kropina3.metric", Structure::Kropina, 3},
                        Case{"poincare.metric", Structure::Riemannian, 2}, Case{"funk2.metric", Structure::General, 2}}) {
    const MetricSpec m = load_metric_file(data(c.file));
    EXPECT_EQ(m.structure(), c.s) << c.file;
    EXPECT_EQ(m.dim(), c.dim) << c.file;
  }
}

TEST(MetricFile, FileMatchesBuiltin) {
  const MetricSpec f = load_metric_file(data("funk2.metric"));
  const MetricSpec b = funk_metric(2);
  for (auto [x, y] : {std::pair{std::vector<double>{0.3, 0.0}, std::vector<double>{1.0, 0.0}},
                      std::pair{std::vector<double>{-0.2, 0.5}, std::vector<double>{0.3, -1.0}}})
    EXPECT_NEAR(f.F(x, y), b.F(x, y), 1e-14);
}

TEST(MetricFile, MirrorsOffDiagonalEntries) {
  const MetricSpec m = parse_metric_text("dim = 2\nkind = riemannian\na[2][1] = 0.25\n");
  EXPECT_DOUBLE_EQ(m.alpha()->matrix(std::vector<double>{0.0, 0.0})(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(m.F({0.0, 0.0}, {1.0, 1.0}), std::sqrt(2.5));
}

TEST(MetricFile, Errors) {
  auto msg = [](const std::string& text) {
    try {
      parse_metric_text(text);
    } catch (const SpecError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(msg("dim = 2\nkind = randers\nb[1] = 0.1\nb[3] = 0\n").find("dimension mismatch"), std::string::npos);
  EXPECT_NE(msg("dim = 2\nkind = randers\nb[1] = 0.1\n").find("missing b[2]"), std::string::npos);
  EXPECT_NE(msg("dim = 2\nkind = randers\ncolor = red\n").find("line 3"), std::string::npos);
  EXPECT_NE(msg("dim = 2\nkind = riemannian\na[1][2] = 0\na[2][1] = 0\n").find("duplicate"), std::string::npos);
  EXPECT_NE(msg("dim = two\nkind = riemannian\n").find("integer"), std::string::npos);
  EXPECT_NE(msg("dim = 2\nkind = finsler\n").find("unknown kind"), std::string::npos);
  EXPECT_NE(msg("dim = 2\nkind = general\n").find("requires 'F'"), std::string::npos);
  EXPECT_NE(msg("dim = 2\nkind = riemannian\na[1][1] = 1 +\n").find("line 3"), std::string::npos);
  EXPECT_NE(msg("kind = riemannian\n").find("missing 'dim'"), std::string::npos);
  EXPECT_THROW(load_metric_file(data("does_not_exist.metric")), SpecError);
}
