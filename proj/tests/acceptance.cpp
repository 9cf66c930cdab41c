// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is 0 only if every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "finsler/alpha_beta.hpp"
#include "finsler/catalog.hpp"
#include "finsler/core.hpp"
#include "finsler/harness.hpp"

using namespace finsler;

namespace {

constexpr std::uint64_t kSeed = 20240601;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Line {
  int id;
  std::string title;
  bool pass;
  std::string detail;
};

std::vector<Line> lines;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  lines.push_back({id, title, pass, detail});
  std::printf("%s  %2d  %-34s %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Runs registered scenarios at their default sample counts and pinned
// tolerances; the verdict is the conjunction of their non-informational checks.
struct ScenarioOutcome {
  bool pass = true;
  double seconds = 0.0;
  std::string failed;
};

ScenarioOutcome scenarios(std::initializer_list<const char*> names, double limit_s = 60.0) {
  ScenarioOutcome out;
  for (const char* n : names) {
    const Scenario* sc = find_scenario(n);
    if (!sc) {
      out.pass = false;
      out.failed += std::string(" missing:") + n;
      continue;
    }
    VerificationReport r = run_scenario(*sc, kSeed);
    const double s = r.elapsed_ms / 1000.0;
    out.seconds += s;
    if (!r.pass() || s > limit_s) {
      out.pass = false;
      out.failed += std::string(" ") + n;
      for (const auto& c : r.checks)
        if (!c.pass && !c.informational) out.failed += "[" + c.name + " " + fmt("%.3g", c.max_rel) + "]";
      if (!r.error.empty()) out.failed += "[" + r.error + "]";
    }
  }
  return out;
}

std::string scenario_detail(const ScenarioOutcome& o) {
  return fmt("%.2f s", o.seconds) + (o.failed.empty() ? "" : "; failed:" + o.failed);
}

double rel(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Funk, n = 2: S = 3F/2 and the weighted inequality on one sample set.
void funk_criteria() {
  const MetricSpec m = funk_metric(2);
  std::mt19937_64 rng(kSeed);
  SamplerOptions so;
  so.ball_radius = 0.9;
  const auto t0 = Clock::now();
  double s_rel = 0.0, formula_rel = 0.0, ineq = -1e300;
  for (const auto& s : draw_samples(m, rng, 100, so)) {
    auto B = compute_bundle(m, s, {VolumeSpec::busemann_hausdorff(), ReferenceVolume{}});
    const double a = std::sqrt(m.alpha_squared<double>(s.x, s.y)), b = m.beta_value<double>(s.x, s.y);
    s_rel = std::max(s_rel, std::abs(B.S - 1.5 * B.F) / B.F);
    formula_rel = std::max(formula_rel, std::abs(B.WPRic0 - B.Ric - (b - a) * (3.0 * a + b) / 4.0) / (B.F * B.F));
    ineq = std::max(ineq, B.WPRic0 - B.Ric);
  }
  const double t = seconds_since(t0);
  report(1, "Funk S-curvature", s_rel <= 1e-6 && t <= 10.0,
         fmt("max |S - 1.5F|/F = %.2e (tol 1e-6), %.2f s (limit 10 s)", s_rel, t));
  report(2, "Funk weighted inequality", formula_rel <= 1e-6 && ineq <= 1e-9 && t <= 10.0,
         fmt("formula residual/F^2 = %.2e (tol 1e-6), max(WPRic0 - Ric) = %.3g (<= 1e-9), %.2f s", formula_rel, ineq, t));
}

// 50 random metrics, n alternating 2 and 3, 20 samples each.
void oracle_criterion(int id, Family fam) {
  const bool R = fam == Family::Randers;
  std::mt19937_64 rng(kSeed + id);
  const auto t0 = Clock::now();
  double spray = 0.0, ric = 0.0, S = 0.0, wp = 0.0;
  int samples = 0;
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 2;
    const MetricSpec m = random_metric(fam, n, rng());
    for (const auto& s : draw_samples(m, rng, 20)) {
      auto B = compute_bundle(m, s, {VolumeSpec::closed_form_for(m), ReferenceVolume{}});
      AlphaBetaFrame f = build_frame(m, s.x);
      Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(s.y.data(), n);
      Eigen::VectorXd G = R ? randers_spray(f, y) : kropina_spray(f, y);
      const double gs = std::max({G.lpNorm<Eigen::Infinity>(), B.G.lpNorm<Eigen::Infinity>(), 1e-9});
      spray = std::max(spray, (G - B.G).lpNorm<Eigen::Infinity>() / gs);
      ric = std::max(ric, rel(R ? randers_ricci(f, y) : kropina_ricci(f, y), B.Ric, 1e-9));
      S = std::max(S, rel(R ? randers_s_curvature(f, y) : kropina_s_curvature(f, y), B.S, std::max(1e-9, 1e-3 * B.F)));
      wp = std::max(wp, rel(R ? randers_wpric(f, y) : kropina_wpric(f, y), B.WPRic0, 1e-9));
      ++samples;
    }
  }
  const double t = seconds_since(t0);
  const bool ok = spray <= 1e-6 && ric <= 1e-6 && S <= 1e-6 && wp <= 1e-6 && t <= 60.0 && samples == 1000;
  report(id, R ? "Randers oracle equivalence" : "Kropina oracle equivalence", ok,
         fmt("max rel: spray %.1e, Ric %.1e, S %.1e, ", spray, ric, S) +
             fmt("WPRic0 %.1e (tol 1e-6); %.0f samples, %.2f s", wp, samples, t));
}

// Constant-b closed forms on a sweep of |b|, plus the randomized scenario.
void volume_criterion() {
  double worst2 = 0.0, worst3 = 0.0;
  for (double b : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (int n : {2, 3}) {
      std::vector<double> bv(n, 0.0), x(n, 0.0);
      bv[0] = b;
      const MetricSpec r = constant_randers_metric(bv);
      const double qr = volume_density(r, VolumeSpec::busemann_hausdorff(), x);
      const double er = std::pow(1.0 - b * b, (n + 1) / 2.0);
      std::vector<double> kv(n, 0.0);
      kv[0] = 2.0 * b;
      const MetricSpec k = constant_kropina_metric(kv);
      const double qk = volume_density(k, VolumeSpec::busemann_hausdorff(), x);
      const double ek = std::pow(2.0 / (2.0 * b), n);
      double& w = n == 2 ? worst2 : worst3;
      w = std::max({w, std::abs(qr - er) / er, std::abs(qk - ek) / ek});
    }
  }
  auto sc = scenarios({"volume-closed-vs-quadrature"});
  report(5, "Volume closed forms", worst2 <= 1e-6 && worst3 <= 1e-5 && sc.pass,
         fmt("constant b sweep: n=2 %.1e (tol 1e-6), n=3 %.1e (tol 1e-5); random: ", worst2, worst3) +
             scenario_detail(sc));
}

void scenario_criterion(int id, const std::string& title, std::initializer_list<const char*> names) {
  auto o = scenarios(names);
  std::string list;
  for (const char* n : names) list += (list.empty() ? "" : ", ") + std::string(n);
  report(id, title, o.pass, list + ": " + scenario_detail(o));
}

}  // namespace

int main() {
  std::printf("acceptance run, seed %llu, generator %s\n", static_cast<unsigned long long>(kSeed), kGeneratorName);
  funk_criteria();
  oracle_criterion(3, Family::Randers);
  oracle_criterion(4, Family::Kropina);
  volume_criterion();
  scenario_criterion(6, "Randers flatness checker", {"thm12-positive", "thm12-negative"});
  scenario_criterion(7, "Kropina flatness checker", {"thm13-positive", "thm13-negative"});
  scenario_criterion(8, "Example regressions", {"example1-quartic", "example3-baoshen", "example4-cs"});
  scenario_criterion(9, "Projectively flat identity", {"projflat-ricci", "reconstruct-T1"});
  scenario_criterion(10, "Jet audit", {"jet-vs-fd"});

  // not a numbered criterion: Sfrak = 0 forces WPRic_0 = Ric (<= 1e-10)
  auto triv = scenarios({"riemannian-s-zero"});
  std::printf("note  trivial-direction invariant: %s (%s)\n", triv.pass ? "holds" : "VIOLATED",
              scenario_detail(triv).c_str());

  int failed = 0;
  for (const auto& l : lines) failed += !l.pass;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(lines.size()) - failed, lines.size());
  return failed == 0 && triv.pass ? 0 : 1;
}
