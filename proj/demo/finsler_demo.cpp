// Walks through the library on a few metrics: the curvature bundle of a
// Funk metric, a Randers metric read from a file, and the flatness checkers.
//
//   finsler_demo [path/to/file.metric]

#include <cstdio>
#include <string>

#include "finsler/catalog.hpp"
#include "finsler/checkers.hpp"
#include "finsler/core.hpp"
#include "finsler/metric_file.hpp"

using namespace finsler;

static void show(const char* label, const MetricSpec& m, const TangentSample& s, const PipelineOptions& opt) {
  CurvatureBundle B = compute_bundle(m, s, opt);
  std::printf("%s\n  F = %.10g  Ric = %.10g  S = %.10g\n  PRic = %.10g  WPRic0 = %.10g\n", label, B.F, B.Ric, B.S,
              B.PRic, B.WPRic0);
}

int main(int argc, char** argv) {
  try {
    const MetricSpec funk = funk_metric(2);
    const TangentSample s{{0.3, 0.0}, {1.0, 0.0}};
    // against alpha's density; S should be 3F/2 and WPRic0 - Ric = (beta - alpha)(3 alpha + beta)/4
    show("funk2 at x = (0.3, 0), y = (1, 0), alpha reference:", funk, s,
         {VolumeSpec::busemann_hausdorff(), ReferenceVolume{}});

    const std::string path = argc > 1 ? argv[1] : std::string(FINSLER_DATA_DIR) + "/randers_warped.metric";
    const MetricSpec file = load_metric_file(path);
    std::vector<double> x(file.dim(), 0.1), y(file.dim(), 0.0);
    y[0] = 1.0;
    show(("file " + path + ":").c_str(), file, {x, y}, {VolumeSpec::closed_form_for(file), std::nullopt});

    for (const char* name : {"randers-const", "funk2"}) {
      const MetricSpec m = builtin_metric(name);
      auto rep = check_randers_wpric_flat(m, default_grid(m));
      std::printf("Randers flatness check, %s: %s (Ric-bar residual %.3g, %d samples)\n", name,
                  rep.verdict ? "flat" : "not flat", rep.ric.max_abs, rep.samples);
    }
    for (const char* name : {"kropina-const", "kropina-funk-alpha"}) {
      const MetricSpec m = builtin_metric(name);
      auto rep = check_kropina_wpric_flat(m, default_grid(m));
      std::printf("Kropina flatness check, %s: %s%s\n", name, rep.verdict ? "flat" : "not flat",
                  rep.applicable ? "" : " (beta not conformal)");
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
