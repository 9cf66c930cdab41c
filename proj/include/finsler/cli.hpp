#pragma once

// Command-line front end: eval, verify, volume, catalog.
// Exit codes: 0 ok, 1 a verification check failed, 2 usage or domain error.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "finsler/catalog.hpp"
#include "finsler/core.hpp"
#include "finsler/harness.hpp"
#include "finsler/metric_file.hpp"
#include "finsler/volume.hpp"

namespace finsler {

namespace cli_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline MetricSpec resolve_metric(const std::string& what) {
  if (what.rfind("builtin:", 0) == 0) return builtin_metric(what.substr(8));
  return load_metric_file(what);
}

inline std::optional<ReferenceVolume> resolve_ref(const std::string& ref, const MetricSpec& m) {
  if (ref == "self") return std::nullopt;
  if (ref == "alpha") {
    if (m.structure() == Structure::General)
      throw SpecError("--ref alpha needs a metric with a Riemannian part");
    return ReferenceVolume{};
  }
  MetricSpec r = resolve_metric(ref);
  return ReferenceVolume{default_volume(r), r};
}

inline VolumeSpec resolve_volume(const std::string& method, const MetricSpec& m) {
  if (method == "quadrature") return VolumeSpec::busemann_hausdorff();
  if (method == "closed-form") {
    VolumeSpec v = VolumeSpec::closed_form_for(m);
    if (v.kind == VolumeSpec::Kind::BusemannHausdorff)
      throw SpecError("metric '" + m.name() + "' has no closed-form density");
    return v;
  }
  throw SpecError("unknown volume method '" + method + "'");
}

inline void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw SpecError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

inline nlohmann::ordered_json to_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::ordered_json to_json(const Eigen::VectorXd& v) {
  auto a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline std::string show(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + "]";
}

inline std::string show(const Eigen::MatrixXd& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += (i ? ", " : "") + show(Eigen::VectorXd(m.row(i).transpose()));
  return s + "]";
}

inline const std::vector<std::string>& invariant_names() {
  static const std::vector<std::string> names = {"F",   "g",     "g_inv", "G",     "N",    "R",
                                                 "Ric", "sigma_F", "tau",   "S",     "Sigma", "theta",
                                                 "Sfrak", "PRic", "wpric"};
  return names;
}

}  // namespace cli_detail

struct CliStreams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

inline int cli_main(int argc, const char* const* argv, CliStreams io = {}) {
  using namespace cli_detail;
  CLI::App app{"Finsler invariants, closed-form cross-checks and verification scenarios", "finsler"};
  app.require_subcommand(1);

  std::string metric, ref = "self", invariants = "F,S,Ric,wpric", json, method = "quadrature", suite = "all",
              volume_opt;
  std::vector<double> x, y;
  std::uint64_t seed = 1;
  std::optional<int> samples;
  std::optional<double> tol;

  auto* eval = app.add_subcommand("eval", "evaluate invariants at one tangent sample");
  eval->add_option("--metric", metric, "builtin:NAME or metric file")->required();
  eval->add_option("--ref", ref, "reference volume: alpha, self, builtin:NAME or FILE");
  eval->add_option("--x", x, "base point, comma separated")->required()->delimiter(',');
  eval->add_option("--y", y, "tangent vector, comma separated")->required()->delimiter(',');
  eval->add_option("--invariants", invariants, "comma separated list or 'all'");
  eval->add_option("--volume", volume_opt, "quadrature or closed-form (default: quadrature in n = 2, 3)");
  eval->add_option("--json", json, "write a JSON record");

  auto* verify = app.add_subcommand("verify", "run verification scenarios");
  verify->add_option("--suite", suite, "scenario name or 'all'");
  verify->add_option("--seed", seed, "PRNG seed");
  verify->add_option("--samples", samples, "sample count per scenario");
  verify->add_option("--tol", tol, "relative tolerance for the non-pinned checks");
  verify->add_option("--json", json, "write the JSON report");

  auto* volume = app.add_subcommand("volume", "Busemann-Hausdorff density at a point");
  volume->add_option("--metric", metric, "builtin:NAME or metric file")->required();
  volume->add_option("--x", x, "base point")->required()->delimiter(',');
  volume->add_option("--method", method, "quadrature or closed-form")
      ->check(CLI::IsMember({"quadrature", "closed-form"}));
  volume->add_option("--json", json, "write a JSON record");

  auto* catalog = app.add_subcommand("catalog", "list builtin metrics and scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    io.out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    io.err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*catalog) {
      io.out << "metrics:\n";
      for (const auto& e : catalog_entries()) io.out << "  builtin:" << e.name << "  " << e.description << "\n";
      io.out << "scenarios:\n";
      for (const auto& s : scenarios()) io.out << "  " << s.name << "  " << s.description << "\n";
      return 0;
    }

    if (*eval) {
      const MetricSpec m = resolve_metric(metric);
      if (static_cast<int>(x.size()) != m.dim() || static_cast<int>(y.size()) != m.dim())
        throw DomainError("--x and --y need " + std::to_string(m.dim()) + " components");
      VolumeSpec vol = volume_opt.empty() ? (m.dim() == 2 || m.dim() == 3 ? VolumeSpec::busemann_hausdorff()
                                                                         : default_volume(m))
                                          : resolve_volume(volume_opt, m);
      PipelineOptions opt{vol, resolve_ref(ref, m)};
      CurvatureBundle B = compute_bundle(m, {x, y}, opt);

      std::vector<std::string> want;
      std::string item;
      std::stringstream ss(invariants);
      while (std::getline(ss, item, ',')) {
        item = lower(item);
        if (item == "all") {
          want = invariant_names();
          break;
        }
        if (item == "wpric0") item = "wpric";
        auto it = std::find_if(invariant_names().begin(), invariant_names().end(),
                               [&](const std::string& n) { return lower(n) == item; });
        if (it == invariant_names().end()) throw SpecError("unknown invariant '" + item + "'");
        want.push_back(*it);
      }

      nlohmann::ordered_json j;
      j["metric"] = m.name();
      j["x"] = x;
      j["y"] = y;
      j["volume"] = to_string(vol.kind);
      j["ref"] = ref;
      auto& inv = j["invariants"];
      auto scalar = [&](const std::string& name, double v) {
        io.out << name << " = " << fmt(v) << "\n";
        inv[name] = v;
      };
      for (const auto& w : want) {
        if (w == "F") scalar("F", B.F);
        else if (w == "g") { io.out << "g = " << show(B.g) << "\n"; inv["g"] = to_json(B.g); }
        else if (w == "g_inv") { io.out << "g_inv = " << show(B.g_inv) << "\n"; inv["g_inv"] = to_json(B.g_inv); }
        else if (w == "G") { io.out << "G = " << show(B.G) << "\n"; inv["G"] = to_json(B.G); }
        else if (w == "N") { io.out << "N = " << show(B.N) << "\n"; inv["N"] = to_json(B.N); }
        else if (w == "R") { io.out << "R = " << show(B.R) << "\n"; inv["R"] = to_json(B.R); }
        else if (w == "Ric") scalar("Ric", B.Ric);
        else if (w == "sigma_F") scalar("sigma_F", B.sigma_F);
        else if (w == "tau") scalar("tau", B.tau);
        else if (w == "S") scalar("S", B.S);
        else if (w == "Sigma") scalar("Sigma", B.Sigma);
        else if (w == "theta") scalar("theta", B.theta);
        else if (w == "Sfrak") scalar("Sfrak", B.Sfrak);
        else if (w == "PRic") scalar("PRic", B.PRic);
        else if (w == "wpric") {
          scalar("WPRic0", B.WPRic0);
          scalar("WPRic0-Ric", B.WPRic0 - B.Ric);
        }
      }
      if (!json.empty()) write_json(json, j);
      return 0;
    }

    if (*volume) {
      const MetricSpec m = resolve_metric(metric);
      if (static_cast<int>(x.size()) != m.dim()) throw DomainError("--x needs " + std::to_string(m.dim()) + " components");
      const VolumeSpec v = resolve_volume(method, m);
      const double s = volume_density(m, v, x);
      io.out << "sigma_F = " << fmt(s) << "  (" << to_string(v.kind) << ")\n";
      if (!json.empty()) {
        nlohmann::ordered_json j;
        j["metric"] = m.name();
        j["x"] = x;
        j["method"] = method;
        j["sigma_F"] = s;
        write_json(json, j);
      }
      return 0;
    }

    if (*verify) {
      auto list = scenario_suite(suite);
      bool all_pass = true;
      nlohmann::ordered_json j;
      j["schema"] = 1;
      j["suite"] = suite;
      j["seed"] = seed;
      j["generator"] = kGeneratorName;
      auto reports = nlohmann::ordered_json::array();
      for (const Scenario* sc : list) {
        VerificationReport r = run_scenario(*sc, seed, samples, tol);
        all_pass = all_pass && r.pass();
        io.out << (r.pass() ? "PASS " : "FAIL ") << r.scenario << "  (" << r.samples << " samples, "
               << fmt(r.elapsed_ms / 1000.0) << " s)\n";
        for (const auto& c : r.checks)
          if (!c.pass)
            io.out << "    " << (c.informational ? "note " : "fail ") << c.name << ": max_abs " << fmt(c.max_abs)
                   << ", max_rel " << fmt(c.max_rel) << ", tol " << fmt(c.tol) << "\n";
        if (!r.error.empty()) io.out << "    error: " << r.error << "\n";
        reports.push_back(r.to_json());
      }
      j["pass"] = all_pass;
      j["reports"] = std::move(reports);
      if (!json.empty()) write_json(json, j);
      return all_pass ? 0 : 1;
    }
  } catch (const Error& e) {
    io.err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace finsler
