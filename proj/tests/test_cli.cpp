#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "finsler/cli.hpp"

using namespace finsler;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "finsler");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), {out, err});
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("finsler_cli_" + name)).string();
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

void drop_times(nlohmann::json& j) {
  for (auto& r : j["reports"]) r.erase("elapsed_ms");
}

}  // namespace

TEST(Cli, EvalFunkSample) {
  auto r = run({"eval", "--metric", "builtin:funk2", "--x", "0.3,0", "--y", "1,0", "--invariants", "F,S,wpric", "--ref",
                "alpha"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("F = 1.428571429"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("S = 2.142857143"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("WPRic0-Ric = -0.69737954"), std::string::npos) << r.out;
}

TEST(Cli, EvalJsonAndAll) {
  const std::string path = tmp("eval.json");
  auto r = run({"eval", "--metric", std::string(FINSLER_DATA_DIR) + "/randers_warped.metric", "--x", "0.1,0.2", "--y",
                "1,0.5", "--invariants", "all", "--volume", "closed-form", "--json", path});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = read_json(path);
  EXPECT_EQ(j["volume"], "closed-form-randers");
  for (const char* k : {"F", "g", "g_inv", "G", "N", "R", "Ric", "sigma_F", "tau", "S", "Sigma", "theta", "Sfrak", "PRic",
                        "WPRic0"})
    EXPECT_TRUE(j["invariants"].contains(k)) << k;
  EXPECT_EQ(j["invariants"]["g"].size(), 2u);
  std::remove(path.c_str());
}

TEST(Cli, VolumeKropina) {
  auto r = run({"volume", "--metric", "builtin:kropina-const", "--x", "0,0", "--method", "quadrature"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sigma_F = 4"), std::string::npos) << r.out;
  auto c = run({"volume", "--metric", "builtin:kropina-const", "--x", "0,0", "--method", "closed-form"});
  EXPECT_NE(c.out.find("sigma_F = 4  (closed-form-kropina)"), std::string::npos) << c.out;
  // a general F has no closed-form density
  const std::string general = std::string(FINSLER_DATA_DIR) + "/funk2.metric";
  EXPECT_EQ(run({"volume", "--metric", general, "--x", "0,0", "--method", "closed-form"}).code, 2);
  EXPECT_EQ(run({"volume", "--metric", general, "--x", "0,0"}).code, 0);
}

TEST(Cli, VerifyJsonIsDeterministic) {
  const std::string a = tmp("a.json"), b = tmp("b.json");
  for (const auto& p : {a, b})
    ASSERT_EQ(run({"verify", "--suite", "randers-oracle", "--seed", "7", "--samples", "10", "--json", p}).code, 0);
  auto ja = read_json(a), jb = read_json(b);
  EXPECT_EQ(ja["schema"], 1);
  EXPECT_EQ(ja["generator"], "mt19937_64");
  EXPECT_TRUE(ja["pass"].get<bool>());
  drop_times(ja);
  drop_times(jb);
  EXPECT_EQ(ja.dump(), jb.dump());
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(Cli, Catalog) {
  auto r = run({"catalog"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("builtin:funk2"), std::string::npos);
  EXPECT_NE(r.out.find("jet-vs-fd"), std::string::npos);
}

TEST(Cli, UsageAndDomainErrors) {
  auto none = run({});
  EXPECT_EQ(none.code, 2);
  EXPECT_NE(none.err.find("Usage"), std::string::npos) << none.err;
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"eval", "--metric", "builtin:funk2", "--x", "0.3,0"}).code, 2);  // missing --y
  EXPECT_EQ(run({"eval", "--metric", "builtin:funk2", "--x", "0.3,0", "--y", "0,0"}).code, 2);
  EXPECT_EQ(run({"eval", "--metric", "builtin:nope", "--x", "0,0", "--y", "1,0"}).code, 2);
  EXPECT_EQ(run({"eval", "--metric", "builtin:funk2", "--x", "0.3", "--y", "1,0"}).code, 2);
  EXPECT_EQ(run({"eval", "--metric", "builtin:funk2", "--x", "0,0", "--y", "1,0", "--invariants", "Q"}).code, 2);
  EXPECT_EQ(run({"eval", "--metric", "builtin:funk2", "--x", "0,0", "--y", "1,0", "--ref", "alpha"}).code, 0);
  EXPECT_EQ(run({"eval", "--metric", "/no/such/file.metric", "--x", "0,0", "--y", "1,0"}).code, 2);
  EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
  EXPECT_EQ(run({"volume", "--metric", "builtin:funk2", "--x", "0,0", "--method", "magic"}).code, 2);
}

TEST(Cli, Help) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}
