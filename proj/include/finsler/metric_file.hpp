#pragma once

// Line-oriented metric definition files:
//
//   # comment
//   dim = 2
//   kind = randers
//   a[1][1] = 1 + x2^2
//   b[1] = 0.3*x1
//
// a defaults to the identity, so Euclidean entries may be omitted.

#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <utility>

#include "finsler/errors.hpp"
#include "finsler/expr.hpp"
#include "finsler/metric.hpp"

namespace finsler {

namespace metric_file_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  int line = 0;
  std::string text;
};

inline SpecError at_line(int line, const std::string& msg) {
  return SpecError("line " + std::to_string(line) + ": " + msg);
}

inline Expr parse_at(const Entry& e) {
  try {
    return parse(e.text);
  } catch (const ParseError& pe) {
    throw at_line(e.line, pe.what());
  }
}

}  // namespace metric_file_detail

/// Parses the text of a metric file. `origin` only labels the result.
inline MetricSpec parse_metric_text(const std::string& text, const std::string& origin = "file") {
  using namespace metric_file_detail;
  static const std::regex a_key(R"(a\[(\d+)\]\[(\d+)\])");
  static const std::regex b_key(R"(b\[(\d+)\])");

  std::optional<Entry> dim_e, kind_e, F_e;
  std::map<std::pair<int, int>, Entry> a_entries;
  std::map<int, Entry> b_entries;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw at_line(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    Entry val{lineno, trim(line.substr(eq + 1))};
    if (val.text.empty()) throw at_line(lineno, "empty value for '" + key + "'");

    std::smatch mm;
    if (key == "dim") {
      dim_e = val;
    } else if (key == "kind") {
      kind_e = val;
    } else if (key == "F") {
      F_e = val;
    } else if (std::regex_match(key, mm, a_key)) {
      int i = std::stoi(mm[1]), j = std::stoi(mm[2]);
      if (i > j) std::swap(i, j);
      if (a_entries.count({i, j})) throw at_line(lineno, "duplicate entry " + key);
      a_entries[{i, j}] = val;
    } else if (std::regex_match(key, mm, b_key)) {
      const int i = std::stoi(mm[1]);
      if (b_entries.count(i)) throw at_line(lineno, "duplicate entry " + key);
      b_entries[i] = val;
    } else {
      throw at_line(lineno, "unknown key '" + key + "'");
    }
  }

  if (!dim_e) throw SpecError("missing 'dim'");
  if (!kind_e) throw SpecError("missing 'kind'");
  int dim = 0;
  try {
    std::size_t used = 0;
    dim = std::stoi(dim_e->text, &used);
    if (used != dim_e->text.size()) throw std::invalid_argument("trailing text");
  } catch (const std::exception&) {
    throw at_line(dim_e->line, "dim must be an integer");
  }
  if (dim < 1 || dim > 4) throw at_line(dim_e->line, "dim must be between 1 and 4");

  const std::string kind = kind_e->text;
  if (kind != "general" && kind != "randers" && kind != "kropina" && kind != "riemannian")
    throw at_line(kind_e->line, "unknown kind '" + kind + "'");

  if (kind == "general") {
    if (!F_e) throw SpecError("kind=general requires 'F'");
    if (!a_entries.empty() || !b_entries.empty()) throw SpecError("kind=general takes only 'F'");
    try {
      return MetricSpec::general(dim, parse_at(*F_e), origin);
    } catch (const SpecError& e) {
      throw at_line(F_e->line, e.what());
    }
  }
  if (F_e) throw at_line(F_e->line, "'F' is only allowed for kind=general");

  RiemannianSpec a(dim);
  for (const auto& [ij, e] : a_entries) {
    if (ij.first < 1 || ij.second > dim)
      throw at_line(e.line, "a index out of range for dim " + std::to_string(dim));
    a.set(ij.first - 1, ij.second - 1, parse_at(e));
  }

  if (kind == "riemannian") {
    if (!b_entries.empty()) throw at_line(b_entries.begin()->second.line, "kind=riemannian takes no b");
    return MetricSpec::riemannian(std::move(a), origin);
  }

  OneFormSpec b{dim, {}};
  for (const auto& [i, e] : b_entries)
    if (i < 1 || i > dim)
      throw at_line(e.line, "dimension mismatch: b[" + std::to_string(i) + "] with dim " + std::to_string(dim));
  for (int i = 1; i <= dim; ++i) {
    auto it = b_entries.find(i);
    if (it == b_entries.end()) throw SpecError("missing b[" + std::to_string(i) + "]");
    b.b.push_back(parse_at(it->second));
  }
  return kind == "randers" ? MetricSpec::randers(std::move(a), std::move(b), origin)
                           : MetricSpec::kropina(std::move(a), std::move(b), origin);
}

inline MetricSpec load_metric_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open metric file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_metric_text(ss.str(), path);
  } catch (const SpecError& e) {
    throw SpecError(path + ": " + e.what());
  }
}

}  // namespace finsler
