#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "branchmap/branch_mapping.hpp"
#include "branchmap/error.hpp"
#include "branchmap/matrix.hpp"
#include "branchmap/merge_tree.hpp"
#include "branchmap/scalar_field.hpp"
#include "branchmap/tracking.hpp"

namespace branchmap {

/// Fixed nine-decimal rendering used for every printed distance.
inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

namespace detail {

inline std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Splits a text stream into whitespace tokens, remembering line numbers.
/// Blank lines and everything after '#' are ignored.
class Tokenizer {
 public:
  Tokenizer(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
      ++no;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream words(line);
      std::string w;
      while (words >> w) tokens_.push_back({w, no});
    }
    last_line_ = no;
  }

  bool done() const { return pos_ >= tokens_.size(); }
  std::size_t line() const { return done() ? last_line_ : tokens_[pos_].line; }

  std::string word(const char* what) {
    if (done()) fail("unexpected end of input, expected " + std::string(what));
    return tokens_[pos_++].text;
  }

  long long integer(const char* what) {
    const std::size_t at = line();
    const std::string w = word(what);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(w, &used);
      if (used == w.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(source_, at, "expected " + std::string(what) + ", got '" + w + "'");
  }

  double real(const char* what) {
    const std::size_t at = line();
    const std::string w = word(what);
    try {
      std::size_t used = 0;
      const double v = std::stod(w, &used);
      if (used == w.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(source_, at, "expected " + std::string(what) + ", got '" + w + "'");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line(), what); }

  const std::string& source() const { return source_; }

 private:
  struct Token {
    std::string text;
    std::size_t line;
  };
  std::string source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 0;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

// ---- merge trees ---------------------------------------------------------

/// Reads `MT <n>` followed by n lines `<id> <value> <parent|-1>`. Ids must
/// be 0..n-1, each exactly once. The tree must satisfy the merge tree rules.
inline MergeTree read_merge_tree(std::istream& in, const std::string& source = "<input>") {
  detail::Tokenizer tok(in, source);
  if (tok.done()) tok.fail("empty input, expected 'MT <count>'");
  const std::size_t header_line = tok.line();
  if (tok.word("header") != "MT") throw ParseError(source, header_line, "expected header 'MT <count>'");
  const long long n = tok.integer("node count");
  if (n < 0) throw ParseError(source, header_line, "negative node count");
  std::vector<double> values(n, 0.0);
  std::vector<NodeId> parents(n, kNoNode);
  std::vector<char> seen(n, 0);
  for (long long k = 0; k < n; ++k) {
    const std::size_t at = tok.line();
    const long long id = tok.integer("node id");
    const double value = tok.real("node value");
    const long long parent = tok.integer("parent id");
    if (id < 0 || id >= n) throw ParseError(source, at, "node id " + std::to_string(id) + " out of range");
    if (seen[id]) throw ParseError(source, at, "node id " + std::to_string(id) + " listed twice");
    if (parent < -1 || parent >= n) throw ParseError(source, at, "parent id " + std::to_string(parent) + " out of range");
    seen[id] = 1;
    values[id] = value;
    parents[id] = static_cast<NodeId>(parent);
  }
  if (!tok.done()) tok.fail("unexpected content after " + std::to_string(n) + " nodes");
  MergeTree tree(std::move(values), std::move(parents));
  const auto report = validate_merge_tree(tree);
  if (!report.ok()) throw ValidationError(source + ": " + report.summary());
  return tree;
}

inline MergeTree load_merge_tree(const std::string& path) {
  auto in = detail::open_input(path);
  return read_merge_tree(in, path);
}

inline void write_merge_tree(std::ostream& out, const MergeTree& tree) {
  out << "MT " << tree.size() << "\n";
  for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
    out << v << " " << detail::exact(tree.value(v)) << " " << tree.parent(v) << "\n";
  }
}

inline void save_merge_tree(const std::string& path, const MergeTree& tree) {
  auto out = detail::open_output(path);
  write_merge_tree(out, tree);
}

// ---- scalar fields -------------------------------------------------------

/// Reads `SF2 <rows> <cols>` followed by rows*cols row-major values.
inline ScalarField2D read_scalar_field(std::istream& in, const std::string& source = "<input>") {
  detail::Tokenizer tok(in, source);
  if (tok.done()) tok.fail("empty input, expected 'SF2 <rows> <cols>'");
  const std::size_t header_line = tok.line();
  if (tok.word("header") != "SF2") throw ParseError(source, header_line, "expected header 'SF2 <rows> <cols>'");
  const long long rows = tok.integer("row count");
  const long long cols = tok.integer("column count");
  if (rows <= 0 || cols <= 0) throw ParseError(source, header_line, "grid dimensions must be positive");
  ScalarField2D f;
  f.rows = static_cast<int>(rows);
  f.cols = static_cast<int>(cols);
  f.values.reserve(static_cast<std::size_t>(rows * cols));
  for (long long k = 0; k < rows * cols; ++k) f.values.push_back(tok.real("field value"));
  if (!tok.done()) tok.fail("more than " + std::to_string(rows * cols) + " values");
  return f;
}

inline ScalarField2D load_scalar_field(const std::string& path) {
  auto in = detail::open_input(path);
  return read_scalar_field(in, path);
}

inline void write_scalar_field(std::ostream& out, const ScalarField2D& f) {
  out << "SF2 " << f.rows << " " << f.cols << "\n";
  for (int r = 0; r < f.rows; ++r) {
    for (int c = 0; c < f.cols; ++c) out << (c ? " " : "") << detail::exact(f.at(r, c));
    out << "\n";
  }
}

inline void save_scalar_field(const std::string& path, const ScalarField2D& f) {
  auto out = detail::open_output(path);
  write_scalar_field(out, f);
}

/// True when the file starts with the SF2 header.
inline bool looks_like_field(const std::string& path) {
  auto in = detail::open_input(path);
  std::string word;
  while (in >> word) {
    if (word.starts_with("#")) {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return word == "SF2";
  }
  return false;
}

// ---- key=value configuration ----------------------------------------------

/// `key = value` lines; blank lines and '#' comments are skipped.
inline std::map<std::string, std::string> read_key_values(std::istream& in, const std::string& source = "<input>") {
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(source, no, "empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

// ---- mappings, tracks, matrices ---------------------------------------------

inline nlohmann::ordered_json mapping_to_json(const BranchMapping& m) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["pairs"] = ordered_json::array();
  for (const auto& p : m.pairs) {
    j["pairs"].push_back({{"t1Start", p.first.start}, {"t1Leaf", p.first.leaf},
                          {"t2Start", p.second.start}, {"t2Leaf", p.second.leaf}, {"cost", p.cost}});
  }
  j["deletions"] = ordered_json::array();
  for (const auto& d : m.deletions) {
    j["deletions"].push_back({{"t1Start", d.branch.start}, {"t1Leaf", d.branch.leaf}, {"cost", d.cost}});
  }
  j["insertions"] = ordered_json::array();
  for (const auto& d : m.insertions) {
    j["insertions"].push_back({{"t2Start", d.branch.start}, {"t2Leaf", d.branch.leaf}, {"cost", d.cost}});
  }
  j["totalCost"] = m.total_cost;
  j["mode"] = aggregation_name(m.mode);
  j["metric"] = metric_name(m.metric);
  return j;
}

inline nlohmann::ordered_json tracking_to_json(const TrackingResult& r, const std::vector<std::string>& labels) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["steps"] = ordered_json::array();
  for (std::size_t t = 0; t < r.steps.size(); ++t) {
    ordered_json pairs = ordered_json::array();
    for (const auto& [a, b] : r.steps[t].leaf_pairs) pairs.push_back({a, b});
    j["steps"].push_back({{"from", labels.at(t)}, {"to", labels.at(t + 1)},
                          {"distance", r.steps[t].distance}, {"leafPairs", pairs}});
  }
  j["tracks"] = ordered_json::array();
  for (const auto& tr : r.tracks) {
    j["tracks"].push_back({{"id", tr.id}, {"firstStep", tr.first_step}, {"lastStep", tr.last_step()},
                           {"leaves", tr.leaves}});
  }
  return j;
}

/// CSV with a header row and a label column; values with nine decimals.
inline void write_matrix_csv(std::ostream& out, const DistanceMatrix& m) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& l : m.labels) out << "," << quote(l);
  out << "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << quote(m.labels[i]);
    for (std::size_t j = 0; j < m.size(); ++j) out << "," << format_value(m.at(i, j));
    out << "\n";
  }
}

/// Binary 8-bit grayscale image, one pixel per entry, scaled so the largest
/// distance is white.
inline void write_matrix_pgm(std::ostream& out, const DistanceMatrix& m) {
  const std::size_t n = m.size();
  double hi = 0.0;
  for (double v : m.values) hi = std::max(hi, v);
  out << "P5\n" << n << " " << n << "\n255\n";
  for (double v : m.values) {
    const double s = hi > 0 ? v / hi : 0.0;
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(s, 0.0, 1.0) * 255.0))));
  }
}

}  // namespace branchmap
