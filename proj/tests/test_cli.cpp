#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "branchmap/io.hpp"
#include "branchmap/simplify.hpp"
#include "support/random_trees.hpp"

namespace fs = std::filesystem;
using namespace branchmap;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(BRANCHMAP_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return std::string(BRANCHMAP_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> csv_cells(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream cells(line);
    std::string c;
    while (std::getline(cells, c, ',')) row.push_back(c);
    if (!line.empty() && line.back() == ',') row.push_back("");
    rows.push_back(row);
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("branchmap_cli_" + std::to_string(getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, FourNodeTriple) {
  EXPECT_EQ(run("dist " + data("triple_a.mt") + " " + data("triple_c.mt")).out, "5.000000000\n");
  EXPECT_EQ(run("dist --distance branch --metric birth-persistence --mode sum " + data("triple_a.mt") + " " +
                data("triple_b.mt"))
                .out,
            "2.000000000\n");
  EXPECT_EQ(run("dist --distance one-degree " + data("triple_b.mt") + " " + data("triple_c.mt")).out, "3.000000000\n");
  EXPECT_EQ(run("dist " + data("triple_b.mt") + " " + data("triple_b.mt")).out, "0.000000000\n");
}

TEST_F(Cli, MappingJson) {
  const auto r = run("dist " + data("triple_a.mt") + " " + data("triple_c.mt") + " --mapping " + path("m.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(slurp(path("m.json")));
  EXPECT_DOUBLE_EQ(j["totalCost"].get<double>(), 5.0);
  EXPECT_EQ(j["pairs"].size(), 2u);
  EXPECT_EQ(run("dist --distance constrained --mapping " + path("x.json") + " " + data("triple_a.mt") + " " +
                data("triple_c.mt"))
                .code,
            1);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("dist " + data("bad_header.mt") + " " + data("triple_a.mt")).code, 2);
  EXPECT_EQ(run("dist " + data("root_two_children.mt") + " " + data("triple_a.mt")).code, 2);
  EXPECT_EQ(run("dist " + data("missing.mt") + " " + data("triple_a.mt")).code, 2);
  EXPECT_EQ(run("dist --metric foo " + data("triple_a.mt") + " " + data("triple_c.mt")).code, 1);
  EXPECT_EQ(run("dist --distance nope " + data("triple_a.mt") + " " + data("triple_c.mt")).code, 1);
  EXPECT_EQ(run("dist " + data("triple_a.mt")).code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("gen periodic --period 1 -o " + path("g")).code, 1);
  EXPECT_EQ(run("gen peaks --set bogus=1 -o " + path("g")).code, 1);
}

TEST_F(Cli, ParseErrorNamesTheLine) {
  const std::string cmd = std::string(BRANCHMAP_CLI) + " dist " + data("bad_header.mt") + " " + data("triple_a.mt") +
                          " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_TRUE(pipe);
  char buf[512] = {};
  const std::size_t n = fread(buf, 1, sizeof buf - 1, pipe);
  pclose(pipe);
  EXPECT_NE(std::string(buf, n).find("bad_header.mt:1:"), std::string::npos);
}

TEST_F(Cli, TreeCommand) {
  ASSERT_EQ(run("tree " + data("two_bumps.sf2") + " -o " + path("b.mt")).code, 0);
  EXPECT_EQ(load_merge_tree(path("b.mt")).size(), 4u);
  ASSERT_EQ(run("tree " + data("constant.sf2") + " -o " + path("c.mt")).code, 0);
  EXPECT_EQ(load_merge_tree(path("c.mt")).size(), 2u);
  EXPECT_EQ(run("tree " + data("bad_header.mt")).code, 2);
  // Minima of a field are maxima of its negation.
  auto f = load_scalar_field(data("two_bumps.sf2"));
  for (double& v : f.values) v = -v;
  save_scalar_field(path("neg.sf2"), f);
  ASSERT_EQ(run("tree --direction min " + path("neg.sf2") + " -o " + path("n.mt")).code, 0);
  EXPECT_EQ(load_merge_tree(path("n.mt")).values(), load_merge_tree(path("b.mt")).values());
}

TEST_F(Cli, FieldInputsAreBuiltAutomatically) {
  ASSERT_EQ(run("tree " + data("two_bumps.sf2") + " -o " + path("b.mt")).code, 0);
  EXPECT_EQ(run("dist " + data("two_bumps.sf2") + " " + path("b.mt")).out, "0.000000000\n");
}

TEST_F(Cli, MatrixMatchesDist) {
  std::mt19937_64 rng(51);
  std::vector<std::string> files = {data("triple_a.mt"), data("triple_b.mt"), data("triple_c.mt"), data("stacked_saddles.mt")};
  for (int k = 0; k < 3; ++k) {
    files.push_back(path("r" + std::to_string(k) + ".mt"));
    save_merge_tree(files.back(), testdata::random_merge_tree(rng, {}));
  }
  std::string list;
  for (const auto& f : files) list += " " + f;
  for (const char* flags : {"", "--distance one-degree --metric euclidean --mode l2",
                            "--distance constrained --metric linf", "--distance branch-fixed --metric persistence"}) {
    const auto m = run(std::string("matrix --jobs 3 ") + flags + list);
    ASSERT_EQ(m.code, 0) << flags;
    const auto cells = csv_cells(m.out);
    ASSERT_EQ(cells.size(), files.size() + 1);
    for (std::size_t i = 0; i < files.size(); ++i) {
      EXPECT_EQ(cells[i + 1][0], fs::path(files[i]).stem().string());
      EXPECT_EQ(cells[i + 1][i + 1], "0.000000000");
      for (std::size_t j = i + 1; j < files.size(); ++j) {
        const auto d = run(std::string("dist ") + flags + " " + files[i] + " " + files[j]).out;
        EXPECT_EQ(cells[i + 1][j + 1] + "\n", d) << flags << " " << i << "," << j;
        EXPECT_EQ(cells[i + 1][j + 1], cells[j + 1][i + 1]);
      }
    }
  }
}

TEST_F(Cli, MatrixOrderingAndHeatmap) {
  const std::string list = " " + data("triple_a.mt") + " " + data("stacked_saddles.mt") + " " + data("triple_c.mt") + " " +
                           data("twin_peaks.mt") + " " + data("triple_b.mt");
  const auto m = run("matrix --order cluster --heatmap " + path("h.pgm") + list);
  ASSERT_EQ(m.code, 0);
  const auto cells = csv_cells(m.out);
  std::vector<std::string> header(cells[0].begin() + 1, cells[0].end());
  std::vector<std::string> rows;
  for (std::size_t i = 1; i < cells.size(); ++i) rows.push_back(cells[i][0]);
  EXPECT_EQ(header, rows);
  std::sort(rows.begin(), rows.end());
  EXPECT_EQ(rows, (std::vector<std::string>{"stacked_saddles", "triple_a", "triple_b", "triple_c", "twin_peaks"}));
  const auto img = slurp(path("h.pgm"));
  EXPECT_EQ(img.substr(0, 11), "P5\n5 5\n255\n");
  EXPECT_EQ(img.size(), 11u + 25u);
}

TEST_F(Cli, IdenticalMembersGiveZeroMatrix) {
  for (int k = 0; k < 3; ++k) fs::copy_file(data("stacked_saddles.mt"), path("same" + std::to_string(k) + ".mt"));
  const auto m = run("matrix " + dir_.string());
  ASSERT_EQ(m.code, 0);
  const auto cells = csv_cells(m.out);
  ASSERT_EQ(cells.size(), 4u);
  for (std::size_t i = 1; i < 4; ++i) {
    for (std::size_t j = 1; j < 4; ++j) EXPECT_EQ(cells[i][j], "0.000000000");
  }
}

TEST_F(Cli, MatrixNeedsTwoValidMembers) {
  EXPECT_EQ(run("matrix " + data("triple_a.mt")).code, 1);
  EXPECT_EQ(run("matrix " + data("triple_a.mt") + " " + data("root_two_children.mt")).code, 2);
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(run("gen outlier --members 20 --outlier-index 7 --seed 1 -o " + path("a")).code, 0);
  ASSERT_EQ(run("gen outlier --members 20 --outlier-index 7 --seed 1 -o " + path("b")).code, 0);
  int count = 0;
  for (const auto& e : fs::directory_iterator(path("a"))) {
    ++count;
    EXPECT_EQ(slurp(e.path()), slurp(fs::path(path("b")) / e.path().filename()));
  }
  EXPECT_EQ(count, 20);
}

TEST_F(Cli, GenPeriodicRepeats) {
  ASSERT_EQ(run("gen periodic --length 10 --period 5 --variation 0 -o " + path("p")).code, 0);
  EXPECT_EQ(slurp(path("p/member_0.sf2")), slurp(path("p/member_5.sf2")));
  EXPECT_NE(slurp(path("p/member_0.sf2")), slurp(path("p/member_1.sf2")));
}

TEST_F(Cli, GenPeaksHaveNineMaxima) {
  ASSERT_EQ(run("gen peaks --members 20 --seed 1 -o " + path("k")).code, 0);
  for (int k = 0; k < 20; ++k) {
    const auto t = compute_merge_tree(load_scalar_field(path("k/member_" + std::to_string(k) + ".sf2")));
    EXPECT_EQ(simplify(t, 0.02).leaves().size(), 9u) << k;
  }
}

TEST_F(Cli, GenConfigFile) {
  {
    std::ofstream cfg(path("ensemble.cfg"));
    cfg << "# small ensemble\nmembers = 3\nrows = 20\ncols = 20\n";
  }
  ASSERT_EQ(run("gen peaks --config " + path("ensemble.cfg") + " --set seed=4 -o " + path("c")).code, 0);
  EXPECT_TRUE(fs::exists(path("c/member_2.sf2")));
  EXPECT_FALSE(fs::exists(path("c/member_3.sf2")));
  EXPECT_EQ(load_scalar_field(path("c/member_0.sf2")).rows, 20);
}

TEST_F(Cli, TrackCommand) {
  for (int k = 0; k < 3; ++k) fs::copy_file(data("stacked_saddles.mt"), path("t" + std::to_string(k) + ".mt"));
  const auto r = run("track " + dir_.string() + " -o " + path("tracks.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(slurp(path("tracks.json")));
  EXPECT_EQ(j["steps"].size(), 2u);
  ASSERT_EQ(j["tracks"].size(), 3u);
  for (const auto& t : j["tracks"]) {
    EXPECT_EQ(t["firstStep"], 0);
    EXPECT_EQ(t["lastStep"], 2);
  }
  EXPECT_EQ(run("track --distance one-degree " + dir_.string()).code, 1);
  EXPECT_EQ(run("track " + data("triple_a.mt")).code, 1);
}
