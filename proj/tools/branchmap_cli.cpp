#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "branchmap/branchmap.hpp"

namespace fs = std::filesystem;
using namespace branchmap;

namespace {

// Usage problems found after CLI11 has accepted the command line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldOptions {
  std::string direction = "max";
  int connectivity = 8;
  double simplify = 0.0;
};

struct DistanceOptions {
  std::string distance = "branch";
  std::string metric = "birth-persistence";
  std::string mode = "sum";

  DistanceConfig config() const {
    return {parse_distance(distance), BaseMetric{parse_metric(metric)}, parse_aggregation(mode)};
  }
};

void add_field_flags(CLI::App* cmd, FieldOptions& o) {
  cmd->add_option("--direction", o.direction, "Sweep direction for fields")
      ->check(CLI::IsMember({"max", "min"}))
      ->capture_default_str();
  cmd->add_option("--connectivity", o.connectivity, "Grid neighborhood for fields")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
  cmd->add_option("--simplify", o.simplify, "Persistence threshold applied to every tree")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void add_distance_flags(CLI::App* cmd, DistanceOptions& o) {
  cmd->add_option("--distance", o.distance, "Distance kind")
      ->check(CLI::IsMember({"branch", "branch-fixed", "constrained", "one-degree"}))
      ->capture_default_str();
  cmd->add_option("--metric", o.metric, "Base metric on branch labels")
      ->check(CLI::IsMember({"persistence", "birth-persistence", "euclidean", "linf"}))
      ->capture_default_str();
  cmd->add_option("--mode", o.mode, "Cost aggregation")->check(CLI::IsMember({"sum", "l2"}))->capture_default_str();
}

MergeTree load_tree(const std::string& path, const FieldOptions& o) {
  MergeTree tree;
  if (looks_like_field(path)) {
    auto field = load_scalar_field(path);
    field.connectivity = o.connectivity;
    tree = compute_merge_tree(field, o.direction == "min" ? SweepDirection::kMinima : SweepDirection::kMaxima);
  } else {
    tree = load_merge_tree(path);
  }
  return o.simplify > 0 ? simplify(tree, o.simplify) : tree;
}

std::vector<MergeTree> load_trees(const std::vector<std::string>& paths, const FieldOptions& o, unsigned jobs) {
  std::vector<MergeTree> trees(paths.size());
  parallel_for(paths.size(), jobs, [&](std::size_t k) { trees[k] = load_tree(paths[k], o); });
  return trees;
}

// Name order where digit runs compare as numbers, so member_2 < member_10.
bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      auto x = a.substr(i, ie - i), y = b.substr(j, je - j);
      x.erase(0, std::min(x.find_first_not_of('0'), x.size()));
      y.erase(0, std::min(y.find_first_not_of('0'), y.size()));
      if (x.size() != y.size()) return x.size() < y.size();
      if (x != y) return x < y;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j || (a.size() - i == b.size() - j && a < b);
}

// A single directory argument expands to its .mt and .sf2 files in natural
// name order.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  if (inputs.size() != 1 || !fs::is_directory(inputs[0])) return inputs;
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(inputs[0])) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".mt" || ext == ".sf2")) out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end(), natural_less);
  return out;
}

std::vector<std::string> stems(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(fs::path(p).stem().string());
  return out;
}

template <class Write>
void emit(const std::string& path, Write&& write, bool binary = false) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write(out);
  if (!out) throw Error("failed writing '" + path + "'");
}

// ---- gen ---------------------------------------------------------------------

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError("setting '" + key + "' expects a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw UsageError("setting '" + key + "' expects an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw UsageError("setting '" + key + "' expects true or false, got '" + v + "'");
}

void apply_settings(EnsembleSpec& s, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "members") s.members = static_cast<int>(to_int(k, v));
    else if (k == "rows") s.rows = static_cast<int>(to_int(k, v));
    else if (k == "cols") s.cols = static_cast<int>(to_int(k, v));
    else if (k == "seed") s.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "jitter") s.jitter = to_real(k, v);
    else if (k == "large-amplitude") s.large_amplitude = to_real(k, v);
    else if (k == "amplitude-jitter") s.amplitude_jitter = to_real(k, v);
    else if (k == "large-width") s.large_width = to_real(k, v);
    else if (k == "width-jitter") s.width_jitter = to_real(k, v);
    else if (k == "position-jitter") s.position_jitter = to_real(k, v);
    else if (k == "small-count") s.small_count = static_cast<int>(to_int(k, v));
    else if (k == "small-amplitude") s.small_amplitude = to_real(k, v);
    else if (k == "small-amplitude-jitter") s.small_amplitude_jitter = to_real(k, v);
    else if (k == "small-width") s.small_width = to_real(k, v);
    else if (k == "small-ring") s.small_ring = to_real(k, v);
    else if (k == "central-peak") s.central_peak = to_bool(k, v);
    else if (k == "central-amplitude") s.central_amplitude = to_real(k, v);
    else if (k == "outlier-index") s.outlier_index = static_cast<int>(to_int(k, v));
    else if (k == "noise") s.noise = to_real(k, v);
    else throw UsageError("unknown ensemble setting '" + k + "'");
  }
}

void apply_settings(PeriodicSpec& s, const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv) {
    if (k == "length") s.length = static_cast<int>(to_int(k, v));
    else if (k == "period") s.period = static_cast<int>(to_int(k, v));
    else if (k == "rows") s.rows = static_cast<int>(to_int(k, v));
    else if (k == "cols") s.cols = static_cast<int>(to_int(k, v));
    else if (k == "seed") s.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "variation") s.variation = to_real(k, v);
    else if (k == "bumps") s.bumps = static_cast<int>(to_int(k, v));
    else throw UsageError("unknown periodic setting '" + k + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch mapping distances between merge trees"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)")->capture_default_str();

  // tree
  FieldOptions tree_field;
  std::string tree_input, tree_out;
  auto* tree_cmd = app.add_subcommand("tree", "Build the merge tree of an SF2 field");
  tree_cmd->add_option("field", tree_input, "SF2 field")->required();
  tree_cmd->add_option("-o,--output", tree_out, "MT output (default stdout)");
  add_field_flags(tree_cmd, tree_field);

  // dist
  FieldOptions dist_field;
  DistanceOptions dist_opts;
  std::string dist_a, dist_b, dist_mapping;
  auto* dist_cmd = app.add_subcommand("dist", "Distance between two trees or fields");
  dist_cmd->add_option("first", dist_a, "MT or SF2 file")->required();
  dist_cmd->add_option("second", dist_b, "MT or SF2 file")->required();
  dist_cmd->add_option("--mapping", dist_mapping, "Write the optimal branch mapping as JSON");
  add_field_flags(dist_cmd, dist_field);
  add_distance_flags(dist_cmd, dist_opts);

  // matrix
  FieldOptions matrix_field;
  DistanceOptions matrix_opts;
  std::vector<std::string> matrix_inputs;
  std::string matrix_out, matrix_order = "input", matrix_heatmap;
  auto* matrix_cmd = app.add_subcommand("matrix", "Pairwise distance matrix");
  matrix_cmd->add_option("inputs", matrix_inputs, "Directory or list of MT/SF2 files")->required();
  matrix_cmd->add_option("-o,--output", matrix_out, "CSV output (default stdout)");
  matrix_cmd->add_option("--order", matrix_order, "Row order")
      ->check(CLI::IsMember({"input", "cluster"}))
      ->capture_default_str();
  matrix_cmd->add_option("--heatmap", matrix_heatmap, "Write a PGM heatmap");
  add_field_flags(matrix_cmd, matrix_field);
  add_distance_flags(matrix_cmd, matrix_opts);

  // track
  FieldOptions track_field;
  DistanceOptions track_opts;
  std::vector<std::string> track_inputs;
  std::string track_out;
  auto* track_cmd = app.add_subcommand("track", "Follow leaves through a time series");
  track_cmd->add_option("inputs", track_inputs, "Directory or time-ordered MT/SF2 files")->required();
  track_cmd->add_option("-o,--output", track_out, "JSON output (default stdout)");
  add_field_flags(track_cmd, track_field);
  add_distance_flags(track_cmd, track_opts);

  // gen
  std::string gen_kind, gen_dir = ".", gen_config;
  std::vector<std::string> gen_sets;
  std::map<std::string, std::string> gen_flags;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic SF2 data set");
  gen_cmd->add_option("kind", gen_kind, "peaks, outlier or periodic")
      ->required()
      ->check(CLI::IsMember({"peaks", "outlier", "periodic"}));
  gen_cmd->add_option("-o,--output", gen_dir, "Output directory")->capture_default_str();
  gen_cmd->add_option("--config", gen_config, "File of key = value settings");
  gen_cmd->add_option("--set", gen_sets, "Extra key=value setting (repeatable)");
  for (const char* key : {"members", "seed", "outlier-index", "jitter", "noise", "rows", "cols", "length", "period",
                          "variation", "bumps"}) {
    gen_cmd->add_option_function<std::string>(
        std::string("--") + key, [&gen_flags, key](const std::string& v) { gen_flags[key] = v; }, "Setting");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*tree_cmd) {
      auto field = load_scalar_field(tree_input);
      field.connectivity = tree_field.connectivity;
      auto tree = compute_merge_tree(field, tree_field.direction == "min" ? SweepDirection::kMinima
                                                                          : SweepDirection::kMaxima);
      if (tree_field.simplify > 0) tree = simplify(tree, tree_field.simplify);
      emit(tree_out, [&](std::ostream& out) { write_merge_tree(out, tree); });
    } else if (*dist_cmd) {
      const auto cfg = dist_opts.config();
      if (!dist_mapping.empty() && !has_branch_mapping(cfg.kind)) {
        throw UsageError("--mapping needs a branch distance");
      }
      const auto trees = load_trees({dist_a, dist_b}, dist_field, jobs);
      if (has_branch_mapping(cfg.kind)) {
        const auto r = branch_distance(trees[0], trees[1], cfg, !dist_mapping.empty());
        std::cout << format_value(r.distance) << "\n";
        if (!dist_mapping.empty()) {
          emit(dist_mapping, [&](std::ostream& out) { out << mapping_to_json(r.mapping).dump(2) << "\n"; });
        }
      } else {
        std::cout << format_value(tree_distance(trees[0], trees[1], cfg)) << "\n";
      }
    } else if (*matrix_cmd) {
      const auto cfg = matrix_opts.config();
      const auto paths = expand_inputs(matrix_inputs);
      if (paths.size() < 2) throw UsageError("matrix needs at least two members");
      const auto trees = load_trees(paths, matrix_field, jobs);
      auto m = compute_distance_matrix(trees, stems(paths), cfg, jobs);
      if (matrix_order == "cluster") m = permuted(m, single_linkage_order(m));
      emit(matrix_out, [&](std::ostream& out) { write_matrix_csv(out, m); });
      if (!matrix_heatmap.empty()) emit(matrix_heatmap, [&](std::ostream& out) { write_matrix_pgm(out, m); }, true);
    } else if (*track_cmd) {
      const auto cfg = track_opts.config();
      if (!has_branch_mapping(cfg.kind)) throw UsageError("tracking needs a branch distance");
      const auto paths = expand_inputs(track_inputs);
      if (paths.size() < 2) throw UsageError("tracking needs at least two time steps");
      const auto r = track_features(load_trees(paths, track_field, jobs), cfg, jobs);
      emit(track_out, [&](std::ostream& out) { out << tracking_to_json(r, stems(paths)).dump(2) << "\n"; });
    } else if (*gen_cmd) {
      std::map<std::string, std::string> kv;
      if (!gen_config.empty()) {
        std::ifstream in(gen_config);
        if (!in) throw Error("cannot open '" + gen_config + "' for reading");
        kv = read_key_values(in, gen_config);
      }
      for (const auto& s : gen_sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + s + "'");
        kv[s.substr(0, eq)] = s.substr(eq + 1);
      }
      for (const auto& [k, v] : gen_flags) kv[k] = v;

      std::vector<ScalarField2D> fields;
      try {
        if (gen_kind == "periodic") {
          PeriodicSpec spec;
          apply_settings(spec, kv);
          fields = generate_periodic_series(spec);
        } else {
          EnsembleSpec spec = gen_kind == "outlier" ? outlier_ensemble_spec() : EnsembleSpec{};
          apply_settings(spec, kv);
          fields = generate_ensemble(spec);
        }
      } catch (const PreconditionError& e) {
        throw UsageError(e.what());  // the settings themselves are out of range
      }
      fs::create_directories(gen_dir);
      for (std::size_t k = 0; k < fields.size(); ++k) {
        save_scalar_field((fs::path(gen_dir) / ("member_" + std::to_string(k) + ".sf2")).string(), fields[k]);
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
