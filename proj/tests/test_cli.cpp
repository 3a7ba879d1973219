#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "seedgnn/bench.hpp"

using namespace seedgnn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("slurp: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) : path_(fs::temp_directory_path() / tag) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

SeedGnnConfig tiny_config(Variant variant) {
  SeedGnnConfig cfg;
  cfg.num_layers = 2;
  cfg.channels = 4;
  cfg.hidden = 4;
  cfg.variant = variant;
  return cfg;
}

}  // namespace

TEST(ParallelFor, CoversEveryIndexExactlyOnce) {
  std::vector<int> hits(200, 0);
  bench::parallel_for(200, [&](int i) { hits[i] += i + 1; });
  for (int i = 0; i < 200; ++i) EXPECT_EQ(hits[i], i + 1);
  bench::parallel_for(0, [&](int) { FAIL() << "no jobs expected"; });
}

TEST(ParallelFor, PropagatesTheFirstException) {
  EXPECT_THROW(bench::parallel_for(8,
                                   [&](int i) {
                                     if (i == 3) throw std::runtime_error("boom");
                                   }),
               std::runtime_error);
}

TEST(GenerateDataset, WritesInstancesManifestAndRoundRobinCells) {
  TempDir dir("seedgnn_test_gen");
  bench::GenerateSpec spec;
  spec.out_dir = dir.str();
  spec.count = 7;
  spec.n = 12;
  spec.p_values = {0.2, 0.5};
  spec.s_values = {0.7, 1.0};
  spec.theta = 0.3;
  spec.seed = 9;
  const auto entries = bench::generate_dataset(spec);
  ASSERT_EQ(entries.size(), 7u);

  int files = 0;
  for (const auto& e : fs::directory_iterator(dir.path())) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 7 * 4 + 1);

  // Instance k gets grid cell k mod 4, p varying slowest.
  const double expect_p[] = {0.2, 0.2, 0.5, 0.5, 0.2, 0.2, 0.5};
  const double expect_s[] = {0.7, 1.0, 0.7, 1.0, 0.7, 1.0, 0.7};
  for (int k = 0; k < 7; ++k) {
    EXPECT_EQ(entries[k].id, k);
    EXPECT_EQ(entries[k].p, expect_p[k]);
    EXPECT_EQ(entries[k].s, expect_s[k]);
    EXPECT_EQ(entries[k].g1, bench::instance_stem(k) + "_g1.edges");
  }

  // What load_dataset returns must equal the instances that were generated.
  const auto loaded = bench::load_dataset(dir.str());
  const Rng root(spec.seed);
  ASSERT_EQ(loaded.size(), 7u);
  for (int k = 0; k < 7; ++k) {
    const GraphPairInstance fresh =
        generate_correlated_er(spec.n, expect_p[k], expect_s[k], spec.theta, root.split(k));
    EXPECT_EQ(loaded[k].g1, fresh.g1) << "instance " << k;
    EXPECT_EQ(loaded[k].g2, fresh.g2) << "instance " << k;
    EXPECT_EQ(loaded[k].seeds, fresh.seeds) << "instance " << k;
    EXPECT_EQ(loaded[k].truth, fresh.truth) << "instance " << k;
  }
}

TEST(GenerateDataset, RegenerationIsByteIdentical) {
  TempDir a("seedgnn_test_gen_a"), b("seedgnn_test_gen_b");
  bench::GenerateSpec spec;
  spec.count = 5;
  spec.n = 10;
  spec.seed = 4;
  spec.out_dir = a.str();
  bench::generate_dataset(spec);
  spec.out_dir = b.str();
  bench::generate_dataset(spec);
  for (const auto& e : fs::directory_iterator(a.path())) {
    const fs::path twin = b.path() / e.path().filename();
    ASSERT_TRUE(fs::exists(twin)) << twin;
    EXPECT_EQ(slurp(e.path()), slurp(twin)) << e.path().filename();
  }
}

TEST(GenerateDataset, ValidatesItsSpec) {
  bench::GenerateSpec spec;
  spec.out_dir = (fs::temp_directory_path() / "seedgnn_test_gen_bad").string();
  spec.count = 0;
  EXPECT_THROW(bench::generate_dataset(spec), std::invalid_argument);
  spec.count = 1;
  spec.p_values.clear();
  EXPECT_THROW(bench::generate_dataset(spec), std::invalid_argument);
}

TEST(Manifest, RejectsMissingOrForeignFiles) {
  EXPECT_THROW(bench::read_manifest("/nonexistent/dataset"), std::runtime_error);
  TempDir dir("seedgnn_test_manifest");
  {
    std::ofstream out(dir.path() / "manifest.json");
    out << "{\"format\": \"something-else\", \"instances\": []}\n";
  }
  EXPECT_THROW(bench::read_manifest(dir.str()), std::runtime_error);
  {
    std::ofstream out(dir.path() / "manifest.json");
    out << "not json at all\n";
  }
  EXPECT_THROW(bench::read_manifest(dir.str()), std::runtime_error);
}

TEST(CsvOutput, SweepFileCarriesSchemaHeaderAndRows) {
  TempDir dir("seedgnn_test_csv");
  std::vector<bench::SweepRow> rows(2);
  rows[0] = {"1hop", 50, 0.2, 0.8, 0.05, 0, 0.75, 0.5, 12.5};
  rows[1] = {"sgm", 50, 0.2, 0.8, 0.05, 1, 1.0, 1.0, 3.25};
  const fs::path path = dir.path() / "sweep.csv";
  bench::write_sweep_csv(rows, bench::kSweepSchema, path.string());
  const auto lines = read_lines(path);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], std::string("# schema: ") + bench::kSweepSchema);
  EXPECT_EQ(lines[1], "algorithm,n,p,s,theta,trial,accuracy_all,accuracy_non_seed,wall_ms");
  EXPECT_EQ(lines[2], "1hop,50,0.2,0.8,0.05,0,0.750000,0.500000,12.500");
  EXPECT_EQ(lines[3], "sgm,50,0.2,0.8,0.05,1,1.000000,1.000000,3.250");
}

TEST(CsvOutput, TrainFileListsEveryStep) {
  TempDir dir("seedgnn_test_traincsv");
  TrainResult result;
  result.history.push_back({0, 1, 2, 3.5});
  result.history.push_back({1, 2, 0, 1.25});
  const fs::path path = dir.path() / "loss.csv";
  bench::write_train_csv(result, path.string());
  const auto lines = read_lines(path);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], std::string("# schema: ") + bench::kTrainSchema);
  EXPECT_EQ(lines[1], "epoch,step,instance,loss");
  EXPECT_EQ(lines[2], "0,1,2,3.5");
  EXPECT_EQ(lines[3], "1,2,0,1.25");
}

TEST(RunAlgorithm, DispatchesEveryKnownToken) {
  const GraphPairInstance inst = generate_correlated_er(15, 0.3, 0.9, 0.4, Rng(90));
  Rng wrng(91);
  const SeedGnnModel model = make_seedgnn(tiny_config(Variant::kFull), wrng);
  for (const std::string& algo : bench::known_algorithms()) {
    const Matching m = bench::run_algorithm(algo, inst, &model);
    EXPECT_EQ(m.rows(), inst.n1()) << algo;
  }
  EXPECT_THROW(bench::run_algorithm("seedgnn", inst, nullptr), std::invalid_argument);
  EXPECT_THROW(bench::run_algorithm("spectral", inst, &model), std::invalid_argument);
}

TEST(RunSweep, ProducesTaskMajorRowsOverTheGrid) {
  bench::SweepSpec spec;
  spec.n = 30;
  spec.p_values = {0.3};
  spec.s_values = {0.9};
  spec.theta_values = {0.2, 0.4};
  spec.trials = 2;
  spec.seed = 5;
  spec.algorithms = {"1hop", "pgm"};
  const auto rows = bench::run_sweep(spec);
  ASSERT_EQ(rows.size(), 2u * 2u * 2u);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const bench::SweepRow& r = rows[k];
    EXPECT_EQ(r.algorithm, k % 2 == 0 ? "1hop" : "pgm");
    EXPECT_EQ(r.n, 30);
    EXPECT_EQ(r.p, 0.3);
    EXPECT_EQ(r.s, 0.9);
    EXPECT_EQ(r.theta, k < 4 ? 0.2 : 0.4);
    EXPECT_EQ(r.trial, static_cast<int>(k / 2) % 2);
    EXPECT_GE(r.acc_all, 0.0);
    EXPECT_LE(r.acc_all, 1.0);
    EXPECT_GE(r.wall_ms, 0.0);
  }
  EXPECT_NO_THROW(bench::mean_accuracy(rows, "1hop", 0.2));
  EXPECT_THROW(bench::mean_accuracy(rows, "sgm", 0.2), std::invalid_argument);
}

TEST(RunSweep, RealModeSubsamplesTheParentEdgeList) {
  TempDir dir("seedgnn_test_realsweep");
  Rng rng(92);
  const Graph parent = erdos_renyi(40, 0.3, rng);
  const fs::path parent_path = dir.path() / "parent.edges";
  write_edge_list(parent, parent_path.string());

  bench::SweepSpec spec;
  spec.p_values = {0.0};  // ignored in real mode, replaced by parent density
  spec.s_values = {0.9};
  spec.theta_values = {0.3};
  spec.trials = 3;
  spec.seed = 6;
  spec.algorithms = {"1hop"};
  spec.parent_path = parent_path.string();
  spec.node_keep = 0.9;
  const auto rows = bench::run_sweep(spec);
  ASSERT_EQ(rows.size(), 3u);
  const double density = parent.num_edges() / (0.5 * 40 * 39);
  for (const bench::SweepRow& r : rows) {
    EXPECT_GT(r.n, 0);
    EXPECT_LE(r.n, 40);
    EXPECT_DOUBLE_EQ(r.p, density);
  }
}

TEST(RunSweep, ValidatesItsSpec) {
  bench::SweepSpec spec;
  spec.algorithms = {"seedgnn"};
  spec.checkpoint.clear();
  EXPECT_THROW(bench::run_sweep(spec), std::invalid_argument);
  spec.algorithms = {"quantum"};
  EXPECT_THROW(bench::run_sweep(spec), std::invalid_argument);
  spec.algorithms = {"1hop"};
  spec.trials = 0;
  EXPECT_THROW(bench::run_sweep(spec), std::invalid_argument);
  spec.trials = 1;
  spec.theta_values.clear();
  EXPECT_THROW(bench::run_sweep(spec), std::invalid_argument);
}

TEST(RunAblate, EvaluatesAllFiveVariantsPerTrial) {
  TempDir dir("seedgnn_test_ablate");
  for (Variant v : all_variants()) {
    Rng wrng(93);
    const SeedGnnModel model = make_seedgnn(tiny_config(v), wrng);
    save_checkpoint(model, dir.str() + "/" + to_string(v) + ".ckpt");
  }
  bench::AblateSpec spec;
  spec.model_dir = dir.str();
  spec.n = 12;
  spec.p = 0.3;
  spec.s = 0.9;
  spec.theta = 0.3;
  spec.trials = 2;
  const auto rows = bench::run_ablate(spec);
  ASSERT_EQ(rows.size(), 10u);
  for (int trial = 0; trial < 2; ++trial)
    for (int a = 0; a < 5; ++a) {
      const bench::SweepRow& r = rows[trial * 5 + a];
      EXPECT_EQ(r.algorithm, to_string(all_variants()[a]));
      EXPECT_EQ(r.trial, trial);
      EXPECT_GE(r.acc_all, 0.0);
      EXPECT_LE(r.acc_all, 1.0);
    }
}

TEST(RunAblate, RejectsAMislabeledCheckpoint) {
  TempDir dir("seedgnn_test_ablate_bad");
  for (Variant v : all_variants()) {
    Rng wrng(94);
    const SeedGnnModel model = make_seedgnn(tiny_config(v), wrng);
    save_checkpoint(model, dir.str() + "/" + to_string(v) + ".ckpt");
  }
  Rng wrng(95);
  const SeedGnnModel full = make_seedgnn(tiny_config(Variant::kFull), wrng);
  save_checkpoint(full, dir.str() + "/x.ckpt");  // wrong variant under this name
  bench::AblateSpec spec;
  spec.model_dir = dir.str();
  spec.n = 10;
  spec.trials = 1;
  EXPECT_THROW(bench::run_ablate(spec), std::runtime_error);
}

TEST(DumpLayers, WritesSimilarityAssignmentAndHeatmapPerLayer) {
  TempDir dir("seedgnn_test_dump");
  Rng wrng(96);
  const SeedGnnModel model = make_seedgnn(tiny_config(Variant::kFull), wrng);
  const std::string ckpt = dir.str() + "/model.ckpt";
  save_checkpoint(model, ckpt);

  bench::DumpSpec spec;
  spec.checkpoint = ckpt;
  spec.out_dir = dir.str() + "/dump";
  spec.n = 12;
  spec.p = 0.3;
  spec.s = 0.9;
  spec.theta = 0.3;
  spec.seed = 97;
  bench::run_dump_layers(spec);

  for (int l = 1; l <= 2; ++l) {
    const std::string stem = spec.out_dir + "/layer" + std::to_string(l);
    const auto y_lines = read_lines(stem + "_y.csv");
    ASSERT_EQ(y_lines.size(), 12u) << stem;
    for (const std::string& line : y_lines)
      EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11);

    const auto r_lines = read_lines(stem + "_r.csv");
    ASSERT_EQ(r_lines.size(), 12u);
    int ones = 0;
    for (const std::string& line : r_lines)
      for (char c : line)
        if (c == '1') ++ones;
    EXPECT_EQ(ones, 12);

    const std::string svg = slurp(stem + "_y.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }

  bench::DumpSpec missing;
  missing.out_dir = dir.str() + "/dump2";
  EXPECT_THROW(bench::run_dump_layers(missing), std::invalid_argument);
}
