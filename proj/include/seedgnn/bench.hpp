#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seedgnn/assignment.hpp"
#include "seedgnn/baselines.hpp"
#include "seedgnn/generate.hpp"
#include "seedgnn/graph.hpp"
#include "seedgnn/model.hpp"

namespace seedgnn::bench {

constexpr const char* kDatasetFormat = "seedgnn-dataset-v1";
constexpr const char* kSweepSchema = "seedgnn-sweep-v1";
constexpr const char* kAblateSchema = "seedgnn-ablate-v1";
constexpr const char* kTrainSchema = "seedgnn-train-v1";

// ---------------------------------------------------------------------------
// Task pool: index-addressed jobs over the available cores. Results must be
// written to preallocated slots keyed by job index, which keeps every output
// independent of scheduling order.
// ---------------------------------------------------------------------------

inline void parallel_for(int count, const std::function<void(int)>& job) {
  if (count <= 0) return;
  unsigned width = std::thread::hardware_concurrency();
  if (width == 0) width = 1;
  if (width > static_cast<unsigned>(count)) width = static_cast<unsigned>(count);
  if (width <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(width);
  for (unsigned t = 0; t < width; ++t)
    workers.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (std::thread& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Dataset generation and loading.
// ---------------------------------------------------------------------------

struct GenerateSpec {
  std::string out_dir;
  int count = 100;
  int n = 100;
  std::vector<double> p_values = {0.1, 0.3, 0.5};
  std::vector<double> s_values = {0.6, 0.8, 1.0};
  double theta = 0.1;
  std::uint64_t seed = 1;
};

struct DatasetEntry {
  int id = 0;
  int n = 0;
  double p = 0.0, s = 0.0, theta = 0.0;
  std::string g1, g2, seeds, truth;
};

inline std::string instance_stem(int id) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", id);
  return buf;
}

/// Write count correlated-pair instances plus a manifest. Instance k draws
/// its (p, s) cell round-robin from the grid and derives all randomness from
/// split(k) of the root seed, so any instance regenerates independently.
inline std::vector<DatasetEntry> generate_dataset(const GenerateSpec& spec) {
  if (spec.count < 1) throw std::invalid_argument("generate_dataset: count must be >= 1");
  if (spec.p_values.empty() || spec.s_values.empty())
    throw std::invalid_argument("generate_dataset: empty parameter grid");
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  const Rng root(spec.seed);
  const int cells = static_cast<int>(spec.p_values.size() * spec.s_values.size());
  std::vector<DatasetEntry> entries;
  nlohmann::json manifest;
  manifest["format"] = kDatasetFormat;
  manifest["seed"] = spec.seed;
  manifest["instances"] = nlohmann::json::array();
  for (int k = 0; k < spec.count; ++k) {
    const int cell = k % cells;
    const double p = spec.p_values[cell / spec.s_values.size()];
    const double s = spec.s_values[cell % spec.s_values.size()];
    const GraphPairInstance inst =
        generate_correlated_er(spec.n, p, s, spec.theta, root.split(static_cast<std::uint64_t>(k)));
    DatasetEntry e;
    e.id = k;
    e.n = spec.n;
    e.p = p;
    e.s = s;
    e.theta = spec.theta;
    const std::string stem = instance_stem(k);
    e.g1 = stem + "_g1.edges";
    e.g2 = stem + "_g2.edges";
    e.seeds = stem + "_seeds.txt";
    e.truth = stem + "_truth.txt";
    write_edge_list(inst.g1, spec.out_dir + "/" + e.g1);
    write_edge_list(inst.g2, spec.out_dir + "/" + e.g2);
    write_pair_file(inst.seeds, spec.out_dir + "/" + e.seeds);
    write_truth_file(inst.truth, spec.out_dir + "/" + e.truth);
    nlohmann::json je;
    je["id"] = e.id;
    je["n"] = e.n;
    je["p"] = e.p;
    je["s"] = e.s;
    je["theta"] = e.theta;
    je["g1"] = e.g1;
    je["g2"] = e.g2;
    je["seeds"] = e.seeds;
    je["truth"] = e.truth;
    manifest["instances"].push_back(je);
    entries.push_back(std::move(e));
  }
  std::ofstream out(spec.out_dir + "/manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + spec.out_dir);
  out << manifest.dump(2) << "\n";
  if (!out) throw std::runtime_error("manifest write failed in " + spec.out_dir);
  return entries;
}

inline std::vector<DatasetEntry> read_manifest(const std::string& dir) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) throw std::runtime_error("cannot open manifest in " + dir);
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(dir + "/manifest.json: " + e.what());
  }
  if (manifest.value("format", "") != kDatasetFormat)
    throw std::runtime_error(dir + "/manifest.json: unknown dataset format");
  std::vector<DatasetEntry> entries;
  for (const auto& je : manifest.at("instances")) {
    DatasetEntry e;
    e.id = je.at("id").get<int>();
    e.n = je.at("n").get<int>();
    e.p = je.at("p").get<double>();
    e.s = je.at("s").get<double>();
    e.theta = je.at("theta").get<double>();
    e.g1 = je.at("g1").get<std::string>();
    e.g2 = je.at("g2").get<std::string>();
    e.seeds = je.at("seeds").get<std::string>();
    e.truth = je.at("truth").get<std::string>();
    entries.push_back(std::move(e));
  }
  return entries;
}

inline GraphPairInstance load_instance(const std::string& dir, const DatasetEntry& e) {
  GraphPairInstance inst;
  inst.g1 = read_edge_list(dir + "/" + e.g1);
  inst.g2 = read_edge_list(dir + "/" + e.g2);
  inst.seeds = read_pair_file(dir + "/" + e.seeds);
  inst.truth = read_truth_file(dir + "/" + e.truth);
  if (static_cast<int>(inst.truth.size()) != inst.n1())
    throw std::runtime_error(dir + "/" + e.truth + ": truth size does not match " + e.g1);
  return inst;
}

inline std::vector<GraphPairInstance> load_dataset(const std::string& dir) {
  std::vector<GraphPairInstance> data;
  for (const DatasetEntry& e : read_manifest(dir)) data.push_back(load_instance(dir, e));
  return data;
}

// ---------------------------------------------------------------------------
// CSV output.
// ---------------------------------------------------------------------------

struct SweepRow {
  std::string algorithm;
  int n = 0;
  double p = 0.0, s = 0.0, theta = 0.0;
  int trial = 0;
  double acc_all = 0.0;
  double acc_non_seed = 0.0;
  double wall_ms = 0.0;
};

inline void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& schema,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << "# schema: " << schema << "\n";
  out << "algorithm,n,p,s,theta,trial,accuracy_all,accuracy_non_seed,wall_ms\n";
  char buf[160];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%g,%g,%g,%d,%.6f,%.6f,%.3f", r.algorithm.c_str(), r.n,
                  r.p, r.s, r.theta, r.trial, r.acc_all, r.acc_non_seed, r.wall_ms);
    out << buf << "\n";
  }
  if (!out) throw std::runtime_error("csv write failed: " + path);
}

inline void write_train_csv(const TrainResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << "# schema: " << kTrainSchema << "\n";
  out << "epoch,step,instance,loss\n";
  char buf[96];
  for (const TrainStep& s : result.history) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.9g", s.epoch, s.step, s.instance, s.loss);
    out << buf << "\n";
  }
  if (!out) throw std::runtime_error("csv write failed: " + path);
}

// ---------------------------------------------------------------------------
// Algorithm dispatch.
// ---------------------------------------------------------------------------

/// Algorithm tokens accepted by sweeps. The hop matchers split the layer
/// budget so that hops * rounds = 6 in both cases.
inline const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names = {"seedgnn", "1hop", "2hop", "pgm", "sgm"};
  return names;
}

inline Matching run_algorithm(const std::string& algo, const GraphPairInstance& inst,
                              const SeedGnnModel* model) {
  if (algo == "seedgnn") {
    if (!model) throw std::invalid_argument("run_algorithm: seedgnn requires a checkpoint");
    return seedgnn_predict(*model, inst.g1, inst.g2, inst.seeds);
  }
  if (algo == "1hop") return d_hop_match(inst.g1, inst.g2, inst.seeds, DHopConfig{1, 6, false});
  if (algo == "2hop") return d_hop_match(inst.g1, inst.g2, inst.seeds, DHopConfig{2, 3, false});
  if (algo == "pgm") return pgm_match(inst.g1, inst.g2, inst.seeds, PgmConfig{2});
  if (algo == "sgm") return sgm_match(inst.g1, inst.g2, inst.seeds, SgmConfig{});
  throw std::invalid_argument("unknown algorithm: " + algo +
                              " (expected seedgnn|1hop|2hop|pgm|sgm)");
}

// ---------------------------------------------------------------------------
// Sweeps.
// ---------------------------------------------------------------------------

struct SweepSpec {
  int n = 500;
  std::vector<double> p_values = {0.2};
  std::vector<double> s_values = {0.8};
  std::vector<double> theta_values = {0.0, 0.01, 0.02, 0.05, 0.1};
  int trials = 10;
  std::uint64_t seed = 1;
  std::vector<std::string> algorithms = {"seedgnn", "1hop", "2hop", "pgm", "sgm"};
  std::string checkpoint;   // required when seedgnn is requested
  std::string parent_path;  // real-graph mode: subsample this edge list instead of ER
  double node_keep = 0.9;
};

/// Run every algorithm over the (p, s, theta) x trials grid. Each grid task
/// owns RNG stream split(task_index) of the sweep seed and evaluates all
/// algorithms on the same instance. Rows come back in task-major order
/// regardless of how the pool schedules the work.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
  if (spec.p_values.empty() || spec.s_values.empty() || spec.theta_values.empty())
    throw std::invalid_argument("run_sweep: empty grid");
  for (const std::string& algo : spec.algorithms) {
    bool known = false;
    for (const std::string& k : known_algorithms()) known = known || k == algo;
    if (!known) throw std::invalid_argument("run_sweep: unknown algorithm " + algo);
  }

  SeedGnnModel model;
  bool have_model = false;
  for (const std::string& algo : spec.algorithms)
    if (algo == "seedgnn") {
      if (spec.checkpoint.empty())
        throw std::invalid_argument("run_sweep: seedgnn requested without a checkpoint");
      model = load_checkpoint(spec.checkpoint);
      have_model = true;
    }

  Graph parent;
  const bool real_mode = !spec.parent_path.empty();
  if (real_mode) parent = read_edge_list(spec.parent_path);

  struct Cell {
    double p, s, theta;
  };
  std::vector<Cell> cells;
  for (double p : spec.p_values)
    for (double s : spec.s_values)
      for (double theta : spec.theta_values) cells.push_back({p, s, theta});

  const int tasks = static_cast<int>(cells.size()) * spec.trials;
  const int per_task = static_cast<int>(spec.algorithms.size());
  std::vector<SweepRow> rows(static_cast<std::size_t>(tasks) * per_task);
  const Rng root(spec.seed);

  parallel_for(tasks, [&](int task) {
    const Cell& cell = cells[task / spec.trials];
    const int trial = task % spec.trials;
    const Rng task_rng = root.split(static_cast<std::uint64_t>(task));
    GraphPairInstance inst;
    double density = cell.p;
    if (real_mode) {
      inst = subsample_real_pair(parent, spec.node_keep, cell.s, cell.theta, task_rng);
      const double pairs = 0.5 * parent.num_nodes() * (parent.num_nodes() - 1);
      density = pairs > 0 ? parent.num_edges() / pairs : 0.0;
    } else {
      inst = generate_correlated_er(spec.n, cell.p, cell.s, cell.theta, task_rng);
    }
    for (int a = 0; a < per_task; ++a) {
      const std::string& algo = spec.algorithms[a];
      const auto start = std::chrono::steady_clock::now();
      const Matching m = run_algorithm(algo, inst, have_model ? &model : nullptr);
      const auto stop = std::chrono::steady_clock::now();
      SweepRow row;
      row.algorithm = algo;
      row.n = real_mode ? inst.n1() : spec.n;
      row.p = density;
      row.s = cell.s;
      row.theta = cell.theta;
      row.trial = trial;
      row.acc_all = matching_accuracy(m, inst.truth, inst.seeds, AccuracyMode::kAll);
      row.acc_non_seed = matching_accuracy(m, inst.truth, inst.seeds, AccuracyMode::kNonSeed);
      row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      rows[static_cast<std::size_t>(task) * per_task + a] = std::move(row);
    }
  });
  return rows;
}

/// Mean accuracy over the rows matching one algorithm and theta.
inline double mean_accuracy(const std::vector<SweepRow>& rows, const std::string& algo,
                            double theta, bool non_seed = false) {
  double sum = 0.0;
  int count = 0;
  for (const SweepRow& r : rows)
    if (r.algorithm == algo && std::fabs(r.theta - theta) < 1e-12) {
      sum += non_seed ? r.acc_non_seed : r.acc_all;
      ++count;
    }
  if (count == 0) throw std::invalid_argument("mean_accuracy: no rows for " + algo);
  return sum / count;
}

// ---------------------------------------------------------------------------
// Ablation runs.
// ---------------------------------------------------------------------------

struct AblateSpec {
  std::string model_dir;  // holds <variant>.ckpt for all five variants
  int n = 500;
  double p = 0.04, s = 0.8, theta = 0.05;
  int trials = 10;
  std::uint64_t seed = 1;
};

/// Evaluate the five ablation variants on a common set of instances. Each
/// trial generates one instance; all variants predict on it.
inline std::vector<SweepRow> run_ablate(const AblateSpec& spec) {
  std::vector<SeedGnnModel> models;
  for (Variant v : all_variants()) {
    const std::string path = spec.model_dir + "/" + to_string(v) + ".ckpt";
    models.push_back(load_checkpoint(path));
    if (models.back().config.variant != v)
      throw std::runtime_error(path + ": checkpoint variant does not match its filename");
  }
  const Rng root(spec.seed);
  const int per_trial = static_cast<int>(models.size());
  std::vector<SweepRow> rows(static_cast<std::size_t>(spec.trials) * per_trial);
  parallel_for(spec.trials, [&](int trial) {
    const GraphPairInstance inst = generate_correlated_er(
        spec.n, spec.p, spec.s, spec.theta, root.split(static_cast<std::uint64_t>(trial)));
    for (int a = 0; a < per_trial; ++a) {
      const auto start = std::chrono::steady_clock::now();
      const Matching m = seedgnn_predict(models[a], inst.g1, inst.g2, inst.seeds);
      const auto stop = std::chrono::steady_clock::now();
      SweepRow row;
      row.algorithm = to_string(all_variants()[a]);
      row.n = spec.n;
      row.p = spec.p;
      row.s = spec.s;
      row.theta = spec.theta;
      row.trial = trial;
      row.acc_all = matching_accuracy(m, inst.truth, inst.seeds, AccuracyMode::kAll);
      row.acc_non_seed = matching_accuracy(m, inst.truth, inst.seeds, AccuracyMode::kNonSeed);
      row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      rows[static_cast<std::size_t>(trial) * per_trial + a] = std::move(row);
    }
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Layer dumps.
// ---------------------------------------------------------------------------

struct DumpSpec {
  std::string checkpoint;
  std::string out_dir;
  int n = 50;
  double p = 0.1, s = 0.8, theta = 0.1;
  std::uint64_t seed = 1;
};

inline void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix csv: " + path);
  char buf[48];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", m(i, j));
      out << buf << (j + 1 < m.cols() ? "," : "");
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("matrix csv write failed: " + path);
}

/// Grayscale heatmap, darker = larger. One 8px rect per entry.
inline void write_heatmap_svg(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write svg: " + path);
  const int cell = 8;
  const int width = m.cols() * cell;
  const int height = m.rows() * cell;
  double peak = 0.0;
  for (std::size_t t = 0; t < m.size(); ++t) peak = std::max(peak, m.data()[t]);
  if (peak <= 0.0) peak = 1.0;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const double v = std::max(0.0, m(i, j)) / peak;
      const int gray = 255 - static_cast<int>(std::lround(v * 255.0));
      if (gray >= 255) continue;  // white background already
      out << "<rect x=\"" << j * cell << "\" y=\"" << i * cell << "\" width=\"" << cell
          << "\" height=\"" << cell << "\" fill=\"rgb(" << gray << "," << gray << "," << gray
          << ")\"/>\n";
    }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("svg write failed: " + path);
}

/// Per-layer similarity and assignment dump for one generated instance:
/// layer<k>_y.csv and layer<k>_r.csv in instance labels, plus layer<k>_y.svg
/// heatmaps with rows sorted by descending g1 degree and columns aligned by
/// ground truth, so correct mass concentrates on the diagonal.
inline void run_dump_layers(const DumpSpec& spec) {
  if (spec.checkpoint.empty()) throw std::invalid_argument("run_dump_layers: needs a checkpoint");
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  const SeedGnnModel model = load_checkpoint(spec.checkpoint);
  const GraphPairInstance inst =
      generate_correlated_er(spec.n, spec.p, spec.s, spec.theta, Rng(spec.seed));
  const ForwardTrace trace =
      seedgnn_forward(model, inst.g1, inst.g2, inst.seeds, TraceDetail::kEvaluation);

  std::vector<int> order(inst.n1());
  for (int i = 0; i < inst.n1(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (inst.g1.degree(a) != inst.g1.degree(b)) return inst.g1.degree(a) > inst.g1.degree(b);
    return a < b;
  });

  for (int l = 0; l < static_cast<int>(trace.layers.size()); ++l) {
    const LayerRecord& rec = trace.layers[l];
    const std::string stem = spec.out_dir + "/layer" + std::to_string(l + 1);
    write_matrix_csv(rec.y, stem + "_y.csv");
    write_matrix_csv(matching_matrix(rec.r, inst.n2()), stem + "_r.csv");
    Matrix aligned(inst.n1(), inst.n1());
    for (int a = 0; a < inst.n1(); ++a)
      for (int b = 0; b < inst.n1(); ++b)
        aligned(a, b) = rec.y(order[a], inst.truth[order[b]]);
    write_heatmap_svg(aligned, stem + "_y.svg");
  }
}

}  // namespace seedgnn::bench
