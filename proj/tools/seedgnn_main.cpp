// Command-line front end: generate datasets, train models, run benchmark
// sweeps and ablations, dump per-layer similarity matrices.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seedgnn/seedgnn.hpp"

namespace {

using namespace seedgnn;

int cmd_generate(const bench::GenerateSpec& spec) {
  const auto entries = bench::generate_dataset(spec);
  std::printf("wrote %zu instances to %s\n", entries.size(), spec.out_dir.c_str());
  return 0;
}

struct TrainArgs {
  std::string data_dir;
  std::string checkpoint_out = "model.ckpt";
  std::string loss_csv;
  std::string variant = "full";
  int epochs = 10;
  int batch_size = 1;
  double lr = 1e-2;
  std::uint64_t init_seed = 7;
  std::uint64_t shuffle_seed = 1;
  int checkpoint_every = 0;
  int layers = 6;
  int channels = 16;
  int hidden = 16;
  bool quiet = false;
};

int cmd_train(const TrainArgs& args) {
  const std::vector<GraphPairInstance> data = bench::load_dataset(args.data_dir);
  SeedGnnConfig cfg;
  cfg.num_layers = args.layers;
  cfg.channels = args.channels;
  cfg.hidden = args.hidden;
  cfg.variant = parse_variant(args.variant);
  Rng init_rng(args.init_seed);
  SeedGnnModel model = make_seedgnn(cfg, init_rng);

  TrainConfig tcfg;
  tcfg.epochs = args.epochs;
  tcfg.batch_size = args.batch_size;
  tcfg.adam.lr = args.lr;
  tcfg.seed = args.shuffle_seed;
  tcfg.checkpoint_every = args.checkpoint_every;
  tcfg.checkpoint_path = args.checkpoint_out;
  tcfg.verbose = !args.quiet;

  const TrainResult result = seedgnn_train(model, data, tcfg);
  if (!args.loss_csv.empty()) bench::write_train_csv(result, args.loss_csv);
  std::printf("trained %s model on %zu instances for %d epochs, final mean loss %.6f\n",
              args.variant.c_str(), data.size(), args.epochs, result.epoch_mean_loss.back());
  std::printf("checkpoint: %s\n", args.checkpoint_out.c_str());
  return 0;
}

int cmd_sweep(const bench::SweepSpec& spec, const std::string& out_csv) {
  const std::vector<bench::SweepRow> rows = bench::run_sweep(spec);
  bench::write_sweep_csv(rows, bench::kSweepSchema, out_csv);
  std::printf("wrote %zu rows to %s\n", rows.size(), out_csv.c_str());
  return 0;
}

int cmd_ablate(const bench::AblateSpec& spec, const std::string& out_csv) {
  const std::vector<bench::SweepRow> rows = bench::run_ablate(spec);
  bench::write_sweep_csv(rows, bench::kAblateSchema, out_csv);
  std::printf("wrote %zu rows to %s\n", rows.size(), out_csv.c_str());
  return 0;
}

int cmd_dump_layers(const bench::DumpSpec& spec) {
  bench::run_dump_layers(spec);
  std::printf("wrote layer dumps to %s\n", spec.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seeded graph matching toolkit"};
  app.require_subcommand(1);

  // generate
  bench::GenerateSpec gen;
  CLI::App* generate = app.add_subcommand("generate", "write a correlated graph-pair dataset");
  generate->add_option("--out", gen.out_dir, "output directory")->required();
  generate->add_option("--count", gen.count, "number of instances");
  generate->add_option("--n", gen.n, "nodes per graph");
  generate->add_option("--p", gen.p_values, "parent densities (grid)");
  generate->add_option("--s", gen.s_values, "edge survival rates (grid)");
  generate->add_option("--theta", gen.theta, "seed fraction");
  generate->add_option("--seed", gen.seed, "rng seed");

  // train
  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model on a generated dataset");
  train_cmd->add_option("--data", train.data_dir, "dataset directory")->required();
  train_cmd->add_option("--out", train.checkpoint_out, "checkpoint path");
  train_cmd->add_option("--loss-csv", train.loss_csv, "per-step loss log");
  train_cmd->add_option("--variant", train.variant, "full|x|van|per|hun");
  train_cmd->add_option("--epochs", train.epochs, "training epochs");
  train_cmd->add_option("--batch", train.batch_size, "examples averaged per optimizer step");
  train_cmd->add_option("--lr", train.lr, "learning rate");
  train_cmd->add_option("--init-seed", train.init_seed, "weight init seed");
  train_cmd->add_option("--shuffle-seed", train.shuffle_seed, "epoch shuffle seed");
  train_cmd->add_option("--checkpoint-every", train.checkpoint_every,
                        "steps between periodic snapshots (0 = off)");
  train_cmd->add_option("--layers", train.layers, "number of matching layers");
  train_cmd->add_option("--channels", train.channels, "pair feature channels");
  train_cmd->add_option("--hidden", train.hidden, "mlp hidden width");
  train_cmd->add_flag("--quiet", train.quiet, "suppress epoch summaries");

  // sweep
  bench::SweepSpec sweep;
  std::string sweep_csv = "sweep.csv";
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "benchmark algorithms over a parameter grid");
  sweep_cmd->add_option("--out", sweep_csv, "output csv");
  sweep_cmd->add_option("--n", sweep.n, "nodes per graph");
  sweep_cmd->add_option("--p", sweep.p_values, "parent densities (grid)");
  sweep_cmd->add_option("--s", sweep.s_values, "edge survival rates (grid)");
  sweep_cmd->add_option("--theta", sweep.theta_values, "seed fractions (grid)");
  sweep_cmd->add_option("--trials", sweep.trials, "trials per grid cell");
  sweep_cmd->add_option("--seed", sweep.seed, "rng seed");
  sweep_cmd->add_option("--algorithms", sweep.algorithms, "seedgnn|1hop|2hop|pgm|sgm");
  sweep_cmd->add_option("--checkpoint", sweep.checkpoint, "model checkpoint for seedgnn");
  sweep_cmd->add_option("--parent", sweep.parent_path,
                        "edge list of a real parent graph (replaces ER generation)");
  sweep_cmd->add_option("--node-keep", sweep.node_keep, "node survival for real-graph mode");

  // ablate
  bench::AblateSpec ablate;
  std::string ablate_csv = "ablate.csv";
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "evaluate the five model variants on one grid cell");
  ablate_cmd->add_option("--models", ablate.model_dir, "directory with <variant>.ckpt files")
      ->required();
  ablate_cmd->add_option("--out", ablate_csv, "output csv");
  ablate_cmd->add_option("--n", ablate.n, "nodes per graph");
  ablate_cmd->add_option("--p", ablate.p, "parent density");
  ablate_cmd->add_option("--s", ablate.s, "edge survival");
  ablate_cmd->add_option("--theta", ablate.theta, "seed fraction");
  ablate_cmd->add_option("--trials", ablate.trials, "number of instances");
  ablate_cmd->add_option("--seed", ablate.seed, "rng seed");

  // dump-layers
  bench::DumpSpec dump;
  CLI::App* dump_cmd =
      app.add_subcommand("dump-layers", "write per-layer similarity matrices and heatmaps");
  dump_cmd->add_option("--checkpoint", dump.checkpoint, "model checkpoint")->required();
  dump_cmd->add_option("--out", dump.out_dir, "output directory")->required();
  dump_cmd->add_option("--n", dump.n, "nodes per graph");
  dump_cmd->add_option("--p", dump.p, "parent density");
  dump_cmd->add_option("--s", dump.s, "edge survival");
  dump_cmd->add_option("--theta", dump.theta, "seed fraction");
  dump_cmd->add_option("--seed", dump.seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (train_cmd->parsed()) return cmd_train(train);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep, sweep_csv);
    if (ablate_cmd->parsed()) return cmd_ablate(ablate, ablate_csv);
    if (dump_cmd->parsed()) return cmd_dump_layers(dump);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  std::fprintf(stderr, "error: no subcommand\n");
  return 1;
}
