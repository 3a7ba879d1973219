#pragma once

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seedgnn/assignment.hpp"
#include "seedgnn/generate.hpp"
#include "seedgnn/graph.hpp"
#include "seedgnn/matrix.hpp"
#include "seedgnn/nn.hpp"
#include "seedgnn/pair_features.hpp"
#include "seedgnn/rng.hpp"

namespace seedgnn {

/// Ablation variants. Only kFull is the complete architecture; the others
/// disable one ingredient each and exist to measure its contribution.
enum class Variant {
  kFull,  // full: propagation + masked similarity feedback
  kX,     // x: propagation disabled, h_l = s_l
  kVan,   // van: feedback column is all zeros
  kPer,   // per: feedback is the raw similarity, no assignment mask
  kHun,   // hun: feedback is the 0/1 assignment matrix alone
};

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kX: return "x";
    case Variant::kVan: return "van";
    case Variant::kPer: return "per";
    case Variant::kHun: return "hun";
  }
  throw std::invalid_argument("to_string: bad variant");
}

inline Variant parse_variant(const std::string& name) {
  if (name == "full") return Variant::kFull;
  if (name == "x") return Variant::kX;
  if (name == "van") return Variant::kVan;
  if (name == "per") return Variant::kPer;
  if (name == "hun") return Variant::kHun;
  throw std::invalid_argument("unknown variant: " + name + " (expected full|x|van|per|hun)");
}

inline const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v = {Variant::kFull, Variant::kX, Variant::kVan,
                                         Variant::kPer, Variant::kHun};
  return v;
}

struct SeedGnnConfig {
  int num_layers = 6;
  int channels = 16;  // width of the per-pair feature handed to the next layer
  int hidden = 16;    // hidden width of every two-layer MLP
  Variant variant = Variant::kFull;
};

/// Per-layer weights: phi[l] maps propagated pair features to channels-1
/// fresh channels, rho[l] reduces those to the scalar similarity. Layer 0's
/// phi takes the single seed-indicator channel; later layers take the full
/// channels-wide input (phi output plus the feedback column).
struct SeedGnnModel {
  SeedGnnConfig config;
  std::vector<Mlp> phi;
  std::vector<Mlp> rho;
};

inline void validate_dimensions(const SeedGnnModel& model) {
  const auto& cfg = model.config;
  if (cfg.num_layers < 1 || cfg.channels < 2 || cfg.hidden < 1)
    throw std::invalid_argument("SeedGnnModel: degenerate configuration");
  if (static_cast<int>(model.phi.size()) != cfg.num_layers ||
      static_cast<int>(model.rho.size()) != cfg.num_layers)
    throw std::invalid_argument("SeedGnnModel: layer count mismatch");
  for (int l = 0; l < cfg.num_layers; ++l) {
    const int expect_in = (l == 0) ? 1 : cfg.channels;
    if (model.phi[l].in_dim() != expect_in || model.phi[l].out_dim() != cfg.channels - 1)
      throw std::invalid_argument("SeedGnnModel: phi dimensions broken at layer " +
                                  std::to_string(l));
    if (model.rho[l].in_dim() != cfg.channels - 1 || model.rho[l].out_dim() != 1)
      throw std::invalid_argument("SeedGnnModel: rho dimensions broken at layer " +
                                  std::to_string(l));
  }
}

/// Fresh model with Gaussian-initialized weights and biases. Draw order is
/// fixed (phi layers first, then rho), so one seed pins every weight.
inline SeedGnnModel make_seedgnn(const SeedGnnConfig& cfg, Rng& rng) {
  SeedGnnModel model;
  model.config = cfg;
  for (int l = 0; l < cfg.num_layers; ++l) {
    const int in = (l == 0) ? 1 : cfg.channels;
    model.phi.emplace_back(std::vector<int>{in, cfg.hidden, cfg.channels - 1});
    model.rho.emplace_back(std::vector<int>{cfg.channels - 1, cfg.hidden, 1});
  }
  for (Mlp& mlp : model.phi) init_gaussian(mlp, rng);
  for (Mlp& mlp : model.rho) init_gaussian(mlp, rng);
  validate_dimensions(model);
  return model;
}

inline SeedGnnModel zeros_like(const SeedGnnModel& model) {
  SeedGnnModel z;
  z.config = model.config;
  for (const Mlp& mlp : model.phi) z.phi.push_back(zeros_like(mlp));
  for (const Mlp& mlp : model.rho) z.rho.push_back(zeros_like(mlp));
  return z;
}

/// Visit every parameter tensor in a fixed canonical order.
template <typename ModelT, typename Fn>
void for_each_tensor(ModelT& model, Fn&& fn) {
  for (auto& mlp : model.phi)
    for (auto& layer : mlp.layers) {
      fn(layer.w);
      fn(layer.b);
    }
  for (auto& mlp : model.rho)
    for (auto& layer : mlp.layers) {
      fn(layer.w);
      fn(layer.b);
    }
}

inline void zero_tensors(SeedGnnModel& grads) {
  for_each_tensor(grads, [](Matrix& t) { t.fill(0.0); });
}

// ---------------------------------------------------------------------------
// Forward pass.
// ---------------------------------------------------------------------------

enum class TraceDetail {
  kEvaluation,  // keep y, r, x, z per layer; drop the wide tensors
  kTraining,    // additionally keep h, m and all MLP/softmax caches
};

struct LayerRecord {
  Matrix h;  // input to phi: propagated pair features after rescaling
  std::vector<double> h_scale;  // per-channel divisors applied to the raw features
  std::vector<int> h_argmax;    // row of each channel's maximum, for the backward pass
  Matrix m;  // phi output, (n1*n2) x (channels-1)
  Matrix x;  // rho output, (n1*n2) x 1
  Matrix y;  // symmetric-normalized similarity, n1 x n2
  Matching r;  // optimal assignment of y
  Matrix z;  // feedback column, (n1*n2) x 1
  MlpCache phi_cache, rho_cache;
  RowSoftmaxPair softmax_cache;
};

struct ForwardTrace {
  int n1 = 0;
  int n2 = 0;
  std::vector<LayerRecord> layers;
};

/// Dense n1 x n2 0/1 view of an assignment.
inline Matrix matching_matrix(const Matching& m, int n2) {
  Matrix out(m.rows(), n2);
  for (int i = 0; i < m.rows(); ++i)
    if (m.row_to_col[i] >= 0) out(i, m.row_to_col[i]) = 1.0;
  return out;
}

inline ForwardTrace seedgnn_forward(const SeedGnnModel& model, const Graph& g1, const Graph& g2,
                                    const std::vector<std::pair<int, int>>& seeds,
                                    TraceDetail detail = TraceDetail::kEvaluation) {
  validate_dimensions(model);
  const int n1 = g1.num_nodes();
  const int n2 = g2.num_nodes();
  if (n1 < 1) throw std::invalid_argument("seedgnn_forward: empty first graph");
  if (n1 > n2)
    throw std::invalid_argument("seedgnn_forward: first graph must not exceed the second");
  const auto& cfg = model.config;
  const long long widest = 1LL * n1 * n2 * cfg.channels;
  if (widest > pair_tensor_cap())
    throw std::runtime_error("seedgnn_forward: pair tensor of " + std::to_string(widest) +
                             " elements exceeds memory cap (set SEEDGNN_MEMORY_CAP to raise)");
  const bool training = detail == TraceDetail::kTraining;

  ForwardTrace trace;
  trace.n1 = n1;
  trace.n2 = n2;
  Matrix s = encode_seeds(n1, n2, seeds).data;

  for (int l = 0; l < cfg.num_layers; ++l) {
    LayerRecord rec;
    rec.h = (cfg.variant == Variant::kX) ? std::move(s) : propagate_values(g1, s, g2);
    // Neighborhood sums grow with degree squared each layer, so left alone
    // the features explode geometrically and saturate the softmax within a
    // few layers. Rescale each channel by its maximum: entries land in [0, 1]
    // at any graph size or density, which keeps sparse inputs (whose raw sums
    // sit far below the training range) inside the range the MLPs were fit
    // on. Per channel rather than globally, because the feedback column is
    // orders of magnitude smaller than the propagated ones and a shared
    // divisor would bury it. Entries are nonnegative and a maximum is
    // order-independent, so the division is bit-identical under any
    // relabeling of either graph. The floor only guards all-zero channels.
    {
      const int hd = rec.h.cols();
      const int hr = rec.h.rows();
      std::vector<double> peak(hd, 0.0);
      rec.h_argmax.assign(hd, 0);
      for (int row = 0; row < hr; ++row) {
        const double* p = rec.h.row_ptr(row);
        for (int c = 0; c < hd; ++c)
          if (p[c] > peak[c]) {
            peak[c] = p[c];
            rec.h_argmax[c] = row;
          }
      }
      rec.h_scale.resize(hd);
      for (int c = 0; c < hd; ++c) rec.h_scale[c] = 1e-12 + peak[c];
      for (int row = 0; row < hr; ++row) {
        double* p = rec.h.row_ptr(row);
        for (int c = 0; c < hd; ++c) p[c] /= rec.h_scale[c];
      }
    }
    rec.m = mlp_apply(model.phi[l], rec.h, training ? &rec.phi_cache : nullptr);
    // rho is a regression head: rectified hidden layer, linear output, so the
    // similarity logits can go negative. phi keeps the rectified output; its
    // channels feed the neighborhood sums of the next layer, which rely on
    // nonnegative entries.
    rec.x = mlp_apply(model.rho[l], rec.m, training ? &rec.rho_cache : nullptr,
                      /*relu_last=*/false);
    const Matrix x_mat = unvec(rec.x, n1, n2);
    rec.y = training ? symmetric_normalize_cached(x_mat, rec.softmax_cache)
                     : symmetric_normalize(x_mat);
    rec.r = hungarian_max(rec.y);

    rec.z = Matrix(n1 * n2, 1);
    switch (cfg.variant) {
      case Variant::kFull:
      case Variant::kX:
        for (int i = 0; i < n1; ++i) {
          const int j = rec.r.row_to_col[i];
          if (j >= 0) rec.z(i * n2 + j, 0) = rec.y(i, j);
        }
        break;
      case Variant::kPer:
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n2; ++j) rec.z(i * n2 + j, 0) = rec.y(i, j);
        break;
      case Variant::kHun:
        for (int i = 0; i < n1; ++i) {
          const int j = rec.r.row_to_col[i];
          if (j >= 0) rec.z(i * n2 + j, 0) = 1.0;
        }
        break;
      case Variant::kVan:
        break;  // all zeros
    }

    if (l + 1 < cfg.num_layers) {
      s = Matrix(n1 * n2, cfg.channels);
      for (int row = 0; row < n1 * n2; ++row) {
        double* dst = s.row_ptr(row);
        const double* src = rec.m.row_ptr(row);
        for (int c = 0; c < cfg.channels - 1; ++c) dst[c] = src[c];
        dst[cfg.channels - 1] = rec.z(row, 0);
      }
    }
    if (!training) {
      rec.h = Matrix();
      rec.m = Matrix();
    }
    trace.layers.push_back(std::move(rec));
  }
  return trace;
}

/// Sum of the matching cross entropy over every layer's similarity matrix.
inline double seedgnn_loss(const ForwardTrace& trace, const std::vector<int>& truth) {
  double total = 0.0;
  for (const LayerRecord& rec : trace.layers) total += matching_cross_entropy(rec.y, truth);
  return total;
}

/// Loss plus analytic parameter gradients, accumulated into grads (which must
/// be zeros_like(model) shaped; existing contents are added to). The
/// assignment inside each layer is treated as a constant of the backward
/// pass: gradients flow through the kept similarity values, not through the
/// discrete selection itself. Requires a training-detail trace.
inline double seedgnn_loss_and_gradients(const SeedGnnModel& model, const Graph& g1,
                                         const Graph& g2, const ForwardTrace& trace,
                                         const std::vector<int>& truth, SeedGnnModel& grads) {
  const auto& cfg = model.config;
  const int L = cfg.num_layers;
  const int n1 = trace.n1, n2 = trace.n2;
  if (static_cast<int>(trace.layers.size()) != L)
    throw std::invalid_argument("seedgnn_loss_and_gradients: trace layer count mismatch");
  double total = 0.0;
  Matrix ds_next;  // gradient at s_{l+1}, set once layer l+1 has run

  for (int l = L - 1; l >= 0; --l) {
    const LayerRecord& rec = trace.layers[l];
    if (rec.phi_cache.post.empty())
      throw std::invalid_argument("seedgnn_loss_and_gradients: needs a training trace");

    Matrix dy;
    total += matching_cross_entropy(rec.y, truth, &dy);

    if (l + 1 < L) {
      // Feedback-column path: s_{l+1}'s last channel is z_l.
      const int zc = cfg.channels - 1;
      switch (cfg.variant) {
        case Variant::kFull:
        case Variant::kX:
          for (int i = 0; i < n1; ++i) {
            const int j = rec.r.row_to_col[i];
            if (j >= 0) dy(i, j) += ds_next(i * n2 + j, zc);
          }
          break;
        case Variant::kPer:
          for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j) dy(i, j) += ds_next(i * n2 + j, zc);
          break;
        case Variant::kHun:
        case Variant::kVan:
          break;  // feedback column is constant in the similarity values
      }
    }

    const Matrix dx_mat = symmetric_normalize_backward(rec.softmax_cache, dy);
    const Matrix dx = vec(dx_mat);

    Matrix dm =
        mlp_backward(model.rho[l], rec.m, rec.rho_cache, dx, grads.rho[l], /*relu_last=*/false);
    if (l + 1 < L) {
      // Direct path: s_{l+1}'s first channels-1 columns are m_l.
      for (int row = 0; row < n1 * n2; ++row) {
        double* dst = dm.row_ptr(row);
        const double* src = ds_next.row_ptr(row);
        for (int c = 0; c < cfg.channels - 1; ++c) dst[c] += src[c];
      }
    }

    Matrix dh = mlp_backward(model.phi[l], rec.h, rec.phi_cache, dm, grads.phi[l]);
    // Adjoint of the per-channel rescaling h -> h / max(h): the divisor moves
    // with the peak entry alone, so every entry picks up 1/scale and the peak
    // row additionally absorbs the coupling with the whole rescaled channel.
    {
      const int hd = dh.cols();
      const int hr = dh.rows();
      std::vector<double> coupled(hd, 0.0);
      for (int row = 0; row < hr; ++row) {
        const double* dp = dh.row_ptr(row);
        const double* hp = rec.h.row_ptr(row);
        for (int c = 0; c < hd; ++c) coupled[c] += dp[c] * hp[c];
      }
      for (int row = 0; row < hr; ++row) {
        double* dp = dh.row_ptr(row);
        for (int c = 0; c < hd; ++c) dp[c] /= rec.h_scale[c];
      }
      for (int c = 0; c < hd; ++c) dh(rec.h_argmax[c], c) -= coupled[c] / rec.h_scale[c];
    }
    if (l > 0)
      ds_next = (cfg.variant == Variant::kX) ? dh : propagate_values_adjoint(g1, dh, g2);
  }
  return total;
}

inline Matching seedgnn_predict(const SeedGnnModel& model, const Graph& g1, const Graph& g2,
                                const std::vector<std::pair<int, int>>& seeds) {
  const ForwardTrace trace = seedgnn_forward(model, g1, g2, seeds, TraceDetail::kEvaluation);
  return trace.layers.back().r;
}

// ---------------------------------------------------------------------------
// Training.
// ---------------------------------------------------------------------------

struct TrainConfig {
  int epochs = 10;
  int batch_size = 1;           // examples whose gradients are averaged per step
  AdamConfig adam{};
  std::uint64_t seed = 1;       // drives the per-epoch instance shuffle
  int checkpoint_every = 0;     // steps between periodic snapshots, 0 = off
  std::string checkpoint_path;  // written at snapshots and after training
  bool verbose = false;         // epoch summaries to stderr
};

struct TrainStep {
  int epoch = 0;
  int step = 0;      // global optimizer step counter, 1-based
  int instance = 0;  // last instance folded into the step's batch
  double loss = 0.0;  // mean loss over the step's batch
};

struct TrainResult {
  std::vector<TrainStep> history;
  std::vector<double> epoch_mean_loss;
};

inline void save_checkpoint(const SeedGnnModel& model, const std::string& path);

/// One Adam step per batch of training examples (gradients averaged across
/// the batch), examples reshuffled every epoch. A trailing short batch is
/// averaged over its actual size. Throws (with epoch, instance and layer
/// context) the moment a loss or any layer output goes non-finite, rather
/// than training onward on garbage.
inline TrainResult seedgnn_train(SeedGnnModel& model, const std::vector<GraphPairInstance>& data,
                                 const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("seedgnn_train: no training instances");
  if (cfg.batch_size < 1) throw std::invalid_argument("seedgnn_train: batch_size must be >= 1");
  validate_dimensions(model);
  for (const GraphPairInstance& inst : data)
    if (static_cast<int>(inst.truth.size()) != inst.n1())
      throw std::invalid_argument("seedgnn_train: instance truth size mismatch");

  SeedGnnModel grads = zeros_like(model);
  std::vector<Matrix*> params;
  std::vector<Matrix*> grad_tensors;
  std::vector<const Matrix*> grad_ptrs;
  for_each_tensor(model, [&](Matrix& t) { params.push_back(&t); });
  for_each_tensor(grads, [&](Matrix& t) {
    grad_tensors.push_back(&t);
    grad_ptrs.push_back(&t);
  });

  Adam adam(cfg.adam);
  Rng shuffle_root(cfg.seed);
  TrainResult result;
  int step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng epoch_rng = shuffle_root.split(static_cast<std::uint64_t>(epoch));
    std::vector<int> order = epoch_rng.permutation(static_cast<int>(data.size()));
    double epoch_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(begin + cfg.batch_size, order.size());
      const double batch_count = static_cast<double>(end - begin);
      zero_tensors(grads);
      double batch_sum = 0.0;
      int last_idx = -1;
      for (std::size_t at = begin; at < end; ++at) {
        const int idx = order[at];
        const GraphPairInstance& inst = data[idx];
        const ForwardTrace trace =
            seedgnn_forward(model, inst.g1, inst.g2, inst.seeds, TraceDetail::kTraining);
        const double loss =
            seedgnn_loss_and_gradients(model, inst.g1, inst.g2, trace, inst.truth, grads);
        if (!std::isfinite(loss)) {
          int bad_layer = -1;
          for (int l = 0; l < static_cast<int>(trace.layers.size()); ++l)
            if (!trace.layers[l].y.all_finite()) {
              bad_layer = l;
              break;
            }
          throw std::runtime_error("seedgnn_train: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", instance " + std::to_string(idx) +
                                   ", first bad layer " + std::to_string(bad_layer));
        }
        batch_sum += loss;
        last_idx = idx;
      }
      if (batch_count > 1.0)
        for (Matrix* g : grad_tensors)
          for (std::size_t t = 0; t < g->size(); ++t) g->data()[t] /= batch_count;
      adam.step(params, grad_ptrs);
      ++step;
      result.history.push_back({epoch, step, last_idx, batch_sum / batch_count});
      epoch_sum += batch_sum;
      if (cfg.checkpoint_every > 0 && !cfg.checkpoint_path.empty() &&
          step % cfg.checkpoint_every == 0)
        save_checkpoint(model, cfg.checkpoint_path);
    }
    const double mean = epoch_sum / static_cast<double>(data.size());
    result.epoch_mean_loss.push_back(mean);
    if (cfg.verbose)
      std::fprintf(stderr, "epoch %d/%d mean loss %.6f\n", epoch + 1, cfg.epochs, mean);
  }
  if (!cfg.checkpoint_path.empty()) save_checkpoint(model, cfg.checkpoint_path);
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoints. Versioned plain text; %.17g per value makes the round trip
// bit-exact. Tensors appear in the canonical for_each_tensor order.
// ---------------------------------------------------------------------------

constexpr int kCheckpointVersion = 1;

inline void save_checkpoint(const SeedGnnModel& model, const std::string& path) {
  validate_dimensions(model);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "seedgnn-checkpoint " << kCheckpointVersion << "\n";
  out << "variant " << to_string(model.config.variant) << "\n";
  out << "layers " << model.config.num_layers << "\n";
  out << "channels " << model.config.channels << "\n";
  out << "hidden " << model.config.hidden << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", kMatchEpsilon);
  out << "match_epsilon " << buf << "\n";
  auto dump = [&](const char* part, int l, int k, const char* name, const Matrix& t) {
    out << "tensor " << part << " " << l << " " << k << " " << name << " " << t.rows() << " "
        << t.cols() << "\n";
    for (int i = 0; i < t.rows(); ++i) {
      for (int j = 0; j < t.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", t(i, j));
        out << buf << (j + 1 < t.cols() ? " " : "");
      }
      out << "\n";
    }
  };
  for (int l = 0; l < model.config.num_layers; ++l)
    for (int k = 0; k < static_cast<int>(model.phi[l].layers.size()); ++k) {
      dump("phi", l, k, "w", model.phi[l].layers[k].w);
      dump("phi", l, k, "b", model.phi[l].layers[k].b);
    }
  for (int l = 0; l < model.config.num_layers; ++l)
    for (int k = 0; k < static_cast<int>(model.rho[l].layers.size()); ++k) {
      dump("rho", l, k, "w", model.rho[l].layers[k].w);
      dump("rho", l, k, "b", model.rho[l].layers[k].b);
    }
  out << "end\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline SeedGnnModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string magic;
  int version = -1;
  if (!(in >> magic >> version) || magic != "seedgnn-checkpoint")
    throw std::runtime_error(path + ": not a checkpoint file");
  if (version != kCheckpointVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version " +
                             std::to_string(version));
  auto expect_key = [&](const char* key) {
    std::string k;
    if (!(in >> k) || k != key)
      throw std::runtime_error(path + ": expected field '" + key + "', found '" + k + "'");
  };
  SeedGnnConfig cfg;
  std::string variant_name;
  expect_key("variant");
  in >> variant_name;
  cfg.variant = parse_variant(variant_name);
  expect_key("layers");
  in >> cfg.num_layers;
  expect_key("channels");
  in >> cfg.channels;
  expect_key("hidden");
  in >> cfg.hidden;
  expect_key("match_epsilon");
  double eps = 0.0;
  in >> eps;
  if (!in) throw std::runtime_error(path + ": malformed header");
  if (eps != kMatchEpsilon)
    throw std::runtime_error(path + ": checkpoint built with a different match epsilon");

  SeedGnnModel model;
  model.config = cfg;
  for (int l = 0; l < cfg.num_layers; ++l) {
    const int in_dim = (l == 0) ? 1 : cfg.channels;
    model.phi.emplace_back(std::vector<int>{in_dim, cfg.hidden, cfg.channels - 1});
    model.rho.emplace_back(std::vector<int>{cfg.channels - 1, cfg.hidden, 1});
  }

  auto read_tensor = [&](const char* part, int l, int k, const char* name, Matrix& t) {
    std::string kw, p, nm;
    int ll, kk, rows, cols;
    if (!(in >> kw >> p >> ll >> kk >> nm >> rows >> cols) || kw != "tensor" || p != part ||
        ll != l || kk != k || nm != name)
      throw std::runtime_error(path + ": tensor header out of order (wanted " +
                               std::string(part) + " " + std::to_string(l) + " " +
                               std::to_string(k) + " " + name + ")");
    if (rows != t.rows() || cols != t.cols())
      throw std::runtime_error(path + ": tensor " + part + "[" + std::to_string(l) + "][" +
                               std::to_string(k) + "]." + name + " has shape " +
                               std::to_string(rows) + "x" + std::to_string(cols) +
                               ", expected " + std::to_string(t.rows()) + "x" +
                               std::to_string(t.cols()));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (!(in >> t(i, j)))
          throw std::runtime_error(path + ": truncated tensor data");
  };
  for (int l = 0; l < cfg.num_layers; ++l)
    for (int k = 0; k < static_cast<int>(model.phi[l].layers.size()); ++k) {
      read_tensor("phi", l, k, "w", model.phi[l].layers[k].w);
      read_tensor("phi", l, k, "b", model.phi[l].layers[k].b);
    }
  for (int l = 0; l < cfg.num_layers; ++l)
    for (int k = 0; k < static_cast<int>(model.rho[l].layers.size()); ++k) {
      read_tensor("rho", l, k, "w", model.rho[l].layers[k].w);
      read_tensor("rho", l, k, "b", model.rho[l].layers[k].b);
    }
  std::string tail;
  if (!(in >> tail) || tail != "end") throw std::runtime_error(path + ": missing end marker");
  validate_dimensions(model);
  return model;
}

}  // namespace seedgnn
