#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "seedgnn/matrix.hpp"
#include "seedgnn/rng.hpp"

namespace seedgnn {

/// Probability floor inside the matching cross entropy; keeps log arguments
/// away from zero when a similarity entry saturates.
constexpr double kMatchEpsilon = 1e-9;

// ---------------------------------------------------------------------------
// Multilayer perceptron applied row-wise. ReLU follows every affine layer,
// including the last one; downstream code relies on nonnegative outputs.
// ---------------------------------------------------------------------------

struct DenseLayer {
  Matrix w;  // in_dim x out_dim
  Matrix b;  // 1 x out_dim
};

struct Mlp {
  std::vector<DenseLayer> layers;

  Mlp() = default;
  explicit Mlp(const std::vector<int>& dims) {
    if (dims.size() < 2) throw std::invalid_argument("Mlp: need at least one layer");
    for (std::size_t k = 0; k + 1 < dims.size(); ++k)
      layers.push_back({Matrix(dims[k], dims[k + 1]), Matrix(1, dims[k + 1])});
  }

  int in_dim() const { return layers.front().w.rows(); }
  int out_dim() const { return layers.back().w.cols(); }
};

/// Post-activation output of every layer, kept for the backward pass.
struct MlpCache {
  std::vector<Matrix> post;
};

/// Gaussian init for weights and biases, sigma = sqrt(2/in_dim) per layer.
/// The scaling keeps activation variance roughly constant through ReLU
/// stacks; nonzero biases keep units off the rectifier kink at the start,
/// which matters here because seed-indicator inputs are mostly all-zero rows.
inline void init_gaussian(Mlp& mlp, Rng& rng) {
  for (DenseLayer& layer : mlp.layers) {
    const double sigma = std::sqrt(2.0 / layer.w.rows());
    for (int i = 0; i < layer.w.rows(); ++i)
      for (int j = 0; j < layer.w.cols(); ++j) layer.w(i, j) = sigma * rng.normal();
    for (int j = 0; j < layer.b.cols(); ++j) layer.b(0, j) = sigma * rng.normal();
  }
}

/// Forward pass: sigma(xW + b) per layer. With relu_last false the final
/// layer stays linear, the usual choice for a regression head.
inline Matrix mlp_apply(const Mlp& mlp, const Matrix& x, MlpCache* cache = nullptr,
                        bool relu_last = true) {
  if (x.cols() != mlp.in_dim()) throw std::invalid_argument("mlp_apply: input width mismatch");
  if (cache) cache->post.clear();
  const std::size_t depth = mlp.layers.size();
  Matrix cur = x;
  for (std::size_t k = 0; k < depth; ++k) {
    const DenseLayer& layer = mlp.layers[k];
    const bool rectify = relu_last || k + 1 < depth;
    Matrix next = matmul(cur, layer.w);
    for (int i = 0; i < next.rows(); ++i) {
      double* row = next.row_ptr(i);
      const double* bias = layer.b.row_ptr(0);
      for (int j = 0; j < next.cols(); ++j) {
        const double v = row[j] + bias[j];
        row[j] = (rectify && v < 0.0) ? 0.0 : v;
      }
    }
    if (cache) cache->post.push_back(next);
    cur = std::move(next);
  }
  return cur;
}

inline Mlp zeros_like(const Mlp& mlp) {
  Mlp z;
  for (const DenseLayer& layer : mlp.layers)
    z.layers.push_back({Matrix(layer.w.rows(), layer.w.cols()), Matrix(1, layer.b.cols())});
  return z;
}

/// Backward pass. d_out is the loss gradient at the MLP output; parameter
/// gradients accumulate into grads (shapes from zeros_like); the return value
/// is the gradient at the input. relu_last must repeat the forward call's
/// value. The ReLU derivative at exactly zero is taken as zero, matching the
/// subgradient convention of the checker.
inline Matrix mlp_backward(const Mlp& mlp, const Matrix& input, const MlpCache& cache,
                           const Matrix& d_out, Mlp& grads, bool relu_last = true) {
  const int depth = static_cast<int>(mlp.layers.size());
  Matrix da = d_out;
  for (int k = depth - 1; k >= 0; --k) {
    if (relu_last || k + 1 < depth) {
      const Matrix& act = cache.post[k];
      for (std::size_t t = 0; t < da.size(); ++t)
        if (act.data()[t] <= 0.0) da.data()[t] = 0.0;
    }
    const Matrix& below = (k == 0) ? input : cache.post[k - 1];
    add_scaled(grads.layers[k].w, matmul_at_b(below, da));
    for (int i = 0; i < da.rows(); ++i) {
      const double* row = da.row_ptr(i);
      double* gb = grads.layers[k].b.row_ptr(0);
      for (int j = 0; j < da.cols(); ++j) gb[j] += row[j];
    }
    da = matmul_a_bt(da, mlp.layers[k].w);
  }
  return da;
}

// ---------------------------------------------------------------------------
// Row softmax and the symmetric similarity normalization.
// ---------------------------------------------------------------------------

/// Numerically stable row softmax. The denominator uses order-independent
/// accumulation, so permuting entries within a row permutes the output bits.
inline Matrix softmax_rows(const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    const double* in = x.row_ptr(i);
    double* out = y.row_ptr(i);
    double mx = in[0];
    for (int j = 1; j < x.cols(); ++j) mx = std::max(mx, in[j]);
    StableAcc denom;
    for (int j = 0; j < x.cols(); ++j) {
      out[j] = std::exp(in[j] - mx);
      denom.add(out[j]);
    }
    const double z = denom.value();
    for (int j = 0; j < x.cols(); ++j) out[j] /= z;
  }
  return y;
}

/// Given s = softmax_rows(x) and the gradient at s, return the gradient at x.
inline Matrix softmax_rows_backward(const Matrix& s, const Matrix& ds) {
  Matrix dx(s.rows(), s.cols());
  for (int i = 0; i < s.rows(); ++i) {
    const double* sr = s.row_ptr(i);
    const double* gr = ds.row_ptr(i);
    double* dr = dx.row_ptr(i);
    double inner = 0.0;
    for (int j = 0; j < s.cols(); ++j) inner += gr[j] * sr[j];
    for (int j = 0; j < s.cols(); ++j) dr[j] = sr[j] * (gr[j] - inner);
  }
  return dx;
}

/// Caches for the symmetric normalization backward pass.
struct RowSoftmaxPair {
  Matrix s;  // softmax over rows of x
  Matrix t;  // softmax over rows of x^T
};

/// Y = (softmax_rows(X) + softmax_rows(X^T)^T) / 2. Averaging the row and
/// column normalizations keeps the result sensitive to competition in both
/// directions; every entry lands in (0, 1).
inline Matrix symmetric_normalize_cached(const Matrix& x, RowSoftmaxPair& cache) {
  cache.s = softmax_rows(x);
  cache.t = softmax_rows(transpose(x));
  Matrix y(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) y(i, j) = 0.5 * (cache.s(i, j) + cache.t(j, i));
  return y;
}

inline Matrix symmetric_normalize(const Matrix& x) {
  RowSoftmaxPair cache;
  return symmetric_normalize_cached(x, cache);
}

inline Matrix symmetric_normalize_backward(const RowSoftmaxPair& cache, const Matrix& dy) {
  Matrix half(dy.rows(), dy.cols());
  for (std::size_t t = 0; t < dy.size(); ++t) half.data()[t] = 0.5 * dy.data()[t];
  const Matrix dx_row = softmax_rows_backward(cache.s, half);
  const Matrix dx_col = softmax_rows_backward(cache.t, transpose(half));
  Matrix dx = dx_row;
  for (int i = 0; i < dx.rows(); ++i)
    for (int j = 0; j < dx.cols(); ++j) dx(i, j) += dx_col(j, i);
  return dx;
}

// ---------------------------------------------------------------------------
// Matching cross entropy.
// ---------------------------------------------------------------------------

/// Binary cross entropy over all pairs of one similarity matrix: the true
/// column of each row is pushed toward 1, every other entry toward 0. Rows
/// with unknown truth (truth[i] < 0) contribute nothing. If dy is non-null
/// the gradient is written into it (same shape as y, overwritten).
inline double matching_cross_entropy(const Matrix& y, const std::vector<int>& truth,
                                     Matrix* dy = nullptr) {
  if (static_cast<int>(truth.size()) != y.rows())
    throw std::invalid_argument("matching_cross_entropy: truth size mismatch");
  if (dy) *dy = Matrix(y.rows(), y.cols());
  double loss = 0.0;
  for (int i = 0; i < y.rows(); ++i) {
    const int tgt = truth[i];
    if (tgt < 0) continue;
    if (tgt >= y.cols()) throw std::invalid_argument("matching_cross_entropy: truth out of range");
    const double* row = y.row_ptr(i);
    for (int j = 0; j < y.cols(); ++j) {
      if (j == tgt) {
        loss -= std::log(row[j] + kMatchEpsilon);
        if (dy) (*dy)(i, j) = -1.0 / (row[j] + kMatchEpsilon);
      } else {
        loss -= std::log(1.0 - row[j] + kMatchEpsilon);
        if (dy) (*dy)(i, j) = 1.0 / (1.0 - row[j] + kMatchEpsilon);
      }
    }
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Adam.
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Standard bias-corrected Adam over an arbitrary list of parameter tensors.
/// Moment buffers are lazily sized on the first step; callers must present
/// the tensors in the same order every step.
class Adam {
 public:
  explicit Adam(const AdamConfig& cfg = {}) : cfg_(cfg) {}

  const AdamConfig& config() const { return cfg_; }
  long long steps_taken() const { return t_; }

  void step(const std::vector<Matrix*>& params, const std::vector<const Matrix*>& grads) {
    if (params.size() != grads.size()) throw std::invalid_argument("Adam: param/grad mismatch");
    if (m_.empty()) {
      for (const Matrix* p : params) {
        m_.emplace_back(p->rows(), p->cols());
        v_.emplace_back(p->rows(), p->cols());
      }
    }
    if (m_.size() != params.size()) throw std::invalid_argument("Adam: tensor count changed");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      Matrix& p = *params[k];
      const Matrix& g = *grads[k];
      if (!p.same_shape(g) || !p.same_shape(m_[k]))
        throw std::invalid_argument("Adam: tensor shape changed");
      double* pm = m_[k].data();
      double* pv = v_[k].data();
      double* pp = p.data();
      const double* pg = g.data();
      for (std::size_t t = 0; t < p.size(); ++t) {
        pm[t] = cfg_.beta1 * pm[t] + (1.0 - cfg_.beta1) * pg[t];
        pv[t] = cfg_.beta2 * pv[t] + (1.0 - cfg_.beta2) * pg[t] * pg[t];
        const double mhat = pm[t] / bc1;
        const double vhat = pv[t] / bc2;
        pp[t] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
      }
    }
  }

 private:
  AdamConfig cfg_;
  long long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

// ---------------------------------------------------------------------------
// Finite differences.
// ---------------------------------------------------------------------------

struct FdProbeSet {
  Matrix* param;         // tensor to nudge
  const Matrix* analytic;  // matching analytic gradient
};

/// Central-difference audit of analytic gradients. For a sample of
/// coordinates in every listed tensor, nudge by +/- h, re-evaluate the loss
/// and compare. The relative error divisor saturates at 1 so that near-zero
/// coordinates are judged on absolute error.
inline double finite_difference_check(const std::vector<FdProbeSet>& tensors,
                                      const std::function<double()>& loss_fn, Rng& rng,
                                      int probes_per_tensor = 6, double h = 1e-5) {
  double worst = 0.0;
  for (const FdProbeSet& set : tensors) {
    const std::size_t count = set.param->size();
    if (count == 0) continue;
    for (int probe = 0; probe < probes_per_tensor; ++probe) {
      const std::size_t idx = static_cast<std::size_t>(rng.below(count));
      double* slot = set.param->data() + idx;
      const double saved = *slot;
      *slot = saved + h;
      const double up = loss_fn();
      *slot = saved - h;
      const double down = loss_fn();
      *slot = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = set.analytic->data()[idx];
      const double rel = std::fabs(analytic - numeric) /
                         std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace seedgnn
