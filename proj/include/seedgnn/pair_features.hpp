#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "seedgnn/graph.hpp"
#include "seedgnn/matrix.hpp"

namespace seedgnn {

/// Element-count ceiling for pair tensors, overridable through the
/// SEEDGNN_MEMORY_CAP environment variable. A pair tensor holds n1*n2*d
/// doubles; refusing oversized allocations up front beats an OOM kill deep
/// inside a sweep.
inline long long pair_tensor_cap() {
  if (const char* env = std::getenv("SEEDGNN_MEMORY_CAP")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 1LL << 28;
}

/// Feature tensor over the product node space: one row per ordered pair
/// (i, j) with i in g1 and j in g2, d channels per row. Row order is
/// i * n2 + j, matching the flattening convention used everywhere: vec of an
/// n1 x n2 matrix stacks its rows.
struct PairFeatures {
  int n1 = 0;
  int n2 = 0;
  int d = 0;
  Matrix data;

  PairFeatures() = default;
  PairFeatures(int n1_, int n2_, int d_) : n1(n1_), n2(n2_), d(d_) {
    if (n1 < 0 || n2 < 0 || d < 0)
      throw std::invalid_argument("PairFeatures: negative dimension");
    const long long total = 1LL * n1 * n2 * d;
    const long long cap = pair_tensor_cap();
    if (total > cap)
      throw std::runtime_error("pair tensor of " + std::to_string(total) +
                               " elements exceeds memory cap " + std::to_string(cap) +
                               " (set SEEDGNN_MEMORY_CAP to raise)");
    data = Matrix(n1 * n2, d);
  }

  double* pair_row(int i, int j) { return data.row_ptr(i * n2 + j); }
  const double* pair_row(int i, int j) const { return data.row_ptr(i * n2 + j); }
};

/// Seed indicator: a single channel with 1 at every revealed pair, 0 elsewhere.
inline PairFeatures encode_seeds(int n1, int n2, const std::vector<std::pair<int, int>>& seeds) {
  PairFeatures f(n1, n2, 1);
  for (const auto& [i, j] : seeds) {
    if (i < 0 || i >= n1 || j < 0 || j >= n2)
      throw std::invalid_argument("encode_seeds: seed pair out of range");
    f.pair_row(i, j)[0] = 1.0;
  }
  return f;
}

/// Stack the rows of an n1 x n2 matrix into an (n1*n2) x 1 column.
inline Matrix vec(const Matrix& m) {
  Matrix out(m.rows() * m.cols(), 1);
  const double* src = m.data();
  double* dst = out.data();
  for (std::size_t t = 0; t < m.size(); ++t) dst[t] = src[t];
  return out;
}

/// Inverse of vec.
inline Matrix unvec(const Matrix& column, int n1, int n2) {
  if (column.cols() != 1 || column.rows() != n1 * n2)
    throw std::invalid_argument("unvec: column has wrong shape");
  Matrix out(n1, n2);
  const double* src = column.data();
  double* dst = out.data();
  for (std::size_t t = 0; t < out.size(); ++t) dst[t] = src[t];
  return out;
}

namespace detail {

/// Shared body of the pair-space propagation, operating on the raw
/// (n1*n2) x d value matrix. Channel c of the output is A1 * unvec(f_c) * A2
/// without ever forming the Kronecker product: first a neighbor sum over g1
/// (whole contiguous n2*d slabs), then a neighbor sum over g2 inside each
/// slab. Stable = true routes the second sum through the order-independent
/// accumulator; the g1 sum keeps its natural fixed order, so plain addition
/// is already deterministic and relabel-proof there.
template <bool Stable>
Matrix propagate_body(const Graph& g1, const Matrix& f, const Graph& g2) {
  const int n1 = g1.num_nodes(), n2 = g2.num_nodes(), d = f.cols();
  if (f.rows() != n1 * n2)
    throw std::invalid_argument("propagate: feature tensor does not match graphs");
  const std::size_t slab = static_cast<std::size_t>(n2) * d;

  Matrix mid(n1 * n2, d);
  for (int a = 0; a < n1; ++a) {
    double* out = mid.data() + a * slab;
    for (const int* w = g1.neighbors_begin(a); w != g1.neighbors_end(a); ++w) {
      const double* in = f.data() + *w * slab;
      for (std::size_t t = 0; t < slab; ++t) out[t] += in[t];
    }
  }

  Matrix result(n1 * n2, d);
  std::vector<double> hi(d), lo(d);
  for (int a = 0; a < n1; ++a) {
    const double* block = mid.data() + a * slab;
    for (int b = 0; b < n2; ++b) {
      double* out = result.row_ptr(a * n2 + b);
      if constexpr (Stable) {
        for (int c = 0; c < d; ++c) hi[c] = lo[c] = 0.0;
        for (const int* w = g2.neighbors_begin(b); w != g2.neighbors_end(b); ++w) {
          const double* in = block + static_cast<std::size_t>(*w) * d;
          for (int c = 0; c < d; ++c) {
            double s, e;
            two_sum(hi[c], in[c], s, e);
            hi[c] = s;
            lo[c] += e;
          }
        }
        for (int c = 0; c < d; ++c) out[c] = hi[c] + lo[c];
      } else {
        for (const int* w = g2.neighbors_begin(b); w != g2.neighbors_end(b); ++w) {
          const double* in = block + static_cast<std::size_t>(*w) * d;
          for (int c = 0; c < d; ++c) out[c] += in[c];
        }
      }
    }
  }
  return result;
}

}  // namespace detail

/// Pair-space neighborhood sum: out(i,j,c) = sum over edges (i,w) in g1 and
/// (j,w') in g2 of f(w,w',c). Equals the Kronecker operator (A1 (x) A2)
/// applied to each vec'd channel. Output bits do not depend on node labels
/// beyond the required permutation, see propagate_body.
inline PairFeatures propagate(const Graph& g1, const PairFeatures& f, const Graph& g2) {
  if (f.n1 != g1.num_nodes() || f.n2 != g2.num_nodes())
    throw std::invalid_argument("propagate: feature tensor does not match graphs");
  PairFeatures out(f.n1, f.n2, f.d);
  out.data = detail::propagate_body<true>(g1, f.data, g2);
  return out;
}

/// Adjoint of propagate. Adjacency matrices are symmetric, so the map is
/// self-adjoint and the same kernel applies; this variant uses plain
/// accumulation since gradients carry no bit-exactness contract.
inline PairFeatures propagate_adjoint(const Graph& g1, const PairFeatures& f, const Graph& g2) {
  if (f.n1 != g1.num_nodes() || f.n2 != g2.num_nodes())
    throw std::invalid_argument("propagate_adjoint: feature tensor does not match graphs");
  PairFeatures out(f.n1, f.n2, f.d);
  out.data = detail::propagate_body<false>(g1, f.data, g2);
  return out;
}

/// Matrix-level entry points for callers that manage pair tensors directly.
inline Matrix propagate_values(const Graph& g1, const Matrix& f, const Graph& g2) {
  return detail::propagate_body<true>(g1, f, g2);
}

inline Matrix propagate_values_adjoint(const Graph& g1, const Matrix& f, const Graph& g2) {
  return detail::propagate_body<false>(g1, f, g2);
}

/// Independent witness-count reference: for each pair (i, j), the number of
/// seed pairs (w, w') with w at hop distance exactly hop_d from i and w' at
/// hop distance exactly hop_d from j. Computed from per-seed BFS, sharing no
/// code with propagate.
inline Matrix count_witnesses_oracle(const Graph& g1, const Graph& g2,
                                     const std::vector<std::pair<int, int>>& seeds, int hop_d) {
  if (hop_d < 1) throw std::invalid_argument("count_witnesses_oracle: hop_d must be >= 1");
  Matrix counts(g1.num_nodes(), g2.num_nodes());
  for (const auto& [w, wp] : seeds) {
    const std::vector<int> d1 = g1.bfs_distances(w);
    const std::vector<int> d2 = g2.bfs_distances(wp);
    for (int i = 0; i < g1.num_nodes(); ++i) {
      if (d1[i] != hop_d) continue;
      for (int j = 0; j < g2.num_nodes(); ++j)
        if (d2[j] == hop_d) counts(i, j) += 1.0;
    }
  }
  return counts;
}

}  // namespace seedgnn
