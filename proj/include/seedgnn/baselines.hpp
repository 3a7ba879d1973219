#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "seedgnn/assignment.hpp"
#include "seedgnn/graph.hpp"
#include "seedgnn/matrix.hpp"

namespace seedgnn {

// ---------------------------------------------------------------------------
// Distance-D witness matching.
// ---------------------------------------------------------------------------

/// Graph whose edges join nodes at hop distance exactly d in g (or at most d
/// when within is set). d = 1 with within = false reproduces g itself.
inline Graph d_hop_adjacency(const Graph& g, int d, bool within = false) {
  if (d < 1) throw std::invalid_argument("d_hop_adjacency: d must be >= 1");
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < g.num_nodes(); ++u) {
    const std::vector<int> dist = g.bfs_distances(u);
    for (int v = u + 1; v < g.num_nodes(); ++v) {
      const bool hit = within ? (dist[v] >= 1 && dist[v] <= d) : (dist[v] == d);
      if (hit) edges.emplace_back(u, v);
    }
  }
  return Graph(g.num_nodes(), edges);
}

struct DHopConfig {
  int hops = 1;         // D: witness distance
  int iterations = 6;   // T: rounds of match-then-reseed
  bool within_distance = false;
};

/// Witness-count matcher. Every round scores pair (i, j) by the number of
/// currently matched pairs (w, w') with w at the witness distance from i and
/// w' at the witness distance from j, solves the assignment on those scores,
/// and feeds the result back as the next round's matched set (the revealed
/// seeds stay in the set throughout). Returns the final assignment.
inline Matching d_hop_match(const Graph& g1, const Graph& g2,
                            const std::vector<std::pair<int, int>>& seeds, const DHopConfig& cfg) {
  const int n1 = g1.num_nodes(), n2 = g2.num_nodes();
  if (n1 > n2) throw std::invalid_argument("d_hop_match: first graph must not exceed the second");
  if (cfg.iterations < 1) throw std::invalid_argument("d_hop_match: iterations must be >= 1");
  const Graph h1 = d_hop_adjacency(g1, cfg.hops, cfg.within_distance);
  const Graph h2 = d_hop_adjacency(g2, cfg.hops, cfg.within_distance);

  std::vector<std::pair<int, int>> marked = seeds;
  Matching result;
  for (int t = 0; t < cfg.iterations; ++t) {
    Matrix w(n1, n2);
    for (const auto& [a, b] : marked)
      for (const int* u = h1.neighbors_begin(a); u != h1.neighbors_end(a); ++u)
        for (const int* v = h2.neighbors_begin(b); v != h2.neighbors_end(b); ++v)
          w(*u, *v) += 1.0;
    result = hungarian_max(w);
    marked = seeds;
    for (int i = 0; i < n1; ++i)
      if (result.row_to_col[i] >= 0) marked.emplace_back(i, result.row_to_col[i]);
    std::sort(marked.begin(), marked.end());
    marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Percolation matching.
// ---------------------------------------------------------------------------

struct PgmConfig {
  int min_marks = 2;  // r: marks required before a pair may be adopted
};

/// Percolation matcher. Matched pairs spread one mark to every pair of their
/// neighbors; any unmatched, non-conflicting pair that accumulates min_marks
/// marks becomes matched, highest mark count first (ties toward the lowest
/// row, then column index). Rows the percolation never reaches stay
/// unmatched. The seed pairs are matched unconditionally up front.
inline Matching pgm_match(const Graph& g1, const Graph& g2,
                          const std::vector<std::pair<int, int>>& seeds, const PgmConfig& cfg) {
  const int n1 = g1.num_nodes(), n2 = g2.num_nodes();
  if (n1 > n2) throw std::invalid_argument("pgm_match: first graph must not exceed the second");
  if (cfg.min_marks < 1) throw std::invalid_argument("pgm_match: min_marks must be >= 1");

  Matrix marks(n1, n2);
  std::vector<char> used_row(n1, 0), used_col(n2, 0);
  Matching result;
  result.row_to_col.assign(n1, -1);

  // Max-heap ordered by (marks, -row, -col): highest count first, then the
  // smallest indices.
  using Entry = std::tuple<double, int, int>;
  auto cmp = [](const Entry& a, const Entry& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
    return std::get<2>(a) > std::get<2>(b);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

  auto adopt = [&](int i, int j) {
    used_row[i] = 1;
    used_col[j] = 1;
    result.row_to_col[i] = j;
    for (const int* u = g1.neighbors_begin(i); u != g1.neighbors_end(i); ++u)
      for (const int* v = g2.neighbors_begin(j); v != g2.neighbors_end(j); ++v) {
        marks(*u, *v) += 1.0;
        if (!used_row[*u] && !used_col[*v]) heap.emplace(marks(*u, *v), *u, *v);
      }
  };

  for (const auto& [i, j] : seeds) {
    if (i < 0 || i >= n1 || j < 0 || j >= n2)
      throw std::invalid_argument("pgm_match: seed pair out of range");
    if (used_row[i] || used_col[j]) continue;  // duplicate seed
    adopt(i, j);
  }

  while (!heap.empty()) {
    const auto [count, i, j] = heap.top();
    if (count < cfg.min_marks) break;  // nothing eligible remains
    heap.pop();
    if (used_row[i] || used_col[j]) continue;        // conflicts with an adoption
    if (marks(i, j) != count) continue;              // stale entry, a fresher one exists
    adopt(i, j);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Relaxation matching (seeded quadratic assignment by Frank-Wolfe ascent).
// ---------------------------------------------------------------------------

struct SgmConfig {
  int max_iterations = 30;
  double tolerance = 1e-6;  // stop once alpha * ||step||_F falls below this
};

struct SgmResult {
  Matching matching;
  std::vector<double> objective_history;  // seed-interaction + quadratic part, per iteration
  int iterations = 0;
};

namespace detail {

/// Induced subgraph on the given sorted node ids, relabeled 0..k-1.
inline Graph induced_subgraph(const Graph& g, const std::vector<int>& keep) {
  std::vector<int> label(g.num_nodes(), -1);
  for (int idx = 0; idx < static_cast<int>(keep.size()); ++idx) label[keep[idx]] = idx;
  std::vector<std::pair<int, int>> edges;
  for (const auto& [a, b] : g.edge_list())
    if (label[a] >= 0 && label[b] >= 0) edges.emplace_back(label[a], label[b]);
  return Graph(static_cast<int>(keep.size()), edges);
}

/// A * P * B for 0/1 adjacencies A (k1 x k1) and B (k2 x k2), dense P.
inline Matrix adjacency_conjugate(const Graph& a, const Matrix& p, const Graph& b) {
  Matrix mid(p.rows(), p.cols());
  for (int u = 0; u < a.num_nodes(); ++u) {
    double* out = mid.row_ptr(u);
    for (const int* w = a.neighbors_begin(u); w != a.neighbors_end(u); ++w) {
      const double* in = p.row_ptr(*w);
      for (int c = 0; c < p.cols(); ++c) out[c] += in[c];
    }
  }
  Matrix result(p.rows(), p.cols());
  for (int u = 0; u < p.rows(); ++u) {
    const double* in = mid.row_ptr(u);
    double* out = result.row_ptr(u);
    for (int v = 0; v < b.num_nodes(); ++v) {
      double acc = 0.0;
      for (const int* w = b.neighbors_begin(v); w != b.neighbors_end(v); ++w) acc += in[*w];
      out[v] = acc;
    }
  }
  return result;
}

}  // namespace detail

/// Seeded relaxation matcher. With the seed rows and columns pinned to each
/// other, the remaining block maximizes the edge-overlap objective
///   f(P) = 2 <P, W> + <P, A22 P B22>
/// over doubly stochastic P, where W counts seed neighbors common to a pair
/// and A22/B22 are the non-seed adjacencies. Frank-Wolfe ascent from the
/// barycenter: the gradient's best assignment gives the step direction, an
/// exact line search on the quadratic gives the step size, and the final P
/// rounds to a matching through one more assignment solve. The objective
/// never decreases from one iterate to the next.
inline SgmResult sgm_match_detailed(const Graph& g1, const Graph& g2,
                                    const std::vector<std::pair<int, int>>& seeds,
                                    const SgmConfig& cfg) {
  const int n1 = g1.num_nodes(), n2 = g2.num_nodes();
  if (n1 > n2) throw std::invalid_argument("sgm_match: first graph must not exceed the second");

  std::vector<char> seed_row(n1, 0), seed_col(n2, 0);
  for (const auto& [i, j] : seeds) {
    if (i < 0 || i >= n1 || j < 0 || j >= n2)
      throw std::invalid_argument("sgm_match: seed pair out of range");
    seed_row[i] = 1;
    seed_col[j] = 1;
  }
  std::vector<int> rest1, rest2;
  for (int i = 0; i < n1; ++i)
    if (!seed_row[i]) rest1.push_back(i);
  for (int j = 0; j < n2; ++j)
    if (!seed_col[j]) rest2.push_back(j);
  const int k1 = static_cast<int>(rest1.size());
  const int k2 = static_cast<int>(rest2.size());

  SgmResult result;
  result.matching.row_to_col.assign(n1, -1);
  for (const auto& [i, j] : seeds) result.matching.row_to_col[i] = j;
  if (k1 == 0) return result;

  const Graph a22 = detail::induced_subgraph(g1, rest1);
  const Graph b22 = detail::induced_subgraph(g2, rest2);

  // Witness counts: W(u, v) = number of seed pairs adjacent to both u and v.
  Matrix w(k1, k2);
  {
    std::vector<int> label1(n1, -1), label2(n2, -1);
    for (int idx = 0; idx < k1; ++idx) label1[rest1[idx]] = idx;
    for (int idx = 0; idx < k2; ++idx) label2[rest2[idx]] = idx;
    for (const auto& [si, sj] : seeds)
      for (const int* u = g1.neighbors_begin(si); u != g1.neighbors_end(si); ++u) {
        if (label1[*u] < 0) continue;
        for (const int* v = g2.neighbors_begin(sj); v != g2.neighbors_end(sj); ++v)
          if (label2[*v] >= 0) w(label1[*u], label2[*v]) += 1.0;
      }
  }

  Matrix p(k1, k2, 1.0 / k2);
  auto objective = [&](const Matrix& q) {
    return 2.0 * dot(q, w) + dot(q, detail::adjacency_conjugate(a22, q, b22));
  };
  double obj = objective(p);
  result.objective_history.push_back(obj);

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const Matrix apb = detail::adjacency_conjugate(a22, p, b22);
    Matrix grad(k1, k2);
    for (std::size_t t = 0; t < grad.size(); ++t)
      grad.data()[t] = 2.0 * (w.data()[t] + apb.data()[t]);

    const Matching direction = hungarian_max(grad);
    Matrix delta(k1, k2);
    for (int i = 0; i < k1; ++i) delta(i, direction.row_to_col[i]) = 1.0;
    add_scaled(delta, p, -1.0);

    const double b_lin = dot(delta, grad);
    if (b_lin <= 1e-12) break;  // stationary: no ascent direction left
    const double quad = dot(delta, detail::adjacency_conjugate(a22, delta, b22));
    double alpha = 1.0;
    if (quad < 0.0) alpha = std::min(1.0, std::max(0.0, -b_lin / (2.0 * quad)));

    add_scaled(p, delta, alpha);
    ++result.iterations;
    const double next_obj = objective(p);
    if (next_obj < obj - 1e-6 * std::max(1.0, std::fabs(obj)))
      throw std::runtime_error("sgm_match: objective decreased, line search is broken");
    obj = next_obj;
    result.objective_history.push_back(obj);

    double step_norm = 0.0;
    for (std::size_t t = 0; t < delta.size(); ++t)
      step_norm += delta.data()[t] * delta.data()[t];
    if (alpha * std::sqrt(step_norm) <= cfg.tolerance) break;
  }

  const Matching rounded = hungarian_max(p);
  for (int i = 0; i < k1; ++i)
    result.matching.row_to_col[rest1[i]] = rest2[rounded.row_to_col[i]];
  return result;
}

inline Matching sgm_match(const Graph& g1, const Graph& g2,
                          const std::vector<std::pair<int, int>>& seeds,
                          const SgmConfig& cfg = {}) {
  return sgm_match_detailed(g1, g2, seeds, cfg).matching;
}

}  // namespace seedgnn
