#pragma once

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seedgnn {

/// Undirected simple graph in compressed sparse row form. Neighbor lists are
/// sorted ascending and every edge appears in both directions; self loops and
/// duplicate edges are rejected or collapsed at construction. Sorted CSR
/// fixes the summation order of every kernel that walks neighbors, which is
/// what makes repeated runs bit-identical.
class Graph {
 public:
  Graph() = default;

  /// Build from an edge list over nodes {0, ..., n-1}. Duplicate edges (in
  /// either orientation) collapse to one; self loops are rejected.
  Graph(int n, const std::vector<std::pair<int, int>>& edges) : n_(n) {
    if (n < 0) throw std::invalid_argument("Graph: negative node count");
    std::vector<std::pair<int, int>> canon;
    canon.reserve(edges.size());
    for (const auto& [a, b] : edges) {
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw std::invalid_argument("Graph: endpoint out of range");
      if (a == b) throw std::invalid_argument("Graph: self loop");
      canon.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
    build_csr(canon);
  }

  int num_nodes() const { return n_; }
  int num_edges() const { return m_; }

  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Sorted neighbor list of v as a contiguous range.
  const int* neighbors_begin(int v) const { return adj_.data() + offsets_[v]; }
  const int* neighbors_end(int v) const { return adj_.data() + offsets_[v + 1]; }

  bool has_edge(int a, int b) const {
    if (a < 0 || b < 0 || a >= n_ || b >= n_ || a == b) return false;
    return std::binary_search(neighbors_begin(a), neighbors_end(a), b);
  }

  /// Unique undirected edges, (min, max) ordered, ascending.
  std::vector<std::pair<int, int>> edge_list() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(m_);
    for (int v = 0; v < n_; ++v)
      for (const int* w = neighbors_begin(v); w != neighbors_end(v); ++w)
        if (v < *w) out.emplace_back(v, *w);
    return out;
  }

  bool operator==(const Graph& o) const {
    return n_ == o.n_ && offsets_ == o.offsets_ && adj_ == o.adj_;
  }

  /// BFS hop distances from src; -1 marks unreachable nodes.
  std::vector<int> bfs_distances(int src) const {
    if (src < 0 || src >= n_) throw std::invalid_argument("bfs_distances: bad source");
    std::vector<int> dist(n_, -1);
    std::deque<int> q;
    dist[src] = 0;
    q.push_back(src);
    while (!q.empty()) {
      const int v = q.front();
      q.pop_front();
      for (const int* w = neighbors_begin(v); w != neighbors_end(v); ++w)
        if (dist[*w] < 0) {
          dist[*w] = dist[v] + 1;
          q.push_back(*w);
        }
    }
    return dist;
  }

 private:
  void build_csr(const std::vector<std::pair<int, int>>& canon) {
    m_ = static_cast<int>(canon.size());
    offsets_.assign(n_ + 1, 0);
    for (const auto& [a, b] : canon) {
      ++offsets_[a + 1];
      ++offsets_[b + 1];
    }
    for (int v = 0; v < n_; ++v) offsets_[v + 1] += offsets_[v];
    adj_.resize(2 * static_cast<std::size_t>(m_));
    std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [a, b] : canon) {
      adj_[cursor[a]++] = b;
      adj_[cursor[b]++] = a;
    }
    // Canonical edge order plus cursor fill leaves each list sorted already;
    // sort defensively anyway, it is cheap and guards future edits.
    for (int v = 0; v < n_; ++v)
      std::sort(adj_.begin() + offsets_[v], adj_.begin() + offsets_[v + 1]);
  }

  int n_ = 0;
  int m_ = 0;
  std::vector<int> offsets_;
  std::vector<int> adj_;
};

// ---------------------------------------------------------------------------
// Edge-list files. Format: optional "# nodes N" directive, then one
// whitespace-separated 0-based pair per line. Other '#' lines are comments.
// The writer always emits the node directive and edges in canonical order, so
// identical graphs serialize to identical bytes.
// ---------------------------------------------------------------------------

inline Graph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  std::vector<std::pair<int, int>> edges;
  int declared_n = -1;
  int max_id = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank line
    if (first[0] == '#') {
      std::istringstream cs(line.substr(1));
      std::string word;
      long long n;
      if (cs >> word >> n && word == "nodes") declared_n = static_cast<int>(n);
      continue;
    }
    long long a, b;
    std::istringstream es(line);
    if (!(es >> a >> b))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two integers");
    if (a < 0 || b < 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": negative node id");
    if (a == b)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": self loop");
    edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
    max_id = std::max(max_id, static_cast<int>(std::max(a, b)));
  }
  const int n = declared_n >= 0 ? declared_n : max_id + 1;
  if (max_id >= n)
    throw std::runtime_error(path + ": node id " + std::to_string(max_id) +
                             " exceeds declared node count " + std::to_string(n));
  return Graph(n, edges);
}

inline void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write edge list: " + path);
  out << "# nodes " << g.num_nodes() << "\n";
  for (const auto& [a, b] : g.edge_list()) out << a << " " << b << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace seedgnn
