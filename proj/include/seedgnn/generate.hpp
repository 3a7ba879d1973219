#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seedgnn/graph.hpp"
#include "seedgnn/rng.hpp"

namespace seedgnn {

/// A pair of correlated graphs plus ground truth and revealed seeds.
///
/// truth[i] is the g2 node corresponding to g1 node i, or -1 when the
/// correspondence is unknown (possible for subsampled real graphs, where a
/// node may survive in only one copy). seeds lists revealed true pairs
/// (g1 node, g2 node). Invariant: g1.num_nodes() <= g2.num_nodes().
struct GraphPairInstance {
  Graph g1;
  Graph g2;
  std::vector<int> truth;
  std::vector<std::pair<int, int>> seeds;

  int n1() const { return g1.num_nodes(); }
  int n2() const { return g2.num_nodes(); }
};

/// Erdos-Renyi G(n, p): each of the C(n,2) pairs is an edge independently.
inline Graph erdos_renyi(int n, double p, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(p)) edges.emplace_back(i, j);
  return Graph(n, edges);
}

/// Keep each edge independently with probability s; node set unchanged.
inline Graph subsample_edges(const Graph& g, double s, Rng& rng) {
  std::vector<std::pair<int, int>> kept;
  for (const auto& e : g.edge_list())
    if (rng.bernoulli(s)) kept.push_back(e);
  return Graph(g.num_nodes(), kept);
}

/// Apply a node relabeling: edge (a, b) becomes (perm[a], perm[b]).
inline Graph relabel(const Graph& g, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != g.num_nodes())
    throw std::invalid_argument("relabel: permutation size mismatch");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(g.num_edges());
  for (const auto& [a, b] : g.edge_list()) edges.emplace_back(perm[a], perm[b]);
  return Graph(g.num_nodes(), edges);
}

/// Reveal each known true pair independently with probability theta.
inline std::vector<std::pair<int, int>> sample_seeds(const std::vector<int>& truth, double theta,
                                                     Rng& rng) {
  std::vector<std::pair<int, int>> seeds;
  for (int i = 0; i < static_cast<int>(truth.size()); ++i) {
    if (truth[i] < 0) continue;
    if (rng.bernoulli(theta)) seeds.emplace_back(i, truth[i]);
  }
  return seeds;
}

/// Correlated Erdos-Renyi pair. A parent G(n, p) is sampled once; each copy
/// keeps every parent edge independently with probability s; the second copy
/// is relabeled by a uniform permutation; each true pair is revealed as a
/// seed with probability theta. Child RNG streams are fixed per artifact, so
/// the same root seed always reproduces the same instance byte for byte.
inline GraphPairInstance generate_correlated_er(int n, double p, double s, double theta,
                                                const Rng& root) {
  if (n <= 0) throw std::invalid_argument("generate_correlated_er: n must be positive");
  for (double q : {p, s, theta})
    if (q < 0.0 || q > 1.0)
      throw std::invalid_argument("generate_correlated_er: probability outside [0, 1]");

  Rng parent_rng = root.split(stream::kParent);
  Rng g1_rng = root.split(stream::kGraph1);
  Rng g2_rng = root.split(stream::kGraph2);
  Rng perm_rng = root.split(stream::kPermutation);
  Rng seed_rng = root.split(stream::kSeeds);

  const Graph parent = erdos_renyi(n, p, parent_rng);
  GraphPairInstance inst;
  inst.g1 = subsample_edges(parent, s, g1_rng);
  const Graph g2_unshuffled = subsample_edges(parent, s, g2_rng);
  const std::vector<int> perm = perm_rng.permutation(n);
  inst.g2 = relabel(g2_unshuffled, perm);
  inst.truth = perm;
  inst.seeds = sample_seeds(inst.truth, theta, seed_rng);
  return inst;
}

inline std::vector<std::pair<int, int>> sample_seeds_ordered(
    const std::vector<int>& truth, const std::vector<char>& kept_a, const std::vector<char>& kept_b,
    const std::vector<int>& label_a, double theta, Rng& rng, int n_parent) {
  std::vector<std::pair<int, int>> seeds;
  for (int v = 0; v < n_parent; ++v) {
    if (!kept_a[v] || !kept_b[v]) continue;
    const int i = label_a[v];
    if (rng.bernoulli(theta)) seeds.emplace_back(i, truth[i]);
  }
  return seeds;
}

/// Two correlated subsamples of an arbitrary parent graph: each copy keeps
/// nodes with probability node_keep and surviving edges (both endpoints kept)
/// with probability edge_s. Kept nodes are relabeled compactly; the larger
/// copy becomes g2 and is shuffled by a uniform permutation. Ground truth is
/// partial: nodes surviving in only one copy map to -1.
inline GraphPairInstance subsample_real_pair(const Graph& parent, double node_keep, double edge_s,
                                             double theta, const Rng& root) {
  const int n = parent.num_nodes();
  if (n == 0) throw std::invalid_argument("subsample_real_pair: empty parent");

  Rng n1_rng = root.split(stream::kNodes1);
  Rng n2_rng = root.split(stream::kNodes2);
  Rng e1_rng = root.split(stream::kGraph1);
  Rng e2_rng = root.split(stream::kGraph2);
  Rng perm_rng = root.split(stream::kPermutation);
  Rng seed_rng = root.split(stream::kSeeds);

  std::vector<char> kept_a(n), kept_b(n);
  for (int v = 0; v < n; ++v) kept_a[v] = n1_rng.bernoulli(node_keep) ? 1 : 0;
  for (int v = 0; v < n; ++v) kept_b[v] = n2_rng.bernoulli(node_keep) ? 1 : 0;

  bool any_common = false;
  for (int v = 0; v < n; ++v)
    if (kept_a[v] && kept_b[v]) any_common = true;
  if (!any_common)
    throw std::runtime_error("subsample_real_pair: node samples share no vertex");

  // Compact labels per side, ascending in parent order.
  std::vector<int> label_a(n, -1), label_b(n, -1);
  int ka = 0, kb = 0;
  for (int v = 0; v < n; ++v) {
    if (kept_a[v]) label_a[v] = ka++;
    if (kept_b[v]) label_b[v] = kb++;
  }

  auto sample_side = [&](const std::vector<char>& kept, const std::vector<int>& label, int k,
                         Rng& erng) {
    std::vector<std::pair<int, int>> edges;
    for (const auto& [a, b] : parent.edge_list()) {
      const bool survives = erng.bernoulli(edge_s);
      if (survives && kept[a] && kept[b]) edges.emplace_back(label[a], label[b]);
    }
    return Graph(k, edges);
  };
  Graph side_a = sample_side(kept_a, label_a, ka, e1_rng);
  Graph side_b = sample_side(kept_b, label_b, kb, e2_rng);

  // The smaller side plays g1 so that n1 <= n2 holds for the matchers.
  const bool swap_sides = ka > kb;
  if (swap_sides) {
    std::swap(side_a, side_b);
    std::swap(kept_a, kept_b);
    std::swap(label_a, label_b);
    std::swap(ka, kb);
  }

  GraphPairInstance inst;
  inst.g1 = std::move(side_a);
  const std::vector<int> perm = perm_rng.permutation(kb);
  inst.g2 = relabel(side_b, perm);
  inst.truth.assign(ka, -1);
  for (int v = 0; v < n; ++v)
    if (kept_a[v] && kept_b[v]) inst.truth[label_a[v]] = perm[label_b[v]];
  inst.seeds = sample_seeds_ordered(inst.truth, kept_a, kept_b, label_a, theta, seed_rng, n);
  return inst;
}

// ---------------------------------------------------------------------------
// Seed and truth files. Same conventions as edge lists: '#' comments, one
// 0-based pair per line. Truth files carry a "# nodes N" directive so that
// unmapped nodes round-trip.
// ---------------------------------------------------------------------------

inline std::vector<std::pair<int, int>> read_pair_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pair file: " + path);
  std::vector<std::pair<int, int>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') continue;
    long long a, b;
    std::istringstream ps(line);
    if (!(ps >> a >> b))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two integers");
    if (a < 0 || b < 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": negative node id");
    pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  return pairs;
}

inline void write_pair_file(const std::vector<std::pair<int, int>>& pairs,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pair file: " + path);
  for (const auto& [a, b] : pairs) out << a << " " << b << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_truth_file(const std::vector<int>& truth, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write truth file: " + path);
  out << "# nodes " << truth.size() << "\n";
  for (int i = 0; i < static_cast<int>(truth.size()); ++i)
    if (truth[i] >= 0) out << i << " " << truth[i] << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<int> read_truth_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open truth file: " + path);
  int declared_n = -1;
  std::vector<std::pair<int, int>> pairs;
  std::string line;
  int lineno = 0;
  int max_i = -1;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      std::istringstream cs(line.substr(1));
      std::string word;
      long long n;
      if (cs >> word >> n && word == "nodes") declared_n = static_cast<int>(n);
      continue;
    }
    long long a, b;
    std::istringstream ps(line);
    if (!(ps >> a >> b))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two integers");
    if (a < 0 || b < 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": negative node id");
    pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
    max_i = std::max(max_i, static_cast<int>(a));
  }
  const int n = declared_n >= 0 ? declared_n : max_i + 1;
  std::vector<int> truth(n, -1);
  for (const auto& [i, j] : pairs) {
    if (i >= n)
      throw std::runtime_error(path + ": row index " + std::to_string(i) +
                               " exceeds node count " + std::to_string(n));
    if (truth[i] >= 0) throw std::runtime_error(path + ": duplicate truth row " + std::to_string(i));
    truth[i] = j;
  }
  return truth;
}

}  // namespace seedgnn
