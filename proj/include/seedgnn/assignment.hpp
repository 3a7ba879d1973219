#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "seedgnn/matrix.hpp"

namespace seedgnn {

/// Row-to-column assignment. row_to_col[i] is the matched column of row i,
/// or -1 when row i is unmatched (possible for the percolation matcher; the
/// optimal-assignment solvers always match every row).
struct Matching {
  std::vector<int> row_to_col;

  int rows() const { return static_cast<int>(row_to_col.size()); }
};

/// Maximum-weight full assignment of rows to distinct columns, rows <= cols,
/// by shortest augmenting paths over dual potentials (Jonker-Volgenant
/// scheme, O(rows^2 * cols)). Deterministic: rows are inserted in index
/// order and equal-reduced-cost columns are broken toward the lower index.
inline Matching hungarian_max(const Matrix& score) {
  const int n = score.rows();
  const int m = score.cols();
  if (n > m) throw std::invalid_argument("hungarian_max: more rows than columns");
  for (std::size_t t = 0; t < score.size(); ++t)
    if (!std::isfinite(score.data()[t]))
      throw std::invalid_argument("hungarian_max: non-finite score");
  const double kInf = std::numeric_limits<double>::infinity();

  // 1-based arrays; column 0 is the virtual staging column.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0);  // match[j] = row occupying column j
  std::vector<int> way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = -score(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Matching result;
  result.row_to_col.assign(n, -1);
  for (int j = 1; j <= m; ++j)
    if (match[j] != 0) result.row_to_col[match[j] - 1] = j - 1;
  return result;
}

/// Total score collected by a matching; unmatched rows contribute nothing.
inline double matching_objective(const Matrix& score, const Matching& m) {
  if (m.rows() != score.rows()) throw std::invalid_argument("matching_objective: size mismatch");
  double total = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    if (m.row_to_col[i] >= 0) total += score(i, m.row_to_col[i]);
  return total;
}

/// Exhaustive maximum assignment for small instances, used as an oracle.
/// Enumerates every injection of rows into columns.
inline std::pair<Matching, double> brute_force_assignment(const Matrix& score) {
  const int n = score.rows();
  const int m = score.cols();
  if (n > m) throw std::invalid_argument("brute_force_assignment: more rows than columns");
  if (m > 10) throw std::invalid_argument("brute_force_assignment: oracle capped at 10 columns");

  std::vector<int> current(n, -1), best(n, -1);
  std::vector<char> used(m, 0);
  double best_total = -std::numeric_limits<double>::infinity();
  std::function<void(int, double)> recurse = [&](int row, double total) {
    if (row == n) {
      if (total > best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    for (int j = 0; j < m; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      current[row] = j;
      recurse(row + 1, total + score(row, j));
      used[j] = 0;
    }
  };
  recurse(0, 0.0);
  return {Matching{best}, best_total};
}

/// True when no other full assignment reaches the optimum: re-solving with
/// each matched cell forbidden must fall short by more than slack. Used to
/// screen out degenerate instances whose optimal matching is not a function
/// of the scores alone.
inline bool assignment_is_unique(const Matrix& score, const Matching& opt, double slack = 1e-9) {
  const double best = matching_objective(score, opt);
  const double floor_value = -1e30;
  for (int i = 0; i < opt.rows(); ++i) {
    const int j = opt.row_to_col[i];
    if (j < 0) continue;
    Matrix forbidden = score;
    forbidden(i, j) = floor_value;
    const Matching alt = hungarian_max(forbidden);
    if (matching_objective(score, alt) >= best - slack) return false;
  }
  return true;
}

enum class AccuracyMode { kAll, kNonSeed };

/// Fraction of correctly matched nodes among those with known truth. kNonSeed
/// additionally excludes the revealed seed rows from both numerator and
/// denominator. Returns 0 when no node qualifies.
inline double matching_accuracy(const Matching& m, const std::vector<int>& truth,
                                const std::vector<std::pair<int, int>>& seeds, AccuracyMode mode) {
  if (m.rows() != static_cast<int>(truth.size()))
    throw std::invalid_argument("matching_accuracy: truth size mismatch");
  std::vector<char> is_seed_row(truth.size(), 0);
  for (const auto& [i, j] : seeds) {
    if (i < 0 || i >= static_cast<int>(truth.size()))
      throw std::invalid_argument("matching_accuracy: seed row out of range");
    is_seed_row[i] = 1;
  }
  int eligible = 0, correct = 0;
  for (int i = 0; i < m.rows(); ++i) {
    if (truth[i] < 0) continue;
    if (mode == AccuracyMode::kNonSeed && is_seed_row[i]) continue;
    ++eligible;
    if (m.row_to_col[i] == truth[i]) ++correct;
  }
  return eligible == 0 ? 0.0 : static_cast<double>(correct) / eligible;
}

}  // namespace seedgnn
