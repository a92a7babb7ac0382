#pragma once

// Brute-force reference computations used by the unit and acceptance suites.
// These deliberately avoid the library's traversal code: everything is
// recomputed from the raw parent array by repeated parent walks.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace qud::testing {

/// Parents for nodes 1..n in slots 1..n (slot 0 unused, 0 marks a root).
using ParentArray = std::vector<int>;

inline bool is_ancestor_or_self(const ParentArray& p, int anc, int node) {
  for (int cur = node; cur != 0; cur = p[static_cast<std::size_t>(cur)]) {
    if (cur == anc) return true;
  }
  return false;
}

inline int depth_of(const ParentArray& p, int node) {
  int d = 0;
  for (int cur = p[static_cast<std::size_t>(node)]; cur != 0; cur = p[static_cast<std::size_t>(cur)]) ++d;
  return d;
}

struct OracleStats {
  int height = 0;
  double norm_arc_len = 0;
  double prop_leaf = 0;
  double avg_depth = 0;
  double right_branch = 0;
  int gap_max = 0;
  int gap_total = 0;
};

/// Single-rooted trees only.
inline OracleStats oracle_stats(const ParentArray& p) {
  const int n = static_cast<int>(p.size()) - 1;
  OracleStats s;
  int leaves = 0;
  int right = 0;
  int depth_sum = 0;
  int arc_sum = 0;
  int arcs = 0;
  for (int i = 1; i <= n; ++i) {
    bool has_child = false;
    for (int j = 1; j <= n; ++j) has_child = has_child || p[static_cast<std::size_t>(j)] == i;
    if (!has_child) ++leaves;
    const int d = depth_of(p, i);
    depth_sum += d;
    s.height = std::max(s.height, d);
    const int par = p[static_cast<std::size_t>(i)];
    if (par != 0) {
      arc_sum += std::abs(i - par);
      ++arcs;
      if (par == i - 1) ++right;
    }
    // Yield of i: every j whose ancestor chain contains i.
    std::vector<int> yield;
    for (int j = 1; j <= n; ++j) {
      if (is_ancestor_or_self(p, i, j)) yield.push_back(j);
    }
    int blocks = 1;
    for (std::size_t k = 1; k < yield.size(); ++k) {
      if (yield[k] != yield[k - 1] + 1) ++blocks;
    }
    s.gap_max = std::max(s.gap_max, blocks - 1);
    s.gap_total += blocks - 1;
  }
  s.prop_leaf = static_cast<double>(leaves) / n;
  s.avg_depth = static_cast<double>(depth_sum) / n;
  s.right_branch = static_cast<double>(right) / n;
  s.norm_arc_len = arcs ? (static_cast<double>(arc_sum) / arcs) / n : 0.0;
  return s;
}

/// Random tree rooted at 1 with parent(i) < i (QUD shape).
inline ParentArray random_qud_parents(std::mt19937_64& rng, int n) {
  ParentArray p(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 2; i <= n; ++i) {
    p[static_cast<std::size_t>(i)] = std::uniform_int_distribution<int>(1, i - 1)(rng);
  }
  return p;
}

/// Random tree with an arbitrary root and arbitrary attachment directions.
inline ParentArray random_any_parents(std::mt19937_64& rng, int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  ParentArray p(static_cast<std::size_t>(n) + 1, 0);
  for (int k = 1; k < n; ++k) {
    int parent = order[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, k - 1)(rng))];
    p[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = parent;
  }
  return p;
}

/// Krippendorff's alpha straight from the pairwise definition:
/// D_o averages disagreement over ordered within-item pairs weighted by
/// 1/(m_u - 1); D_e over all ordered pairs of pairable values.
template <typename Cell, typename Delta>
double oracle_alpha(const std::vector<std::vector<std::optional<Cell>>>& matrix, Delta delta) {
  std::vector<Cell> pooled;
  double observed = 0.0;
  for (const auto& row : matrix) {
    std::vector<Cell> vals;
    for (const auto& c : row) {
      if (c) vals.push_back(*c);
    }
    if (vals.size() < 2) continue;
    double item = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      for (std::size_t j = 0; j < vals.size(); ++j) {
        if (i != j) item += delta(vals[i], vals[j]);
      }
    }
    observed += item / static_cast<double>(vals.size() - 1);
    pooled.insert(pooled.end(), vals.begin(), vals.end());
  }
  const double n = static_cast<double>(pooled.size());
  observed /= n;
  double expected = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = 0; j < pooled.size(); ++j) {
      if (i != j) expected += delta(pooled[i], pooled[j]);
    }
  }
  expected /= n * (n - 1.0);
  if (observed == 0.0) return 1.0;
  return 1.0 - observed / expected;
}

}  // namespace qud::testing
