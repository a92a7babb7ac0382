#pragma once

#include <vector>

namespace qud {

/// Bare parent-array dependency structure over sentences 1..n.
///
/// parent(i) == 0 marks a root. A tree has exactly one root; a forest (from a
/// partial annotation) may have several. Construction always rejects cycles,
/// self-loops and out-of-range parents.
class DepTree {
 public:
  DepTree() = default;

  /// `parents` holds n+1 entries; slot 0 is ignored. Requires a single root.
  static DepTree tree(std::vector<int> parents);
  /// Same, but any number (>= 1) of roots is accepted.
  static DepTree forest(std::vector<int> parents);
  /// Convenience: tree rooted at 1 from the parents of 2..n.
  static DepTree from_heads(const std::vector<int>& heads_from_2);

  int n() const noexcept { return n_; }
  /// First root in index order (the root, for a tree).
  int root() const noexcept { return roots_.empty() ? 0 : roots_.front(); }
  const std::vector<int>& roots() const noexcept { return roots_; }
  bool is_forest() const noexcept { return roots_.size() > 1; }

  int parent(int i) const { return parents_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& parents() const noexcept { return parents_; }
  const std::vector<int>& children(int i) const { return children_.at(static_cast<std::size_t>(i)); }

  bool operator==(const DepTree& other) const { return parents_ == other.parents_; }

 private:
  DepTree(std::vector<int> parents, bool allow_forest);

  int n_ = 0;
  std::vector<int> parents_{0};
  std::vector<int> roots_;
  std::vector<std::vector<int>> children_{{}};
};

}  // namespace qud
