#include "qud/dep_tree.hpp"

#include <string>

#include "qud/error.hpp"

namespace qud {

DepTree DepTree::tree(std::vector<int> parents) { return DepTree(std::move(parents), false); }

DepTree DepTree::forest(std::vector<int> parents) { return DepTree(std::move(parents), true); }

DepTree DepTree::from_heads(const std::vector<int>& heads_from_2) {
  std::vector<int> parents{0, 0};
  parents.insert(parents.end(), heads_from_2.begin(), heads_from_2.end());
  return tree(std::move(parents));
}

DepTree::DepTree(std::vector<int> parents, bool allow_forest) : parents_(std::move(parents)) {
  if (parents_.size() < 2) throw InputError("dependency tree needs at least one node");
  n_ = static_cast<int>(parents_.size()) - 1;
  parents_[0] = 0;
  children_.assign(parents_.size(), {});
  for (int i = 1; i <= n_; ++i) {
    int p = parents_[static_cast<std::size_t>(i)];
    if (p < 0 || p > n_) {
      throw InputError("parent of " + std::to_string(i) + " out of range: " + std::to_string(p));
    }
    if (p == i) throw InputError("node " + std::to_string(i) + " is its own parent");
    if (p == 0) {
      roots_.push_back(i);
    } else {
      children_[static_cast<std::size_t>(p)].push_back(i);
    }
  }
  if (roots_.empty()) throw InputError("dependency structure has no root");
  if (!allow_forest && roots_.size() > 1) {
    throw InputError("dependency tree has " + std::to_string(roots_.size()) + " roots");
  }
  // Every node must reach a root within n steps.
  for (int i = 1; i <= n_; ++i) {
    int cur = i;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n_) throw InputError("cycle through node " + std::to_string(i));
      cur = parents_[static_cast<std::size_t>(cur)];
    }
  }
}

}  // namespace qud
