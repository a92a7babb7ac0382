#include "qud/qud_tree.hpp"

#include <algorithm>
#include <map>

namespace qud {

const QudEntry* QudTree::find(int answer) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), answer,
                             [](const QudEntry& e, int a) { return e.answer < a; });
  if (it == entries.end() || it->answer != answer) return nullptr;
  return &*it;
}

void QudTree::sort_entries() {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const QudEntry& a, const QudEntry& b) { return a.answer < b.answer; });
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

ValidationReport validate_tree(const QudTree& tree) {
  ValidationReport report;
  auto add = [&](int index, std::string msg) {
    report.violations.push_back({index, std::move(msg)});
  };
  auto at = [](int i) { return " at i=" + std::to_string(i); };

  if (tree.n < 1) {
    add(0, "tree size n=" + std::to_string(tree.n) + " is not positive");
    return report;
  }

  std::map<int, int> seen;  // answer -> count
  std::map<int, int> anchors;
  for (const auto& e : tree.entries) {
    if (++seen[e.answer] > 1) {
      add(e.answer, "duplicate entry" + at(e.answer));
      continue;
    }
    if (e.answer == 1) {
      add(1, "root sentence has an entry" + at(1));
      continue;
    }
    if (e.answer < 1 || e.answer > tree.n) {
      add(e.answer, "entry for index outside 2..n" + at(e.answer));
      continue;
    }
    if (e.anchor >= e.answer) {
      add(e.answer, "anchor not strictly earlier" + at(e.answer));
    } else if (e.anchor < 1) {
      add(e.answer, "anchor below 1" + at(e.answer));
    } else {
      anchors[e.answer] = e.anchor;
    }
    if (normalize_text(e.question).empty()) add(e.answer, "empty question" + at(e.answer));
  }
  for (int i = 2; i <= tree.n; ++i) {
    if (!seen.contains(i)) add(i, "missing entry for i=" + std::to_string(i));
  }

  // Rooting check: with complete, strictly-preceding anchors every walk ends at 1.
  if (report.ok()) {
    for (int i = 2; i <= tree.n; ++i) {
      int cur = i;
      int steps = 0;
      while (cur != 1 && steps <= tree.n) {
        cur = anchors.at(cur);
        ++steps;
      }
      if (cur != 1) add(i, "sentence not connected to root" + at(i));
    }
  }
  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.index < b.index; });
  return report;
}

ValidationReport validate_tree(const QudTree& tree, const Document& doc) {
  ValidationReport report = validate_tree(tree);
  if (tree.n != doc.size()) {
    report.violations.insert(report.violations.begin(),
                             {0, "tree size n=" + std::to_string(tree.n) +
                                     " does not match document size " +
                                     std::to_string(doc.size())});
  }
  if (tree.article_id != doc.article_id()) {
    report.violations.insert(report.violations.begin(),
                             {0, "tree article '" + tree.article_id +
                                     "' does not match document '" + doc.article_id() + "'"});
  }
  return report;
}

InvalidTreeError::InvalidTreeError(ValidationReport report)
    : Error("invalid QUD tree: " + report.to_string()), report_(std::move(report)) {}

DepTree to_dep_tree(const QudTree& tree) {
  auto report = validate_tree(tree);
  if (!report.ok()) throw InvalidTreeError(std::move(report));
  std::vector<int> parents(static_cast<std::size_t>(tree.n) + 1, 0);
  for (const auto& e : tree.entries) parents[static_cast<std::size_t>(e.answer)] = e.anchor;
  return DepTree::tree(std::move(parents));
}

DepTree to_dep_forest(const QudTree& tree) {
  auto report = validate_tree(tree);
  std::erase_if(report.violations, [](const Violation& v) {
    return v.message.starts_with("missing entry");
  });
  if (!report.ok()) throw InvalidTreeError(std::move(report));
  std::vector<int> parents(static_cast<std::size_t>(tree.n) + 1, 0);
  for (const auto& e : tree.entries) parents[static_cast<std::size_t>(e.answer)] = e.anchor;
  return DepTree::forest(std::move(parents));
}

}  // namespace qud
