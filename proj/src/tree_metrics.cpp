#include "qud/tree_metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>

#include "qud/error.hpp"

namespace qud::metrics {

namespace {

struct ComponentStats {
  int size = 0;
  int height = 0;
  long arc_sum = 0;
  int leaves = 0;
  long depth_sum = 0;
  int right = 0;
};

ComponentStats component(const DepTree& tree, int root) {
  ComponentStats c;
  std::vector<std::pair<int, int>> stack{{root, 0}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    ++c.size;
    c.height = std::max(c.height, depth);
    c.depth_sum += depth;
    const auto& kids = tree.children(node);
    if (kids.empty()) ++c.leaves;
    int p = tree.parent(node);
    if (p != 0) {
      c.arc_sum += std::abs(node - p);
      if (p == node - 1) ++c.right;
    }
    for (int k : kids) stack.push_back({k, depth + 1});
  }
  return c;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

TreeStats stats(const DepTree& tree) {
  if (tree.n() < 1) throw PreconditionError("stats of an empty tree");
  TreeStats s;
  s.components = static_cast<int>(tree.roots().size());
  s.partial = tree.is_forest();
  for (int root : tree.roots()) {
    auto c = component(tree, root);
    const double m = c.size;
    s.height += c.height;
    s.norm_arc_len += c.size > 1 ? (static_cast<double>(c.arc_sum) / (c.size - 1)) / m : 0.0;
    s.prop_leaf += c.leaves / m;
    s.avg_depth += static_cast<double>(c.depth_sum) / m;
    s.right_branch += c.right / m;
  }
  const double k = s.components;
  s.height /= k;
  s.norm_arc_len /= k;
  s.prop_leaf /= k;
  s.avg_depth /= k;
  s.right_branch /= k;
  return s;
}

GapReport gap_report(const DepTree& tree) {
  const int n = tree.n();
  // Yield of every node as a membership bitmap, built bottom-up in reverse
  // BFS order.
  std::vector<int> order;
  for (int r : tree.roots()) order.push_back(r);
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (int c : tree.children(order[k])) order.push_back(c);
  }
  std::vector<std::vector<bool>> yield(static_cast<std::size_t>(n) + 1,
                                       std::vector<bool>(static_cast<std::size_t>(n) + 2, false));
  GapReport report;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto& y = yield[static_cast<std::size_t>(*it)];
    y[static_cast<std::size_t>(*it)] = true;
    for (int c : tree.children(*it)) {
      const auto& cy = yield[static_cast<std::size_t>(c)];
      for (int i = 1; i <= n; ++i) {
        if (cy[static_cast<std::size_t>(i)]) y[static_cast<std::size_t>(i)] = true;
      }
    }
    int blocks = 0;
    for (int i = 1; i <= n; ++i) {
      if (y[static_cast<std::size_t>(i)] && !y[static_cast<std::size_t>(i - 1)]) ++blocks;
    }
    const int gaps = blocks - 1;
    report.gap_degree_max = std::max(report.gap_degree_max, gaps);
    report.gap_total += gaps;
  }
  return report;
}

double attachment_score(const DepTree& a, const DepTree& b, AttachmentNorm norm) {
  if (a.n() != b.n()) {
    throw PreconditionError("attachment score of trees with " + std::to_string(a.n()) + " and " +
                            std::to_string(b.n()) + " sentences");
  }
  const int n = a.n();
  int matches = 0;
  int compared = 0;
  for (int i = 1; i <= n; ++i) {
    const int pa = a.parent(i);
    const int pb = b.parent(i);
    if (pa == 0 && pb == 0) continue;
    ++compared;
    if (pa == pb) ++matches;
  }
  if (norm == AttachmentNorm::AllSentences) return static_cast<double>(matches) / n;
  if (compared == 0) return 1.0;  // n == 1
  return static_cast<double>(matches) / compared;
}

CorpusRow summarize(const std::string& label, const std::vector<NamedTree>& trees) {
  CorpusRow row;
  row.label = label;
  row.trees = trees.size();
  if (trees.empty()) return row;
  for (const auto& t : trees) {
    auto s = stats(t.tree);
    auto g = gap_report(t.tree);
    if (s.partial) ++row.partial_trees;
    row.height += s.height;
    row.norm_arc_len += s.norm_arc_len;
    row.prop_leaf += s.prop_leaf;
    row.avg_depth += s.avg_depth;
    row.right_branch += s.right_branch;
    row.gap_degree_max += g.gap_degree_max;
    row.gap_total += g.gap_total;
  }
  const double k = static_cast<double>(trees.size());
  row.height /= k;
  row.norm_arc_len /= k;
  row.prop_leaf /= k;
  row.avg_depth /= k;
  row.right_branch /= k;
  row.gap_degree_max /= k;
  row.gap_total /= k;
  return row;
}

CorpusReport corpus_report(const std::vector<NamedTree>& trees, const std::vector<NamedTree>* paired,
                           const std::string& label, const std::string& paired_label,
                           AttachmentNorm norm) {
  CorpusReport report;
  report.norm = norm;
  report.rows.push_back(summarize(label, trees));
  if (paired == nullptr) return report;
  if (paired->size() != trees.size()) {
    throw PreconditionError("paired tree lists differ in length: " + std::to_string(trees.size()) +
                            " vs " + std::to_string(paired->size()));
  }
  report.rows.push_back(summarize(paired_label, *paired));
  double total = 0.0;
  for (std::size_t k = 0; k < trees.size(); ++k) {
    const auto& a = trees[k];
    const auto& b = (*paired)[k];
    if (a.article_id != b.article_id) {
      throw PreconditionError("pair " + std::to_string(k + 1) + " misaligned: '" + a.article_id +
                              "' vs '" + b.article_id + "'");
    }
    total += attachment_score(a.tree, b.tree, norm);
  }
  report.att_score = trees.empty() ? 0.0 : total / static_cast<double>(trees.size());
  return report;
}

namespace {
std::string conventions(const CorpusReport& report) {
  return std::string("# conventions: height=edges on longest root-to-leaf path; ") +
         "arc length=|i-parent(i)|; att_score denominator=" +
         (report.norm == AttachmentNorm::NonRoot ? "n-1" : "n") +
         "; forests averaged per component\n";
}
}  // namespace

std::string format_table(const CorpusReport& report) {
  std::string out = conventions(report);
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const auto& row = report.rows[r];
    out += "# row " + std::to_string(r + 1) + ": " + row.label + " (" + std::to_string(row.trees) +
           " trees, " + std::to_string(row.partial_trees) + " partial; gap_degree_max mean " +
           fixed2(row.gap_degree_max) + ", gap_total mean " + fixed2(row.gap_total) + ")\n";
  }
  out += "height\tnorm_arc_len\tprop_leaf\tavg_depth\tright_branch\tatt_score\n";
  for (const auto& row : report.rows) {
    out += fixed2(row.height) + "\t" + fixed2(row.norm_arc_len) + "\t" + fixed2(row.prop_leaf) +
           "\t" + fixed2(row.avg_depth) + "\t" + fixed2(row.right_branch) + "\t" +
           (report.att_score ? fixed2(*report.att_score) : std::string("NA")) + "\n";
  }
  return out;
}

std::string format_pretty(const CorpusReport& report) {
  std::string out = conventions(report);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %6s %8s %8s %8s %8s %8s %8s %9s %6s\n", "trees", "count",
                "height", "arc_len", "leaf", "depth", "right", "att", "gap_max", "gap_tot");
  out += buf;
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%-16s %6zu %8.2f %8.2f %8.2f %8.2f %8.2f %8s %9.2f %6.2f\n",
                  row.label.c_str(), row.trees, row.height, row.norm_arc_len, row.prop_leaf,
                  row.avg_depth, row.right_branch,
                  report.att_score ? fixed2(*report.att_score).c_str() : "-", row.gap_degree_max,
                  row.gap_total);
    out += buf;
  }
  return out;
}

}  // namespace qud::metrics
