#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qud/dep_tree.hpp"

namespace qud::metrics {

/// Shape statistics of one dependency tree.
///
/// Conventions: height counts edges; the arc to node i has length
/// |i - parent(i)|; depth of a root is 0. For forests every field is the mean
/// over connected components (each normalized by its own size) and `partial`
/// is set, which is why height is real-valued.
struct TreeStats {
  double height = 0.0;
  double norm_arc_len = 0.0;
  double prop_leaf = 0.0;
  double avg_depth = 0.0;
  double right_branch = 0.0;
  bool partial = false;
  int components = 1;
};

TreeStats stats(const DepTree& tree);

/// Non-projectivity: for each node, the number of gaps in its yield (itself
/// plus descendants, as a set of sentence indices).
struct GapReport {
  int gap_degree_max = 0;
  int gap_total = 0;

  bool operator==(const GapReport&) const = default;
};

GapReport gap_report(const DepTree& tree);

enum class AttachmentNorm {
  NonRoot,       // matches / (n - 1): identical trees score 1
  AllSentences,  // matches / n
};

/// Fraction of sentences attached to the same parent in both trees. A node
/// that is a root in both trees is not compared. Throws PreconditionError on
/// a size mismatch.
double attachment_score(const DepTree& a, const DepTree& b,
                        AttachmentNorm norm = AttachmentNorm::NonRoot);

struct NamedTree {
  std::string article_id;
  DepTree tree;
};

struct CorpusRow {
  std::string label;
  std::size_t trees = 0;
  std::size_t partial_trees = 0;
  double height = 0.0;
  double norm_arc_len = 0.0;
  double prop_leaf = 0.0;
  double avg_depth = 0.0;
  double right_branch = 0.0;
  double gap_degree_max = 0.0;  // mean per-tree maximum
  double gap_total = 0.0;       // mean per-tree total
};

struct CorpusReport {
  std::vector<CorpusRow> rows;
  std::optional<double> att_score;  // when paired
  AttachmentNorm norm = AttachmentNorm::NonRoot;
};

CorpusRow summarize(const std::string& label, const std::vector<NamedTree>& trees);

/// Mean statistics per list; with a second list, also the mean attachment
/// score over article-aligned pairs. Pairs must share article id and size.
CorpusReport corpus_report(const std::vector<NamedTree>& trees,
                           const std::vector<NamedTree>* paired = nullptr,
                           const std::string& label = "trees",
                           const std::string& paired_label = "paired",
                           AttachmentNorm norm = AttachmentNorm::NonRoot);

/// Tab-separated table with the columns height, norm_arc_len, prop_leaf,
/// avg_depth, right_branch, att_score; comment lines carry conventions and
/// row labels. Values use two decimals.
std::string format_table(const CorpusReport& report);

/// Aligned plain-text version including gap statistics.
std::string format_pretty(const CorpusReport& report);

}  // namespace qud::metrics
