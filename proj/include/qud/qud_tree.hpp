#pragma once

#include <string>
#include <vector>

#include "qud/dep_tree.hpp"
#include "qud/document.hpp"
#include "qud/error.hpp"

namespace qud {

/// One labeled edge: sentence `answer` hangs off sentence `anchor` via `question`.
struct QudEntry {
  int answer = 0;
  int anchor = 0;
  std::string question;

  bool operator==(const QudEntry&) const = default;
};

/// QUD dependency tree over an n-sentence document. Sentence 1 is the root and
/// carries no entry. The struct may hold invalid data; validate_tree decides.
struct QudTree {
  std::string article_id;
  int n = 0;
  std::vector<QudEntry> entries;  // kept sorted by answer index

  const QudEntry* find(int answer) const;
  void sort_entries();

  bool operator==(const QudTree&) const = default;
};

struct Violation {
  int index = 0;  // offending answer index, or 0 for tree-level problems
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::string to_string() const;
};

/// Checks every QudTree invariant; violations are data, never thrown.
ValidationReport validate_tree(const QudTree& tree);
/// Also checks tree.n against the document length.
ValidationReport validate_tree(const QudTree& tree, const Document& doc);

class InvalidTreeError : public Error {
 public:
  explicit InvalidTreeError(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// parent[i] = anchor of i, rooted at 1. Throws InvalidTreeError.
DepTree to_dep_tree(const QudTree& tree);

/// Like to_dep_tree but tolerates missing entries: sentences without an entry
/// become component roots. Other violations still throw.
DepTree to_dep_forest(const QudTree& tree);

}  // namespace qud
