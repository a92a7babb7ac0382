#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qud/dep_tree.hpp"
#include "qud/encoding.hpp"
#include "qud/qud_tree.hpp"

namespace qud::formats {

/// One line of a trees file. Either a QUD tree
///   {"article_id", "n", "entries": [{"answer", "anchor", "question"}], "variant"?}
/// or a bare dependency tree
///   {"article_id", "n", "parent": [p_1, ..., p_n]}   (0 marks a root)
struct TreeRecord {
  std::string article_id;
  std::optional<QudTree> qud;
  DepTree dep;  // forest when the QUD tree is partial
  std::optional<std::string> variant;

  bool partial() const { return dep.is_forest(); }
};

std::string qud_tree_line(const QudTree& tree, const std::optional<std::string>& variant = {});
std::string dep_tree_line(const std::string& article_id, const DepTree& tree);

std::vector<TreeRecord> parse_trees(const std::string& content, const std::string& source_name);
std::vector<TreeRecord> load_trees(const std::filesystem::path& path);

/// Entity spans file: one JSON object per line,
/// {"sentence_index", "token_start", "token_end", "entity_type"}.
std::vector<encoding::EntitySpan> parse_spans(const std::string& content,
                                              const std::string& source_name);

std::string read_text(const std::filesystem::path& path);
/// Writes via a temporary sibling then renames.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace qud::formats
