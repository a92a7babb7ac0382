#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qud {

/// Trim outer whitespace and collapse internal whitespace runs to one space.
/// Case and punctuation are preserved.
std::string normalize_text(std::string_view text);

/// Whitespace-delimited surface tokens of `text`.
std::vector<std::string> split_tokens(std::string_view text);

struct Sentence {
  int index = 0;  // 1-based
  std::string text;
  std::vector<std::string> tokens;
};

/// An article as an ordered list of pre-segmented sentences, indexed 1..n.
///
/// Index 0 is reserved for "no sentence" (the root's anchor). Sentences are
/// never re-segmented here; the texts are only normalized.
class Document {
 public:
  Document() = default;

  /// Sentences get indices 1..texts.size() in order. Throws InputError on an
  /// empty list or a sentence that is blank after trimming.
  Document(std::string article_id, const std::vector<std::string>& texts);

  /// Builds from explicitly indexed sentences; indices must be exactly 1..n
  /// in order.
  static Document from_indexed(std::string article_id,
                               const std::vector<std::pair<int, std::string>>& sentences);

  const std::string& article_id() const noexcept { return article_id_; }
  int size() const noexcept { return static_cast<int>(sentences_.size()); }
  std::span<const Sentence> sentences() const noexcept { return sentences_; }

  /// 1-based access; throws PreconditionError when out of range.
  const Sentence& sentence(int index) const;

 private:
  std::string article_id_;
  std::vector<Sentence> sentences_;
};

}  // namespace qud
