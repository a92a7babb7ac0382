#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qud/document.hpp"
#include "qud/qud_tree.hpp"

namespace qud::dcqa {

/// One crowdsourced question: `answer_sentence_id` answers a question raised
/// at `anchor_sentence_id`.
struct DcqaQuestion {
  std::string article_id;
  std::string worker_id;
  int answer_sentence_id = 0;
  int anchor_sentence_id = 0;
  std::string question_text;

  bool operator==(const DcqaQuestion&) const = default;
};

struct Diagnostic {
  std::string file;
  std::size_t line = 0;
  std::string message;

  std::string to_string() const;
};

/// Reads the articles file: one JSON object per line,
/// {"article_id": str, "sentences": [{"index": int, "text": str}, ...]}.
/// Blank lines are skipped. Throws InputError naming file, line and field.
std::vector<Document> load_articles(const std::filesystem::path& path);
std::vector<Document> parse_articles(const std::string& content, const std::string& source_name);

/// Canonical serialization of documents (inverse of load_articles up to
/// text normalization).
std::string serialize_articles(const std::vector<Document>& docs);

struct QuestionLoad {
  std::vector<DcqaQuestion> questions;
  std::vector<Diagnostic> rejected;  // ordering-invariant violations
  std::vector<Diagnostic> warnings;  // e.g. unknown article ids
};

/// Reads the questions file: one JSON object per line with the five
/// DcqaQuestion fields. When `docs` is non-empty, article ids and sentence
/// ranges are checked against it (unknown article -> warning, record kept).
QuestionLoad load_questions(const std::filesystem::path& path,
                            const std::vector<Document>& docs = {});
QuestionLoad parse_questions(const std::string& content, const std::string& source_name,
                             const std::vector<Document>& docs = {});

std::string serialize_questions(const std::vector<DcqaQuestion>& questions);

/// Maps one record of the published DCQA release (keys such as ArticleID,
/// AnchorSentenceID, AnswerSentenceID, Question, WorkerId; matched without
/// regard to case or underscores) onto the canonical schema. The release
/// layout is an assumption kept in one place so it can change independently.
std::string adapt_release_record(const std::string& json_record);

struct DuplicateQuestion {
  std::string worker_id;
  int answer_sentence_id = 0;
  std::size_t record = 0;  // position in the input list
};

/// Per-worker QUD trees for one article.
struct AnnotatorTreeSet {
  std::string article_id;
  std::map<std::string, QudTree> trees;
  /// For each worker, the input record index behind each tree entry (aligned
  /// with trees[worker].entries).
  std::map<std::string, std::vector<std::size_t>> sources;
  /// Answer sentences a worker did not annotate; non-empty means partial.
  std::map<std::string, std::vector<int>> missing;
  std::vector<DuplicateQuestion> duplicates;

  bool is_partial(const std::string& worker) const;
};

/// Groups questions by worker; the first question per (worker, answer) in
/// input order wins and later ones are reported as duplicates.
AnnotatorTreeSet build_trees(const std::vector<DcqaQuestion>& questions, const Document& doc);

}  // namespace qud::dcqa
