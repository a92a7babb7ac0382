#include "qud/document.hpp"

#include <cctype>

#include "qud/error.hpp"

namespace qud {

namespace {
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

Document::Document(std::string article_id, const std::vector<std::string>& texts)
    : article_id_(std::move(article_id)) {
  if (texts.empty()) throw InputError("document '" + article_id_ + "' has no sentences");
  sentences_.reserve(texts.size());
  int index = 1;
  for (const auto& raw : texts) {
    std::string text = normalize_text(raw);
    if (text.empty()) {
      throw InputError("document '" + article_id_ + "': sentence " + std::to_string(index) +
                       " is empty");
    }
    auto tokens = split_tokens(text);
    sentences_.push_back(Sentence{index++, std::move(text), std::move(tokens)});
  }
}

Document Document::from_indexed(std::string article_id,
                                const std::vector<std::pair<int, std::string>>& sentences) {
  std::vector<std::string> texts;
  texts.reserve(sentences.size());
  int expected = 1;
  for (const auto& [index, text] : sentences) {
    if (index != expected) {
      throw InputError("document '" + article_id + "': sentence ids not contiguous, expected " +
                       std::to_string(expected) + " but found " + std::to_string(index));
    }
    texts.push_back(text);
    ++expected;
  }
  return Document(std::move(article_id), texts);
}

const Sentence& Document::sentence(int index) const {
  if (index < 1 || index > size()) {
    throw PreconditionError("sentence index " + std::to_string(index) + " outside 1.." +
                            std::to_string(size()));
  }
  return sentences_[static_cast<std::size_t>(index - 1)];
}

}  // namespace qud
