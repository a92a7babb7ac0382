#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qud/document.hpp"

namespace qud::encoding {

inline constexpr const char* kCls = "[CLS]";
inline constexpr const char* kSep = "[SEP]";
inline constexpr const char* kSos = "[sos]";
inline constexpr const char* kAnchorStart = "[A_START]";
inline constexpr const char* kAnchorEnd = "[A_END]";

/// Half-open character range [begin, end) into a rendering.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const CharSpan&) const = default;
};

/// Anchor-prediction input: the answer sentence followed by the whole document,
/// each sentence prefixed with `[sos] <id>`.
struct AnchorQueryEncoding {
  std::string text;
  std::map<int, CharSpan> sentence_marker_offsets;  // sentence index -> "[sos] <id>"
};

/// Named-entity span over a sentence's tokens, 0-based and inclusive.
struct EntitySpan {
  int sentence_index = 0;
  int token_start = 0;
  int token_end = 0;
  std::string entity_type;

  bool operator==(const EntitySpan&) const = default;
};

/// Question-generation input in its four parts.
struct GenerationPrompt {
  std::string context_part;  // s_1 .. s_{i-1}, anchor wrapped in [A_START] .. [A_END]
  std::string anchor_part;
  std::string answer_part;  // entity-masked answer sentence
  std::optional<std::string> question_part;

  /// Parts joined by " [SEP] "; the question part only when present.
  std::string render() const;
};

/// Requires 2 <= answer_index <= n.
AnchorQueryEncoding encode_anchor_query(const Document& doc, int answer_index);

/// Throws PreconditionError for out-of-range, overlapping, or foreign spans
/// (sentence_index differs from the sentence's index).
void check_spans(const Sentence& sentence, const std::vector<EntitySpan>& spans);

/// Replaces each token covered by a span with the span's type, one label per
/// token, so the token count is unchanged.
std::string mask_entities(const Sentence& sentence, const std::vector<EntitySpan>& spans);

/// Requires 1 <= anchor_index < answer_index <= n. `spans` are for the answer
/// sentence; pass none to skip masking.
GenerationPrompt encode_generation_prompt(const Document& doc, int answer_index, int anchor_index,
                                          const std::vector<EntitySpan>& spans = {},
                                          std::optional<std::string> question = std::nullopt);

/// Recovers the anchor part from a rendered prompt (the text between the first
/// and second " [SEP] "). Returns nullopt if the rendering has fewer parts.
std::optional<std::string> anchor_part_of(const std::string& rendering);

}  // namespace qud::encoding
