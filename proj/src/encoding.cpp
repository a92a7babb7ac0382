#include "qud/encoding.hpp"

#include <algorithm>
#include <cctype>

#include "qud/error.hpp"

namespace qud::encoding {

namespace {
const std::string kSepJoin = std::string(" ") + kSep + " ";
}  // namespace

std::string GenerationPrompt::render() const {
  std::string out = context_part + kSepJoin + anchor_part + kSepJoin + answer_part;
  if (question_part) out += kSepJoin + *question_part;
  return out;
}

AnchorQueryEncoding encode_anchor_query(const Document& doc, int answer_index) {
  if (doc.size() < 2) {
    throw PreconditionError("anchor query needs at least 2 sentences, document has " +
                            std::to_string(doc.size()));
  }
  if (answer_index < 2 || answer_index > doc.size()) {
    throw PreconditionError("answer index " + std::to_string(answer_index) + " outside 2.." +
                            std::to_string(doc.size()));
  }
  AnchorQueryEncoding enc;
  enc.text = std::string(kCls) + " " + doc.sentence(answer_index).text + " " + kSep;
  for (const auto& s : doc.sentences()) {
    enc.text += ' ';
    std::size_t begin = enc.text.size();
    enc.text += kSos;
    enc.text += ' ';
    enc.text += std::to_string(s.index);
    enc.sentence_marker_offsets[s.index] = CharSpan{begin, enc.text.size()};
    enc.text += ' ';
    enc.text += s.text;
  }
  return enc;
}

void check_spans(const Sentence& sentence, const std::vector<EntitySpan>& spans) {
  const int count = static_cast<int>(sentence.tokens.size());
  std::vector<const EntitySpan*> sorted;
  for (const auto& span : spans) {
    if (span.sentence_index != sentence.index) {
      throw PreconditionError("entity span for sentence " + std::to_string(span.sentence_index) +
                              " applied to sentence " + std::to_string(sentence.index));
    }
    if (span.token_start < 0 || span.token_start > span.token_end || span.token_end >= count) {
      throw PreconditionError("entity span " + std::to_string(span.token_start) + ".." +
                              std::to_string(span.token_end) + " invalid for " +
                              std::to_string(count) + " tokens");
    }
    if (span.entity_type.empty() ||
        std::any_of(span.entity_type.begin(), span.entity_type.end(),
                    [](unsigned char c) { return std::isspace(c) != 0; })) {
      throw PreconditionError("entity type must be a single non-empty token");
    }
    sorted.push_back(&span);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const EntitySpan* a, const EntitySpan* b) { return a->token_start < b->token_start; });
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (sorted[k]->token_start <= sorted[k - 1]->token_end) {
      throw PreconditionError("overlapping entity spans at token " +
                              std::to_string(sorted[k]->token_start));
    }
  }
}

std::string mask_entities(const Sentence& sentence, const std::vector<EntitySpan>& spans) {
  check_spans(sentence, spans);
  std::vector<const std::string*> out;
  out.reserve(sentence.tokens.size());
  for (const auto& t : sentence.tokens) out.push_back(&t);
  for (const auto& span : spans) {
    for (int k = span.token_start; k <= span.token_end; ++k) {
      out[static_cast<std::size_t>(k)] = &span.entity_type;
    }
  }
  std::string text;
  for (const auto* t : out) {
    if (!text.empty()) text += ' ';
    text += *t;
  }
  return text;
}

GenerationPrompt encode_generation_prompt(const Document& doc, int answer_index, int anchor_index,
                                          const std::vector<EntitySpan>& spans,
                                          std::optional<std::string> question) {
  if (anchor_index < 1 || anchor_index >= answer_index || answer_index > doc.size()) {
    throw PreconditionError("generation prompt needs 1 <= anchor < answer <= n, got anchor " +
                            std::to_string(anchor_index) + ", answer " +
                            std::to_string(answer_index) + ", n " + std::to_string(doc.size()));
  }
  GenerationPrompt prompt;
  for (int i = 1; i < answer_index; ++i) {
    if (!prompt.context_part.empty()) prompt.context_part += ' ';
    if (i == anchor_index) {
      prompt.context_part += std::string(kAnchorStart) + " " + doc.sentence(i).text + " " + kAnchorEnd;
    } else {
      prompt.context_part += doc.sentence(i).text;
    }
  }
  prompt.anchor_part = doc.sentence(anchor_index).text;
  prompt.answer_part = mask_entities(doc.sentence(answer_index), spans);
  prompt.question_part = std::move(question);
  return prompt;
}

std::optional<std::string> anchor_part_of(const std::string& rendering) {
  auto first = rendering.find(kSepJoin);
  if (first == std::string::npos) return std::nullopt;
  auto start = first + kSepJoin.size();
  auto second = rendering.find(kSepJoin, start);
  if (second == std::string::npos) return std::nullopt;
  return rendering.substr(start, second - start);
}

}  // namespace qud::encoding
