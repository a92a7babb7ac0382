#include <gtest/gtest.h>

#include <random>

#include "golden_cases.hpp"
#include "qud/encoding.hpp"
#include "qud/error.hpp"

namespace qud::encoding {
namespace {

Document three() { return Document("d", {"Rain fell.", "Streets flooded.", "Schools closed."}); }

TEST(EncodeAnchorQuery, TwoSentenceTemplate) {
  Document doc("d", {"Rain fell.", "Streets flooded."});
  auto enc = encode_anchor_query(doc, 2);
  EXPECT_EQ(enc.text, "[CLS] Streets flooded. [SEP] [sos] 1 Rain fell. [sos] 2 Streets flooded.");
  ASSERT_EQ(enc.sentence_marker_offsets.size(), 2u);
  auto m1 = enc.sentence_marker_offsets.at(1);
  auto m2 = enc.sentence_marker_offsets.at(2);
  EXPECT_EQ(enc.text.substr(m1.begin, m1.end - m1.begin), "[sos] 1");
  EXPECT_EQ(enc.text.substr(m2.begin, m2.end - m2.begin), "[sos] 2");
}

TEST(EncodeAnchorQuery, Preconditions) {
  EXPECT_THROW(encode_anchor_query(three(), 1), PreconditionError);
  EXPECT_THROW(encode_anchor_query(three(), 4), PreconditionError);
  EXPECT_THROW(encode_anchor_query(Document("d", {"Only."}), 1), PreconditionError);
}

TEST(EncodeAnchorQuery, EverySentenceRenderedOnceInOrder) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 30)(rng);
    std::vector<std::string> texts;
    for (int i = 1; i <= n; ++i) texts.push_back("S" + std::to_string(i) + " w" + std::to_string(rng() % 100) + ".");
    Document doc("d", texts);
    const int answer = std::uniform_int_distribution<int>(2, n)(rng);
    auto enc = encode_anchor_query(doc, answer);
    ASSERT_EQ(static_cast<int>(enc.sentence_marker_offsets.size()), n);
    std::size_t prev = 0;
    for (int i = 1; i <= n; ++i) {
      auto span = enc.sentence_marker_offsets.at(i);
      EXPECT_GT(span.begin, prev);
      prev = span.begin;
      const std::string marker = "[sos] " + std::to_string(i);
      EXPECT_EQ(enc.text.substr(span.begin, span.end - span.begin), marker);
      // The sentence text follows its marker.
      EXPECT_EQ(enc.text.compare(span.end + 1, doc.sentence(i).text.size(), doc.sentence(i).text), 0);
    }
    // Exactly n markers in total.
    std::size_t count = 0;
    for (auto pos = enc.text.find("[sos] "); pos != std::string::npos; pos = enc.text.find("[sos] ", pos + 1)) ++count;
    EXPECT_EQ(count, static_cast<std::size_t>(n));
  }
}

TEST(MaskEntities, PerTokenSubstitution) {
  Document doc("d", {"Hurricane Hugo hit Carolina"});
  const auto& s = doc.sentence(1);
  EXPECT_EQ(mask_entities(s, {{1, 0, 1, "MISC"}, {1, 3, 3, "LOC"}}), "MISC MISC hit LOC");
  EXPECT_EQ(mask_entities(s, {}), "Hurricane Hugo hit Carolina");
  EXPECT_EQ(mask_entities(s, {{1, 0, 3, "ORG"}}), "ORG ORG ORG ORG");
}

TEST(MaskEntities, RejectsBadSpans) {
  Document doc("d", {"a b c d"});
  const auto& s = doc.sentence(1);
  EXPECT_THROW(mask_entities(s, {{1, 0, 2, "X"}, {1, 2, 3, "Y"}}), PreconditionError);  // overlap
  EXPECT_THROW(mask_entities(s, {{1, 2, 4, "X"}}), PreconditionError);
  EXPECT_THROW(mask_entities(s, {{1, 2, 1, "X"}}), PreconditionError);
  EXPECT_THROW(mask_entities(s, {{2, 0, 0, "X"}}), PreconditionError);  // other sentence
  EXPECT_THROW(mask_entities(s, {{1, 0, 0, "TWO WORDS"}}), PreconditionError);
}

TEST(MaskEntities, PreservesTokenCount) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int len = std::uniform_int_distribution<int>(1, 25)(rng);
    std::string text;
    for (int k = 0; k < len; ++k) text += "tok" + std::to_string(k) + " ";
    Document doc("d", {text});
    const auto& s = doc.sentence(1);
    std::vector<EntitySpan> spans;
    for (int k = 0; k < len;) {
      int width = std::uniform_int_distribution<int>(1, 3)(rng);
      int end = std::min(len - 1, k + width - 1);
      if (rng() % 2) spans.push_back({1, k, end, (rng() % 2) ? "PER" : "LOC"});
      k = end + 1;
    }
    auto masked = mask_entities(s, spans);
    EXPECT_EQ(split_tokens(masked).size(), s.tokens.size());
  }
}

TEST(EncodeGenerationPrompt, TemplateWithAndWithoutQuestion) {
  auto p = encode_generation_prompt(three(), 3, 1);
  EXPECT_EQ(p.render(), "[A_START] Rain fell. [A_END] Streets flooded. [SEP] Rain fell. [SEP] Schools closed.");
  EXPECT_EQ(p.anchor_part, "Rain fell.");
  EXPECT_FALSE(p.question_part.has_value());
  auto q = encode_generation_prompt(three(), 3, 1, {}, std::string("Why?"));
  EXPECT_EQ(q.render(), p.render() + " [SEP] Why?");
  EXPECT_EQ(anchor_part_of(q.render()), std::optional<std::string>("Rain fell."));
}

TEST(EncodeGenerationPrompt, IndexErrors) {
  EXPECT_THROW(encode_generation_prompt(three(), 2, 2), PreconditionError);
  EXPECT_THROW(encode_generation_prompt(three(), 2, 3), PreconditionError);
  EXPECT_THROW(encode_generation_prompt(three(), 4, 1), PreconditionError);
  EXPECT_THROW(encode_generation_prompt(three(), 2, 0), PreconditionError);
}

TEST(EncodeGenerationPrompt, AnchorSitsInContextUnwrapped) {
  Document doc("d", {"A one.", "B two.", "C three.", "D four.", "E five."});
  for (int answer = 2; answer <= 5; ++answer) {
    for (int anchor = 1; anchor < answer; ++anchor) {
      auto p = encode_generation_prompt(doc, answer, anchor);
      std::string unwrapped;
      for (int i = 1; i < answer; ++i) unwrapped += (i > 1 ? " " : "") + doc.sentence(i).text;
      std::string context = p.context_part;
      auto erase = [&](const std::string& marker) {
        auto pos = context.find(marker);
        ASSERT_NE(pos, std::string::npos);
        context.erase(pos, marker.size());
      };
      erase(std::string(kAnchorStart) + " ");
      erase(std::string(" ") + kAnchorEnd);
      EXPECT_EQ(context, unwrapped);
      const std::string wrapped = std::string(kAnchorStart) + " " + p.anchor_part + " " + kAnchorEnd;
      EXPECT_NE(p.context_part.find(wrapped), std::string::npos);
    }
  }
}

TEST(EncodingGoldens, MatchByteForByte) {
  auto cases = qud::testing::run_golden_cases(QUD_GOLDEN_DIR);
  ASSERT_GE(cases.size(), 7u);
  for (const auto& c : cases) EXPECT_EQ(c.rendered, c.expected) << c.name;
}

TEST(EncodingGoldens, Deterministic) {
  auto a = qud::testing::run_golden_cases(QUD_GOLDEN_DIR);
  auto b = qud::testing::run_golden_cases(QUD_GOLDEN_DIR);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].rendered, b[k].rendered);
}

}  // namespace
}  // namespace qud::encoding
