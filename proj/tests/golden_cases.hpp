#pragma once

// Encoding golden cases: tests/golden/encoding_cases.json lists the inputs,
// tests/golden/<name>.golden holds the exact expected rendering.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qud/encoding.hpp"

namespace qud::testing {

struct GoldenCase {
  std::string name;
  std::string rendered;
  std::string expected;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::vector<GoldenCase> run_golden_cases(const std::filesystem::path& dir) {
  auto cases = nlohmann::json::parse(slurp(dir / "encoding_cases.json"));
  std::vector<GoldenCase> out;
  for (const auto& c : cases) {
    Document doc("golden", c.at("sentences").get<std::vector<std::string>>());
    const int answer = c.at("answer").get<int>();
    std::string rendered;
    if (c.at("kind") == "anchor") {
      rendered = encoding::encode_anchor_query(doc, answer).text;
    } else {
      std::vector<encoding::EntitySpan> spans;
      for (const auto& s : c.value("spans", nlohmann::json::array())) {
        spans.push_back({answer, s[0].get<int>(), s[1].get<int>(), s[2].get<std::string>()});
      }
      std::optional<std::string> question;
      if (c.contains("question")) question = c.at("question").get<std::string>();
      rendered = encoding::encode_generation_prompt(doc, answer, c.at("anchor").get<int>(), spans, question)
                     .render();
    }
    auto name = c.at("name").get<std::string>();
    out.push_back({name, rendered, slurp(dir / (name + ".golden"))});
  }
  return out;
}

}  // namespace qud::testing
