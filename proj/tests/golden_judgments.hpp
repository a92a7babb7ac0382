#pragma once

// Judgment sets laid out so their label proportions equal the published
// human-evaluation rows for the full system.

#include <string>
#include <utility>
#include <vector>

#include "qud/eval.hpp"

namespace qud::testing {

/// 1000 questions x 3 judges. Questions 1..757 receive only Yes/MinorError on
/// the first judgment, so they form the second judgment's subset.
inline std::vector<eval::JudgmentRecord> full_system_judgments() {
  using eval::Q1Label;
  using eval::Q2Label;
  std::vector<Q1Label> q1;
  auto push = [](auto& v, auto label, int count) { v.insert(v.end(), static_cast<std::size_t>(count), label); };
  push(q1, Q1Label::Yes, 2145);
  push(q1, Q1Label::MinorError, 126);
  push(q1, Q1Label::HalluMinor, 213);
  push(q1, Q1Label::AnsMinor, 120);
  push(q1, Q1Label::Nonsense, 192);
  push(q1, Q1Label::IrrelevantAnchor, 6);
  push(q1, Q1Label::IrrelevantSentence, 90);
  push(q1, Q1Label::HalluMajor, 72);
  push(q1, Q1Label::AnsMajor, 36);
  // Second judgment over the 2271 subset responses: 1000 answered, the rest skipped.
  std::vector<Q2Label> q2;
  push(q2, Q2Label::Yes, 788);
  push(q2, Q2Label::NotMainPoint, 31);
  push(q2, Q2Label::SortOf, 105);
  push(q2, Q2Label::No, 76);
  push(q2, Q2Label::Skipped, 1271);

  std::vector<eval::JudgmentRecord> out;
  std::size_t k = 0;
  for (int q = 1; q <= 1000; ++q) {
    for (int j = 1; j <= 3; ++j, ++k) {
      eval::JudgmentRecord r;
      r.question_id = "q" + std::to_string(q);
      r.judge_id = "j" + std::to_string(j);
      r.q1 = q1[k];
      r.q2 = k < q2.size() ? q2[k] : Q2Label::Skipped;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace qud::testing
