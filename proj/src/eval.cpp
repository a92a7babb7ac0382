#include "qud/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qud/error.hpp"

namespace qud::eval {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kQ1LabelCount> kQ1Names{
    "Yes",     "MinorError",         "HalluMinor", "AnsMinor", "Nonsense", "IrrelevantAnchor",
    "IrrelevantSentence", "HalluMajor", "AnsMajor"};
constexpr std::array<std::string_view, kQ1GroupCount> kGroupNames{"Yes", "MinorError", "SortOf",
                                                                  "No"};
constexpr std::array<std::string_view, 5> kQ2Names{"Yes", "NotMainPoint", "SortOf", "No",
                                                   "Skipped"};

std::size_t idx(Q1Label l) { return static_cast<std::size_t>(l); }
std::size_t idx(Q1Group g) { return static_cast<std::size_t>(g); }
std::size_t idx(Q2Label l) { return static_cast<std::size_t>(l); }

/// Records grouped by question id, in first-seen order.
std::vector<std::pair<std::string, std::vector<const JudgmentRecord*>>> by_question(
    const std::vector<JudgmentRecord>& records) {
  std::vector<std::pair<std::string, std::vector<const JudgmentRecord*>>> groups;
  std::map<std::string, std::size_t> pos;
  for (const auto& r : records) {
    auto [it, inserted] = pos.try_emplace(r.question_id, groups.size());
    if (inserted) groups.push_back({r.question_id, {}});
    groups[it->second].second.push_back(&r);
  }
  return groups;
}

std::size_t fixed_judge_count(
    const std::vector<std::pair<std::string, std::vector<const JudgmentRecord*>>>& groups) {
  std::map<std::size_t, std::size_t> freq;
  for (const auto& [q, rs] : groups) ++freq[rs.size()];
  if (freq.size() <= 1) return freq.empty() ? 0 : freq.begin()->first;
  auto common = std::max_element(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
                  return a.second < b.second;
                })->first;
  std::string bad;
  for (const auto& [q, rs] : groups) {
    if (rs.size() != common) {
      bad += (bad.empty() ? "" : ", ") + q + " (" + std::to_string(rs.size()) + ")";
    }
  }
  throw PreconditionError("uneven judge counts, expected " + std::to_string(common) + ": " + bad);
}

std::string pct1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

/// Strict-majority and unanimity tallies plus the alpha matrix for one
/// labeling function.
template <typename LabelFn>
RatingMatrix matrix_of(
    const std::vector<std::pair<std::string, std::vector<const JudgmentRecord*>>>& groups,
    LabelFn&& label) {
  RatingMatrix m;
  for (const auto& [q, rs] : groups) {
    std::vector<std::optional<LabelSet>> row;
    for (const auto* r : rs) row.push_back(LabelSet{std::string(label(*r))});
    m.push_back(std::move(row));
  }
  return m;
}

std::optional<double> alpha_or_empty(const RatingMatrix& m) {
  if (m.size() < 2) return std::nullopt;
  return krippendorff_alpha(m, Distance::Nominal);
}

template <typename FineFn>
void tally_agreement(
    const std::vector<std::pair<std::string, std::vector<const JudgmentRecord*>>>& groups,
    FineFn&& fine, AgreementSummary& s) {
  std::size_t unanimous = 0;
  std::size_t majority = 0;
  for (const auto& [q, rs] : groups) {
    std::map<std::string, std::size_t> counts;
    for (const auto* r : rs) ++counts[std::string(fine(*r))];
    std::size_t top = 0;
    for (const auto& [l, c] : counts) top = std::max(top, c);
    if (counts.size() == 1) ++unanimous;
    if (2 * top > rs.size()) ++majority;
  }
  s.questions = groups.size();
  if (!groups.empty()) {
    s.all_agree_pct = 100.0 * static_cast<double>(unanimous) / static_cast<double>(groups.size());
    s.majority_pct = 100.0 * static_cast<double>(majority) / static_cast<double>(groups.size());
  }
}

}  // namespace

Q1Group group_of(Q1Label label) {
  switch (label) {
    case Q1Label::Yes: return Q1Group::Yes;
    case Q1Label::MinorError: return Q1Group::MinorError;
    case Q1Label::HalluMinor:
    case Q1Label::AnsMinor: return Q1Group::SortOf;
    default: return Q1Group::No;
  }
}

std::string_view to_string(Q1Label label) { return kQ1Names[idx(label)]; }
std::string_view to_string(Q1Group group) { return kGroupNames[idx(group)]; }
std::string_view to_string(Q2Label label) { return kQ2Names[idx(label)]; }

Q1Label parse_q1(std::string_view s) {
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto group = s.substr(0, slash);
    auto leaf = s.substr(slash + 1);
    auto label = parse_q1(leaf);
    if (group != to_string(group_of(label))) {
      throw InputError("Q1 label '" + std::string(s) + "' has the wrong group");
    }
    return label;
  }
  for (std::size_t k = 0; k < kQ1Names.size(); ++k) {
    if (kQ1Names[k] == s) return static_cast<Q1Label>(k);
  }
  throw InputError("unknown Q1 label '" + std::string(s) + "'");
}

Q2Label parse_q2(std::string_view s) {
  for (std::size_t k = 0; k < kQ2Names.size(); ++k) {
    if (kQ2Names[k] == s) return static_cast<Q2Label>(k);
  }
  throw InputError("unknown Q2 label '" + std::string(s) + "'");
}

std::vector<JudgmentRecord> parse_judgments(const std::string& content,
                                            const std::string& source_name) {
  std::vector<JudgmentRecord> out;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = source_name + ":" + std::to_string(lineno) + ": ";
    try {
      json j = json::parse(line);
      JudgmentRecord r;
      r.question_id = j.at("question_id").get<std::string>();
      r.judge_id = j.at("judge_id").get<std::string>();
      r.q1 = parse_q1(j.at("q1_fine_label").get<std::string>());
      r.q2 = parse_q2(j.value("q2_label", std::string("Skipped")));
      r.system = j.value("system", std::string("Full"));
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw InputError(where + e.what());
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
  }
  return out;
}

std::vector<JudgmentRecord> load_judgments(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_judgments(buf.str(), path.string());
}

std::string serialize_judgments(const std::vector<JudgmentRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["question_id"] = r.question_id;
    j["judge_id"] = r.judge_id;
    j["q1_fine_label"] = std::string(to_string(r.q1));
    j["q2_label"] = std::string(to_string(r.q2));
    j["system"] = r.system;
    out += j.dump() + "\n";
  }
  return out;
}

Q1Aggregate aggregate_q1(const std::vector<JudgmentRecord>& records) {
  if (records.empty()) throw PreconditionError("no judgments to aggregate");
  std::array<std::size_t, kQ1LabelCount> counts{};
  for (const auto& r : records) ++counts[idx(r.q1)];
  Q1Aggregate agg;
  agg.responses = records.size();
  const double total = static_cast<double>(records.size());
  for (std::size_t k = 0; k < kQ1LabelCount; ++k) {
    agg.fine[k] = 100.0 * static_cast<double>(counts[k]) / total;
    agg.coarse[idx(group_of(static_cast<Q1Label>(k)))] += agg.fine[k];
  }
  return agg;
}

std::vector<std::string> q2_subset(const std::vector<JudgmentRecord>& records) {
  auto groups = by_question(records);
  fixed_judge_count(groups);
  std::vector<std::string> ids;
  for (const auto& [q, rs] : groups) {
    if (std::all_of(rs.begin(), rs.end(), [](const JudgmentRecord* r) {
          return r->q1 == Q1Label::Yes || r->q1 == Q1Label::MinorError;
        })) {
      ids.push_back(q);
    }
  }
  return ids;
}

std::vector<JudgmentRecord> restrict_to(const std::vector<JudgmentRecord>& records,
                                        const std::vector<std::string>& question_ids) {
  std::set<std::string> keep(question_ids.begin(), question_ids.end());
  std::vector<JudgmentRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [&](const JudgmentRecord& r) { return keep.contains(r.question_id); });
  return out;
}

Q2Aggregate aggregate_q2(const std::vector<JudgmentRecord>& records) {
  Q2Aggregate agg;
  std::array<std::size_t, kQ2LabelCount> counts{};
  for (const auto& r : records) {
    if (r.q2 == Q2Label::Skipped) {
      ++agg.skipped;
    } else {
      ++counts[idx(r.q2)];
      ++agg.responses;
    }
  }
  if (agg.responses == 0) throw PreconditionError("empty denominator: every Q2 response skipped");
  for (std::size_t k = 0; k < kQ2LabelCount; ++k) {
    agg.pct[k] = 100.0 * static_cast<double>(counts[k]) / static_cast<double>(agg.responses);
  }
  return agg;
}

std::vector<std::pair<std::string, std::vector<JudgmentRecord>>> by_system(
    const std::vector<JudgmentRecord>& records) {
  std::vector<std::pair<std::string, std::vector<JudgmentRecord>>> out;
  std::map<std::string, std::size_t> pos;
  for (const auto& r : records) {
    auto [it, inserted] = pos.try_emplace(r.system, out.size());
    if (inserted) out.push_back({r.system, {}});
    out[it->second].second.push_back(r);
  }
  return out;
}

double masi_distance(const LabelSet& a, const LabelSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  const double jaccard = static_cast<double>(inter) / static_cast<double>(uni);
  double monotonicity;
  if (a == b) {
    monotonicity = 1.0;
  } else if (inter == std::min(a.size(), b.size())) {
    monotonicity = 2.0 / 3.0;  // one strictly contains the other
  } else if (inter > 0) {
    monotonicity = 1.0 / 3.0;
  } else {
    monotonicity = 0.0;
  }
  return 1.0 - jaccard * monotonicity;
}

double krippendorff_alpha(const RatingMatrix& matrix, Distance distance) {
  if (matrix.size() < 2) throw PreconditionError("krippendorff alpha needs at least 2 items");
  // Distinct values and the coincidence matrix over them.
  std::map<LabelSet, std::size_t> value_index;
  std::vector<const LabelSet*> values;
  for (const auto& row : matrix) {
    for (const auto& cell : row) {
      if (!cell) continue;
      if (distance == Distance::Nominal && cell->size() != 1) {
        throw PreconditionError("nominal distance needs exactly one label per cell");
      }
      auto [it, inserted] = value_index.try_emplace(*cell, values.size());
      if (inserted) values.push_back(&it->first);
    }
  }
  const std::size_t v = values.size();
  std::vector<double> coincidence(v * v, 0.0);
  for (const auto& row : matrix) {
    std::vector<std::size_t> counts(v, 0);
    std::size_t m = 0;
    for (const auto& cell : row) {
      if (cell) {
        ++counts[value_index.at(*cell)];
        ++m;
      }
    }
    if (m < 2) continue;
    const double w = 1.0 / static_cast<double>(m - 1);
    for (std::size_t c = 0; c < v; ++c) {
      if (!counts[c]) continue;
      for (std::size_t k = 0; k < v; ++k) {
        if (!counts[k]) continue;
        const double pairs = c == k ? static_cast<double>(counts[c] * (counts[c] - 1))
                                    : static_cast<double>(counts[c] * counts[k]);
        coincidence[c * v + k] += pairs * w;
      }
    }
  }
  std::vector<double> marginal(v, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < v; ++c) {
    for (std::size_t k = 0; k < v; ++k) marginal[c] += coincidence[c * v + k];
    n += marginal[c];
  }
  if (n <= 0.0) throw PreconditionError("krippendorff alpha: no pairable values");

  auto delta = [&](std::size_t c, std::size_t k) {
    if (c == k) return 0.0;
    if (distance == Distance::Nominal) return 1.0;
    return masi_distance(*values[c], *values[k]);
  };
  double observed = 0.0;
  double expected = 0.0;
  for (std::size_t c = 0; c < v; ++c) {
    for (std::size_t k = 0; k < v; ++k) {
      const double d = delta(c, k);
      observed += coincidence[c * v + k] * d;
      expected += marginal[c] * marginal[k] * d;
    }
  }
  observed /= n;
  expected /= n * (n - 1.0);
  if (observed == 0.0) return 1.0;
  return 1.0 - observed / expected;
}

RatingMatrix single_label_matrix(
    const std::vector<std::vector<std::optional<std::string>>>& rows) {
  RatingMatrix m;
  for (const auto& row : rows) {
    std::vector<std::optional<LabelSet>> out;
    for (const auto& cell : row) {
      out.push_back(cell ? std::optional<LabelSet>(LabelSet{*cell}) : std::nullopt);
    }
    m.push_back(std::move(out));
  }
  return m;
}

AgreementSummary q1_agreement(const std::vector<JudgmentRecord>& records) {
  auto groups = by_question(records);
  fixed_judge_count(groups);
  AgreementSummary s;
  tally_agreement(groups, [](const JudgmentRecord& r) { return to_string(r.q1); }, s);
  s.alpha_yes_vs_others = alpha_or_empty(matrix_of(groups, [](const JudgmentRecord& r) {
    return r.q1 == Q1Label::Yes ? "yes" : "other";
  }));
  s.alpha_coarse = alpha_or_empty(
      matrix_of(groups, [](const JudgmentRecord& r) { return to_string(group_of(r.q1)); }));
  s.alpha_fine =
      alpha_or_empty(matrix_of(groups, [](const JudgmentRecord& r) { return to_string(r.q1); }));
  return s;
}

AgreementSummary q2_agreement(const std::vector<JudgmentRecord>& records) {
  auto all = by_question(records);
  fixed_judge_count(all);
  decltype(all) groups;
  for (auto& g : all) {
    if (std::none_of(g.second.begin(), g.second.end(),
                     [](const JudgmentRecord* r) { return r->q2 == Q2Label::Skipped; })) {
      groups.push_back(std::move(g));
    }
  }
  AgreementSummary s;
  tally_agreement(groups, [](const JudgmentRecord& r) { return to_string(r.q2); }, s);
  s.alpha_yes_vs_others = alpha_or_empty(matrix_of(groups, [](const JudgmentRecord& r) {
    return r.q2 == Q2Label::Yes ? "yes" : "other";
  }));
  s.alpha_coarse =
      alpha_or_empty(matrix_of(groups, [](const JudgmentRecord& r) { return to_string(r.q2); }));
  s.alpha_fine = s.alpha_coarse;
  return s;
}

std::vector<RerankExample> synth_negatives(const dcqa::DcqaQuestion& question, const Document& doc) {
  const int n = doc.size();
  if (n < 2) throw PreconditionError("negative synthesis needs at least 2 sentences");
  if (question.article_id != doc.article_id()) {
    throw PreconditionError("question belongs to article '" + question.article_id + "'");
  }
  std::vector<RerankExample> out;
  out.reserve(static_cast<std::size_t>(2 * (n - 1)));
  for (int s = 1; s <= n; ++s) {
    if (s != question.anchor_sentence_id) {
      out.push_back({question.question_text, s, question.answer_sentence_id, false});
    }
  }
  for (int s = 1; s <= n; ++s) {
    if (s != question.answer_sentence_id) {
      out.push_back({question.question_text, question.anchor_sentence_id, s, false});
    }
  }
  return out;
}

double rerank_percentile(const std::vector<RerankEvalInstance>& instances) {
  if (instances.empty()) throw PreconditionError("rerank percentile of no instances");
  double sum = 0.0;
  for (const auto& inst : instances) {
    if (inst.num_options < 2) throw PreconditionError("rerank instance needs at least 2 options");
    if (inst.gold_rank < 1 || inst.gold_rank > inst.num_options) {
      throw PreconditionError("gold rank " + std::to_string(inst.gold_rank) + " outside 1.." +
                              std::to_string(inst.num_options));
    }
    sum += static_cast<double>(inst.gold_rank - 1) / static_cast<double>(inst.num_options - 1);
  }
  return 100.0 * sum / static_cast<double>(instances.size());
}

AnchorAgreement anchor_agreement(const std::map<InstanceKey, int>& predicted,
                                 const std::vector<dcqa::DcqaQuestion>& gold) {
  AnchorAgreement out;
  for (const auto& q : gold) {
    ++out.instances;
    InstanceKey key{q.article_id, q.answer_sentence_id};
    auto it = predicted.find(key);
    if (it == predicted.end()) {
      out.missing_predictions.push_back(key);
      continue;
    }
    if (it->second == q.anchor_sentence_id) ++out.matches;
  }
  return out;
}

std::string q1_table(const std::vector<std::pair<std::string, Q1Aggregate>>& rows, bool pretty) {
  static constexpr std::array<const char*, kQ1LabelCount> kHeads{
      "Yes", "Minor error", "Hallu.(m)", "Ans.(m)", "Nonsense",
      "Irre.(a)", "Irre.(s)", "Hallu.(M)", "Ans.(M)"};
  std::string out = "# Q1: percentages of judge responses\n";
  char buf[64];
  if (pretty) {
    std::snprintf(buf, sizeof buf, "%-14s", "System");
    out += buf;
    for (const char* h : kHeads) {
      std::snprintf(buf, sizeof buf, " %11s", h);
      out += buf;
    }
    out += "\n";
    for (const auto& [system, agg] : rows) {
      std::snprintf(buf, sizeof buf, "%-14s", system.c_str());
      out += buf;
      for (double v : agg.fine) {
        std::snprintf(buf, sizeof buf, " %11.1f", v);
        out += buf;
      }
      out += "\n";
    }
    return out;
  }
  out += "system";
  for (const char* h : kHeads) out += std::string("\t") + h;
  out += "\tresponses\n";
  for (const auto& [system, agg] : rows) {
    out += system;
    for (double v : agg.fine) out += "\t" + pct1(v);
    out += "\t" + std::to_string(agg.responses) + "\n";
  }
  return out;
}

std::string q2_table(const std::vector<std::pair<std::string, Q2Aggregate>>& rows, bool pretty) {
  static constexpr std::array<const char*, kQ2LabelCount> kHeads{"Yes", "Not main point",
                                                                 "Sort of", "No"};
  std::string out = "# Q2: percentages of non-skipped responses on questions judged Yes/MinorError by every judge\n";
  char buf[64];
  if (pretty) {
    std::snprintf(buf, sizeof buf, "%-14s", "System");
    out += buf;
    for (const char* h : kHeads) {
      std::snprintf(buf, sizeof buf, " %14s", h);
      out += buf;
    }
    out += "\n";
    for (const auto& [system, agg] : rows) {
      std::snprintf(buf, sizeof buf, "%-14s", system.c_str());
      out += buf;
      for (double v : agg.pct) {
        std::snprintf(buf, sizeof buf, " %14.1f", v);
        out += buf;
      }
      out += "\n";
    }
    return out;
  }
  out += "system";
  for (const char* h : kHeads) out += std::string("\t") + h;
  out += "\tresponses\tskipped\n";
  for (const auto& [system, agg] : rows) {
    out += system;
    for (double v : agg.pct) out += "\t" + pct1(v);
    out += "\t" + std::to_string(agg.responses) + "\t" + std::to_string(agg.skipped) + "\n";
  }
  return out;
}

}  // namespace qud::eval
