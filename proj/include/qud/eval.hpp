#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qud/dcqa.hpp"
#include "qud/document.hpp"

namespace qud::eval {

// ---------------------------------------------------------------------------
// Judgment schema

/// Leaf categories of the first judgment question (is the question reasonable
/// given the context up to the anchor?).
enum class Q1Label {
  Yes,
  MinorError,
  HalluMinor,          // sort of: minor hallucination
  AnsMinor,            // sort of: partially answered by the anchor
  Nonsense,            // no
  IrrelevantAnchor,    // no: unrelated to the anchor sentence
  IrrelevantSentence,  // no
  HalluMajor,          // no
  AnsMajor,            // no
};
inline constexpr std::size_t kQ1LabelCount = 9;

enum class Q1Group { Yes, MinorError, SortOf, No };
inline constexpr std::size_t kQ1GroupCount = 4;

/// Second judgment question (is the question answered by the answer sentence?).
enum class Q2Label { Yes, NotMainPoint, SortOf, No, Skipped };
inline constexpr std::size_t kQ2LabelCount = 4;  // Skipped is not a reportable category

Q1Group group_of(Q1Label label);
std::string_view to_string(Q1Label label);
std::string_view to_string(Q1Group group);
std::string_view to_string(Q2Label label);
/// Accepts the canonical names (e.g. "HalluMinor") and the grouped forms
/// "SortOf/HalluMinor", "No/Nonsense". Throws InputError.
Q1Label parse_q1(std::string_view s);
Q2Label parse_q2(std::string_view s);

struct JudgmentRecord {
  std::string question_id;
  std::string judge_id;
  Q1Label q1 = Q1Label::Yes;
  Q2Label q2 = Q2Label::Skipped;
  std::string system = "Full";
};

/// One JSON object per line: {"question_id", "judge_id", "q1_fine_label",
/// "q2_label", "system"?}. Throws InputError naming the line.
std::vector<JudgmentRecord> parse_judgments(const std::string& content,
                                            const std::string& source_name);
std::vector<JudgmentRecord> load_judgments(const std::filesystem::path& path);
std::string serialize_judgments(const std::vector<JudgmentRecord>& records);

// ---------------------------------------------------------------------------
// Aggregation (percentages over judge responses)

struct Q1Aggregate {
  std::size_t responses = 0;
  std::array<double, kQ1LabelCount> fine{};
  std::array<double, kQ1GroupCount> coarse{};
};

struct Q2Aggregate {
  std::size_t responses = 0;  // excluding skipped
  std::size_t skipped = 0;
  std::array<double, kQ2LabelCount> pct{};
};

/// Throws PreconditionError on an empty record set.
Q1Aggregate aggregate_q1(const std::vector<JudgmentRecord>& records);

/// Question ids whose every judge gave Yes or MinorError on Q1, in first-seen
/// order. Throws PreconditionError listing questions whose judge count
/// differs from the most common count.
std::vector<std::string> q2_subset(const std::vector<JudgmentRecord>& records);

std::vector<JudgmentRecord> restrict_to(const std::vector<JudgmentRecord>& records,
                                        const std::vector<std::string>& question_ids);

/// Skipped responses leave the denominator; throws PreconditionError
/// ("empty denominator") when nothing remains.
Q2Aggregate aggregate_q2(const std::vector<JudgmentRecord>& records);

/// Record subsets per system, in first-appearance order.
std::vector<std::pair<std::string, std::vector<JudgmentRecord>>> by_system(
    const std::vector<JudgmentRecord>& records);

// ---------------------------------------------------------------------------
// Krippendorff's alpha

using LabelSet = std::set<std::string>;
/// Rows are items, columns judges; an empty optional is a missing value.
using RatingMatrix = std::vector<std::vector<std::optional<LabelSet>>>;

enum class Distance { Nominal, Masi };

/// 1 - J(A,B) * M(A,B) with J the Jaccard index and M = 1 (equal), 2/3
/// (subset), 1/3 (other overlap), 0 (disjoint).
double masi_distance(const LabelSet& a, const LabelSet& b);

/// alpha = 1 - D_o / D_e, built from the coincidence matrix of pairable
/// values (items with at least two values). Returns 1.0 when there is no
/// observed disagreement. Throws PreconditionError when fewer than two items
/// or no pairable values exist, or when nominal distance meets a multi-label cell.
double krippendorff_alpha(const RatingMatrix& matrix, Distance distance);

/// Convenience for single-label data.
RatingMatrix single_label_matrix(const std::vector<std::vector<std::optional<std::string>>>& rows);

// ---------------------------------------------------------------------------
// Agreement summary

struct AgreementSummary {
  std::size_t questions = 0;
  double all_agree_pct = 0.0;  // unanimous fine label
  double majority_pct = 0.0;   // more than half the judges share a fine label
  std::optional<double> alpha_yes_vs_others;
  std::optional<double> alpha_coarse;
  std::optional<double> alpha_fine;
};

/// Q1 agreement over fine labels; alpha at yes-vs-others, the four groups,
/// and all nine leaves. Requires a fixed judge count per question. An alpha
/// is empty when it is undefined for the data (a single item).
AgreementSummary q1_agreement(const std::vector<JudgmentRecord>& records);

/// Q2 agreement over questions where no judge skipped; alpha_fine equals the
/// four-category alpha.
AgreementSummary q2_agreement(const std::vector<JudgmentRecord>& records);

// ---------------------------------------------------------------------------
// Reranker training and evaluation

struct RerankExample {
  std::string question;
  int anchor = 0;
  int answer = 0;
  bool positive = false;
};

/// Negatives for one annotated question: the anchor swapped with every other
/// sentence, then the answer swapped with every other sentence. No filtering,
/// so the result always has 2(n-1) entries. Throws PreconditionError for n < 2.
std::vector<RerankExample> synth_negatives(const dcqa::DcqaQuestion& question, const Document& doc);

struct RerankEvalInstance {
  int gold_rank = 1;  // 1-based
  int num_options = 2;
};

/// Mean of (gold_rank - 1) / (num_options - 1), as a percentage (0 = always
/// ranked first). Throws PreconditionError on empty input or bad instances.
double rerank_percentile(const std::vector<RerankEvalInstance>& instances);

// ---------------------------------------------------------------------------
// Anchor agreement

using InstanceKey = std::pair<std::string, int>;  // (article_id, answer sentence)

struct AnchorAgreement {
  std::size_t instances = 0;
  std::size_t matches = 0;
  std::vector<InstanceKey> missing_predictions;

  double rate() const { return instances == 0 ? 0.0 : static_cast<double>(matches) / instances; }
};

/// Each gold annotation is its own instance; a missing prediction counts as a
/// mismatch and is listed.
AnchorAgreement anchor_agreement(const std::map<InstanceKey, int>& predicted,
                                 const std::vector<dcqa::DcqaQuestion>& gold);

// ---------------------------------------------------------------------------
// Reports

/// First-judgment rows (one per system) as tab-separated values, one decimal.
std::string q1_table(const std::vector<std::pair<std::string, Q1Aggregate>>& rows, bool pretty);
/// Second-judgment rows.
std::string q2_table(const std::vector<std::pair<std::string, Q2Aggregate>>& rows, bool pretty);

}  // namespace qud::eval
