#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qud/backend.hpp"
#include "qud/document.hpp"
#include "qud/encoding.hpp"
#include "qud/qud_tree.hpp"

namespace qud::pipeline {

enum class FailPolicy { Fast, Skip };

struct ParseConfig {
  int num_samples = protocol::kDefaultNumSamples;
  double top_p = protocol::kDefaultTopP;
  bool mask_entities = true;
  bool rerank = true;
  std::uint64_t seed = 0;
  FailPolicy fail_policy = FailPolicy::Fast;
  int parallelism = 1;  // concurrent sentences
  std::string variant = "Full";

  /// Throws ConfigError unless num_samples >= 1, 0 < top_p <= 1, parallelism >= 1.
  void validate() const;
};

/// Named system variants. Ablations nest: "-NER" also drops reranking.
/// Accepts "Full", "-Reranking", "-NER" and the aliases "full", "no-rerank",
/// "no-rerank-no-mask". Sampling settings and seed are kept from `base`.
ParseConfig variant_config(std::string_view name, const ParseConfig& base = {});

std::vector<std::string> variant_names();

struct Candidate {
  std::string question;
  std::optional<double> score;  // present when reranking ran
};

struct SentenceTrace {
  int answer = 0;
  int anchor = 0;
  std::string masked_answer;
  std::vector<encoding::EntitySpan> spans;
  std::vector<Candidate> candidates;
  int winner = -1;
  double elapsed_ms = 0.0;
  std::optional<std::string> error;
};

struct ParseTrace {
  std::string article_id;
  std::string variant;
  std::vector<SentenceTrace> sentences;  // ordered by answer index
  std::vector<std::string> notes;
  bool partial = false;
};

struct ParseResult {
  QudTree tree;
  ParseTrace trace;
};

/// Index of the first maximal score. Requires a non-empty list.
int select_winner(const std::vector<double>& scores);

/// Seed for sentence `answer`'s generation request; depends only on the
/// config seed and the index.
std::uint64_t sentence_seed(std::uint64_t seed, int answer);

/// Runs anchor prediction, optional masking, sampling and optional reranking
/// for one answer sentence. Backend errors propagate.
SentenceTrace parse_sentence(const Document& doc, Backend& backend, const ParseConfig& config,
                             int answer);

/// Greedy parse: each sentence 2..n independently. Under FailPolicy::Fast the
/// first failing sentence (lowest index) aborts the parse with its error;
/// under Skip the entry is left out and the tree is flagged partial.
ParseResult parse(const Document& doc, Backend& backend, const ParseConfig& config);

/// Trace as a JSON document. Timings are omitted unless requested so the
/// output stays byte-stable across runs.
std::string trace_to_json(const ParseTrace& trace, bool include_timing = false);

}  // namespace qud::pipeline
