#include "qud/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace qud::pipeline {

using namespace protocol;

void ParseConfig::validate() const {
  if (num_samples < 1) throw ConfigError("num_samples must be >= 1");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0,1]");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
}

ParseConfig variant_config(std::string_view name, const ParseConfig& base) {
  ParseConfig config = base;
  if (name == "Full" || name == "full") {
    config.variant = "Full";
    config.rerank = true;
    config.mask_entities = true;
  } else if (name == "-Reranking" || name == "no-rerank") {
    config.variant = "-Reranking";
    config.rerank = false;
    config.mask_entities = true;
  } else if (name == "-NER" || name == "no-rerank-no-mask") {
    config.variant = "-NER";
    config.rerank = false;
    config.mask_entities = false;
  } else {
    throw ConfigError("unknown variant '" + std::string(name) + "' (expected one of Full, -Reranking, -NER)");
  }
  return config;
}

std::vector<std::string> variant_names() { return {"Full", "-Reranking", "-NER"}; }

int select_winner(const std::vector<double>& scores) {
  if (scores.empty()) throw PreconditionError("no candidates to select from");
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::uint64_t sentence_seed(std::uint64_t seed, int answer) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(answer));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SentenceTrace parse_sentence(const Document& doc, Backend& backend, const ParseConfig& config,
                             int answer) {
  const auto started = std::chrono::steady_clock::now();
  const std::string id = doc.article_id() + "/" + std::to_string(answer);
  SentenceTrace trace;
  trace.answer = answer;

  AnchorRequest anchor_req{id + "/anchor", encoding::encode_anchor_query(doc, answer).text,
                           doc.size(), answer};
  auto anchor_resp = backend.anchor(anchor_req);
  check(anchor_req, anchor_resp);
  trace.anchor = anchor_resp.anchor_index;

  const Sentence& answer_sentence = doc.sentence(answer);
  if (config.mask_entities) {
    NerRequest ner_req{id + "/ner", answer, answer_sentence.tokens};
    auto ner_resp = backend.ner(ner_req);
    check(ner_req, ner_resp);
    trace.spans = std::move(ner_resp.spans);
  }
  auto prompt = encoding::encode_generation_prompt(doc, answer, trace.anchor, trace.spans);
  trace.masked_answer = prompt.answer_part;

  GenerateRequest gen_req{id + "/generate", prompt.render(), config.num_samples, config.top_p,
                          sentence_seed(config.seed, answer)};
  auto gen_resp = backend.generate(gen_req);
  check(gen_req, gen_resp);

  for (auto& q : gen_resp.questions) trace.candidates.push_back({std::move(q), std::nullopt});
  if (config.rerank) {
    std::vector<double> scores;
    const std::string& anchor_text = doc.sentence(trace.anchor).text;
    for (std::size_t k = 0; k < trace.candidates.size(); ++k) {
      RerankRequest rr{id + "/rerank/" + std::to_string(k), trace.candidates[k].question,
                       anchor_text, answer_sentence.text};
      auto resp = backend.rerank(rr);
      check(rr, resp);
      trace.candidates[k].score = resp.score;
      scores.push_back(resp.score);
    }
    trace.winner = select_winner(scores);
  } else {
    trace.winner = 0;
  }
  trace.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - started)
                         .count();
  return trace;
}

ParseResult parse(const Document& doc, Backend& backend, const ParseConfig& config) {
  config.validate();
  ParseResult result;
  result.tree.article_id = doc.article_id();
  result.tree.n = doc.size();
  result.trace.article_id = doc.article_id();
  result.trace.variant = config.variant;
  if (doc.size() == 1) {
    result.trace.notes.push_back("single-sentence document: root only");
    return result;
  }

  const int count = doc.size() - 1;
  std::vector<SentenceTrace> traces(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  std::atomic<bool> abort{false};

  auto work = [&] {
    for (;;) {
      if (abort.load()) return;
      int k = next.fetch_add(1);
      if (k >= count) return;
      const int answer = k + 2;
      try {
        traces[static_cast<std::size_t>(k)] = parse_sentence(doc, backend, config, answer);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
        if (config.fail_policy == FailPolicy::Fast) abort.store(true);
      }
    }
  };
  const int threads = std::min(config.parallelism, count);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  for (int k = 0; k < count; ++k) {
    auto& err = errors[static_cast<std::size_t>(k)];
    if (!err) continue;
    if (config.fail_policy == FailPolicy::Fast) std::rethrow_exception(err);
    auto& t = traces[static_cast<std::size_t>(k)];
    t = SentenceTrace{};
    t.answer = k + 2;
    try {
      std::rethrow_exception(err);
    } catch (const std::exception& e) {
      t.error = e.what();
    }
    result.trace.partial = true;
  }

  for (auto& t : traces) {
    if (!t.error) {
      result.tree.entries.push_back(
          {t.answer, t.anchor, t.candidates[static_cast<std::size_t>(t.winner)].question});
    }
  }
  if (result.trace.partial) {
    result.trace.notes.push_back("partial tree: failed sentences left without an entry");
  }
  result.trace.sentences = std::move(traces);
  return result;
}

std::string trace_to_json(const ParseTrace& trace, bool include_timing) {
  using nlohmann::ordered_json;
  ordered_json sentences = ordered_json::array();
  for (const auto& s : trace.sentences) {
    ordered_json j;
    j["answer"] = s.answer;
    if (s.error) {
      j["error"] = *s.error;
      sentences.push_back(std::move(j));
      continue;
    }
    j["anchor"] = s.anchor;
    j["masked_answer"] = s.masked_answer;
    ordered_json spans = ordered_json::array();
    for (const auto& sp : s.spans) {
      spans.push_back({{"token_start", sp.token_start},
                       {"token_end", sp.token_end},
                       {"entity_type", sp.entity_type}});
    }
    j["spans"] = spans;
    ordered_json cands = ordered_json::array();
    for (const auto& c : s.candidates) {
      ordered_json cj{{"question", c.question}};
      if (c.score) cj["score"] = *c.score;
      cands.push_back(std::move(cj));
    }
    j["candidates"] = cands;
    j["winner"] = s.winner;
    if (include_timing) j["elapsed_ms"] = s.elapsed_ms;
    sentences.push_back(std::move(j));
  }
  ordered_json out;
  out["article_id"] = trace.article_id;
  out["variant"] = trace.variant;
  out["partial"] = trace.partial;
  out["notes"] = trace.notes;
  out["sentences"] = sentences;
  return out.dump(2);
}

}  // namespace qud::pipeline
