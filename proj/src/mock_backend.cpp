#include "qud/backend.hpp"

#include "qud/document.hpp"

namespace qud {

using namespace protocol;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double MockBackend::score_of(std::uint64_t seed, const std::string& question) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : question) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t mixed = splitmix64(h ^ splitmix64(seed));
  return static_cast<double>(mixed >> 11) * 0x1.0p-53;
}

AnchorResponse MockBackend::anchor(const AnchorRequest& req) {
  return {req.request_id, req.answer_index - 1, std::nullopt};
}

GenerateResponse MockBackend::generate(const GenerateRequest& req) {
  std::string head;
  if (auto anchor = encoding::anchor_part_of(req.prompt)) {
    auto tokens = split_tokens(*anchor);
    for (std::size_t k = 0; k < tokens.size() && k < 5; ++k) {
      if (k) head += ' ';
      head += tokens[k];
    }
  }
  if (head.empty()) head = "this";
  GenerateResponse resp{req.request_id, {}};
  for (int k = 1; k <= req.num_samples; ++k) {
    resp.questions.push_back("What happened after " + head + "? (" + std::to_string(k) + ")");
  }
  return resp;
}

RerankResponse MockBackend::rerank(const RerankRequest& req) {
  return {req.request_id, score_of(seed_, req.question)};
}

NerResponse MockBackend::ner(const NerRequest& req) { return {req.request_id, {}}; }

HealthResponse MockBackend::health() {
  return {"ok",
          {{"anchor", "mock-anchor"},
           {"generator", "mock-generator"},
           {"reranker", "mock-reranker"},
           {"ner", "mock-ner"}}};
}

}  // namespace qud
