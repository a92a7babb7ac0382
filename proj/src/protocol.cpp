#include "qud/protocol.hpp"

#include <cmath>

#include <json.hpp>

namespace qud::protocol {

using nlohmann::json;

BackendError::BackendError(Kind kind, std::string endpoint, std::string request_id,
                           const std::string& detail)
    : Error(std::string(to_string(kind)) + " on " + endpoint + " (request " + request_id +
            "): " + detail),
      kind_(kind),
      endpoint_(std::move(endpoint)),
      request_id_(std::move(request_id)) {}

const char* to_string(BackendError::Kind kind) {
  switch (kind) {
    case BackendError::Kind::Transport: return "transport failure";
    case BackendError::Kind::Timeout: return "timeout";
    case BackendError::Kind::HttpStatus: return "http error";
    case BackendError::Kind::MalformedBody: return "malformed body";
    case BackendError::Kind::InvariantViolation: return "invariant violation";
  }
  return "backend error";
}

namespace {

json span_to_json(const encoding::EntitySpan& s) {
  return {{"sentence_index", s.sentence_index},
          {"token_start", s.token_start},
          {"token_end", s.token_end},
          {"entity_type", s.entity_type}};
}

template <typename Message>
const char* endpoint_of();
template <> const char* endpoint_of<AnchorRequest>() { return kAnchorEndpoint; }
template <> const char* endpoint_of<AnchorResponse>() { return kAnchorEndpoint; }
template <> const char* endpoint_of<GenerateRequest>() { return kGenerateEndpoint; }
template <> const char* endpoint_of<GenerateResponse>() { return kGenerateEndpoint; }
template <> const char* endpoint_of<RerankRequest>() { return kRerankEndpoint; }
template <> const char* endpoint_of<RerankResponse>() { return kRerankEndpoint; }
template <> const char* endpoint_of<NerRequest>() { return kNerEndpoint; }
template <> const char* endpoint_of<NerResponse>() { return kNerEndpoint; }
template <> const char* endpoint_of<HealthResponse>() { return kHealthEndpoint; }

template <typename Message>
Message from_json(const json& j);

template <> AnchorRequest from_json(const json& j) {
  return {j.at("request_id").get<std::string>(), j.at("encoding").get<std::string>(),
          j.at("n").get<int>(), j.at("answer_index").get<int>()};
}
template <> AnchorResponse from_json(const json& j) {
  AnchorResponse r{j.at("request_id").get<std::string>(), j.at("anchor_index").get<int>(), {}};
  if (auto it = j.find("scores"); it != j.end() && !it->is_null()) {
    r.scores = it->get<std::vector<double>>();
  }
  return r;
}
template <> GenerateRequest from_json(const json& j) {
  return {j.at("request_id").get<std::string>(), j.at("prompt").get<std::string>(),
          j.at("num_samples").get<int>(), j.at("top_p").get<double>(),
          j.value("seed", std::uint64_t{0})};
}
template <> GenerateResponse from_json(const json& j) {
  return {j.at("request_id").get<std::string>(),
          j.at("questions").get<std::vector<std::string>>()};
}
template <> RerankRequest from_json(const json& j) {
  return {j.at("request_id").get<std::string>(), j.at("question").get<std::string>(),
          j.at("anchor_text").get<std::string>(), j.at("answer_text").get<std::string>()};
}
template <> RerankResponse from_json(const json& j) {
  return {j.at("request_id").get<std::string>(), j.at("score").get<double>()};
}
template <> NerRequest from_json(const json& j) {
  return {j.at("request_id").get<std::string>(), j.value("sentence_index", 0),
          j.at("tokens").get<std::vector<std::string>>()};
}
template <> NerResponse from_json(const json& j) {
  NerResponse r{j.at("request_id").get<std::string>(), {}};
  for (const auto& s : j.at("spans")) {
    r.spans.push_back({s.at("sentence_index").get<int>(), s.at("token_start").get<int>(),
                       s.at("token_end").get<int>(), s.at("entity_type").get<std::string>()});
  }
  return r;
}
template <> HealthResponse from_json(const json& j) {
  return {j.at("status").get<std::string>(),
          j.at("model_ids").get<std::map<std::string, std::string>>()};
}

[[noreturn]] void violation(const char* endpoint, const std::string& id, const std::string& what) {
  throw BackendError(BackendError::Kind::InvariantViolation, endpoint, id, what);
}

void check_id(const char* endpoint, const std::string& sent, const std::string& got) {
  if (sent != got) violation(endpoint, sent, "response request_id '" + got + "' does not match");
}

}  // namespace

std::string encode(const AnchorRequest& m) {
  return json{{"request_id", m.request_id}, {"encoding", m.encoding}, {"n", m.n},
              {"answer_index", m.answer_index}}
      .dump();
}
std::string encode(const AnchorResponse& m) {
  json j{{"request_id", m.request_id}, {"anchor_index", m.anchor_index}};
  if (m.scores) j["scores"] = *m.scores;
  return j.dump();
}
std::string encode(const GenerateRequest& m) {
  return json{{"request_id", m.request_id}, {"prompt", m.prompt}, {"num_samples", m.num_samples},
              {"top_p", m.top_p}, {"seed", m.seed}}
      .dump();
}
std::string encode(const GenerateResponse& m) {
  return json{{"request_id", m.request_id}, {"questions", m.questions}}.dump();
}
std::string encode(const RerankRequest& m) {
  return json{{"request_id", m.request_id}, {"question", m.question},
              {"anchor_text", m.anchor_text}, {"answer_text", m.answer_text}}
      .dump();
}
std::string encode(const RerankResponse& m) {
  return json{{"request_id", m.request_id}, {"score", m.score}}.dump();
}
std::string encode(const NerRequest& m) {
  return json{{"request_id", m.request_id}, {"sentence_index", m.sentence_index},
              {"tokens", m.tokens}}
      .dump();
}
std::string encode(const NerResponse& m) {
  json spans = json::array();
  for (const auto& s : m.spans) spans.push_back(span_to_json(s));
  return json{{"request_id", m.request_id}, {"spans", spans}}.dump();
}
std::string encode(const HealthResponse& m) {
  return json{{"status", m.status}, {"model_ids", m.model_ids}}.dump();
}

template <typename Message>
Message decode(const std::string& body) {
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw json::type_error::create(302, "body is not an object", &j);
    return from_json<Message>(j);
  } catch (const json::exception& e) {
    std::string id;
    try {
      id = json::parse(body).value("request_id", "");
    } catch (const json::exception&) {
    }
    throw BackendError(BackendError::Kind::MalformedBody, endpoint_of<Message>(), id, e.what());
  }
}

template AnchorRequest decode<AnchorRequest>(const std::string&);
template AnchorResponse decode<AnchorResponse>(const std::string&);
template GenerateRequest decode<GenerateRequest>(const std::string&);
template GenerateResponse decode<GenerateResponse>(const std::string&);
template RerankRequest decode<RerankRequest>(const std::string&);
template RerankResponse decode<RerankResponse>(const std::string&);
template NerRequest decode<NerRequest>(const std::string&);
template NerResponse decode<NerResponse>(const std::string&);
template HealthResponse decode<HealthResponse>(const std::string&);

void check(const AnchorRequest& req, const AnchorResponse& resp) {
  check_id(kAnchorEndpoint, req.request_id, resp.request_id);
  if (resp.anchor_index >= req.answer_index) {
    violation(kAnchorEndpoint, req.request_id,
              "anchor ≥ answer (" + std::to_string(resp.anchor_index) +
                  " ≥ " + std::to_string(req.answer_index) + ")");
  }
  if (resp.anchor_index < 1) {
    violation(kAnchorEndpoint, req.request_id,
              "anchor index " + std::to_string(resp.anchor_index) + " below 1");
  }
  if (resp.scores) {
    for (double s : *resp.scores) {
      if (!std::isfinite(s)) violation(kAnchorEndpoint, req.request_id, "non-finite score");
    }
  }
}

void check(const GenerateRequest& req, const GenerateResponse& resp) {
  check_id(kGenerateEndpoint, req.request_id, resp.request_id);
  if (static_cast<int>(resp.questions.size()) > req.num_samples) {
    violation(kGenerateEndpoint, req.request_id,
              std::to_string(resp.questions.size()) + " questions for num_samples=" +
                  std::to_string(req.num_samples));
  }
  if (resp.questions.empty()) violation(kGenerateEndpoint, req.request_id, "no questions returned");
  for (const auto& q : resp.questions) {
    if (normalize_text(q).empty()) violation(kGenerateEndpoint, req.request_id, "empty question");
  }
}

void check(const RerankRequest& req, const RerankResponse& resp) {
  check_id(kRerankEndpoint, req.request_id, resp.request_id);
  if (!(resp.score >= 0.0 && resp.score <= 1.0)) {
    violation(kRerankEndpoint, req.request_id,
              "score " + json(resp.score).dump() + " outside [0,1]");
  }
}

void check(const NerRequest& req, const NerResponse& resp) {
  check_id(kNerEndpoint, req.request_id, resp.request_id);
  Sentence s{req.sentence_index, {}, req.tokens};
  try {
    encoding::check_spans(s, resp.spans);
  } catch (const PreconditionError& e) {
    violation(kNerEndpoint, req.request_id, e.what());
  }
}

void check_request(const GenerateRequest& req) {
  if (req.num_samples < 1) throw PreconditionError("num_samples must be >= 1");
  if (!(req.top_p > 0.0 && req.top_p <= 1.0)) throw PreconditionError("top_p must be in (0,1]");
}

}  // namespace qud::protocol
