#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qud/encoding.hpp"
#include "qud/error.hpp"

namespace qud::protocol {

inline constexpr const char* kAnchorEndpoint = "/anchor";
inline constexpr const char* kGenerateEndpoint = "/generate";
inline constexpr const char* kRerankEndpoint = "/rerank";
inline constexpr const char* kNerEndpoint = "/ner";
inline constexpr const char* kHealthEndpoint = "/health";

inline constexpr int kDefaultNumSamples = 10;
inline constexpr double kDefaultTopP = 0.9;

struct AnchorRequest {
  std::string request_id;
  std::string encoding;  // AnchorQueryEncoding::text
  int n = 0;
  int answer_index = 0;

  bool operator==(const AnchorRequest&) const = default;
};

struct AnchorResponse {
  std::string request_id;
  int anchor_index = 0;
  std::optional<std::vector<double>> scores;  // per sentence, when the backend exposes them

  bool operator==(const AnchorResponse&) const = default;
};

struct GenerateRequest {
  std::string request_id;
  std::string prompt;  // GenerationPrompt::render()
  int num_samples = kDefaultNumSamples;
  double top_p = kDefaultTopP;
  std::uint64_t seed = 0;

  bool operator==(const GenerateRequest&) const = default;
};

struct GenerateResponse {
  std::string request_id;
  std::vector<std::string> questions;

  bool operator==(const GenerateResponse&) const = default;
};

struct RerankRequest {
  std::string request_id;
  std::string question;
  std::string anchor_text;
  std::string answer_text;

  bool operator==(const RerankRequest&) const = default;
};

struct RerankResponse {
  std::string request_id;
  double score = 0.0;  // positive-class posterior

  bool operator==(const RerankResponse&) const = default;
};

struct NerRequest {
  std::string request_id;
  int sentence_index = 0;
  std::vector<std::string> tokens;

  bool operator==(const NerRequest&) const = default;
};

struct NerResponse {
  std::string request_id;
  std::vector<encoding::EntitySpan> spans;

  bool operator==(const NerResponse&) const = default;
};

struct HealthResponse {
  std::string status;
  std::map<std::string, std::string> model_ids;

  bool operator==(const HealthResponse&) const = default;
};

/// Failure talking to a backend. Carries the endpoint and request id.
class BackendError : public Error {
 public:
  enum class Kind { Transport, Timeout, HttpStatus, MalformedBody, InvariantViolation };

  BackendError(Kind kind, std::string endpoint, std::string request_id, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  const std::string& endpoint() const noexcept { return endpoint_; }
  const std::string& request_id() const noexcept { return request_id_; }

 private:
  Kind kind_;
  std::string endpoint_;
  std::string request_id_;
};

const char* to_string(BackendError::Kind kind);

// Wire codec. Bodies are JSON objects; decode throws BackendError
// (MalformedBody) with the given endpoint on any schema mismatch.
std::string encode(const AnchorRequest& m);
std::string encode(const AnchorResponse& m);
std::string encode(const GenerateRequest& m);
std::string encode(const GenerateResponse& m);
std::string encode(const RerankRequest& m);
std::string encode(const RerankResponse& m);
std::string encode(const NerRequest& m);
std::string encode(const NerResponse& m);
std::string encode(const HealthResponse& m);

template <typename Message>
Message decode(const std::string& body);

// Response invariants against the request that produced them. Throw
// BackendError (InvariantViolation).
void check(const AnchorRequest& req, const AnchorResponse& resp);
void check(const GenerateRequest& req, const GenerateResponse& resp);
void check(const RerankRequest& req, const RerankResponse& resp);
void check(const NerRequest& req, const NerResponse& resp);

/// Request-side validation, used by servers before dispatch.
void check_request(const GenerateRequest& req);

}  // namespace qud::protocol
