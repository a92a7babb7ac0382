#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "qud/protocol.hpp"

namespace qud {

/// The four model endpoints plus health. Implementations must be reentrant:
/// the parser may call them from several threads at once.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual protocol::AnchorResponse anchor(const protocol::AnchorRequest& req) = 0;
  virtual protocol::GenerateResponse generate(const protocol::GenerateRequest& req) = 0;
  virtual protocol::RerankResponse rerank(const protocol::RerankRequest& req) = 0;
  virtual protocol::NerResponse ner(const protocol::NerRequest& req) = 0;
  virtual protocol::HealthResponse health() = 0;
};

/// Deterministic stand-in for the model server.
///
/// anchor = answer_index - 1; questions are templated from the first five
/// anchor tokens plus a 1-based sample suffix; the rerank score is a seeded
/// hash of the question in [0,1); NER finds nothing. Output depends only on
/// (seed, request).
class MockBackend : public Backend {
 public:
  explicit MockBackend(std::uint64_t seed) : seed_(seed) {}

  protocol::AnchorResponse anchor(const protocol::AnchorRequest& req) override;
  protocol::GenerateResponse generate(const protocol::GenerateRequest& req) override;
  protocol::RerankResponse rerank(const protocol::RerankRequest& req) override;
  protocol::NerResponse ner(const protocol::NerRequest& req) override;
  protocol::HealthResponse health() override;

  std::uint64_t seed() const noexcept { return seed_; }

  /// The score rerank() reports for `question`.
  static double score_of(std::uint64_t seed, const std::string& question);

 private:
  std::uint64_t seed_;
};

struct HttpBackendOptions {
  std::chrono::milliseconds timeout{60'000};
  int retries = 0;  // extra attempts after a transport failure or timeout
};

/// HTTP client for a remote backend. Every response is decoded and checked
/// against its request before it is returned.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(std::string base_url, HttpBackendOptions options = {});

  protocol::AnchorResponse anchor(const protocol::AnchorRequest& req) override;
  protocol::GenerateResponse generate(const protocol::GenerateRequest& req) override;
  protocol::RerankResponse rerank(const protocol::RerankRequest& req) override;
  protocol::NerResponse ner(const protocol::NerRequest& req) override;
  protocol::HealthResponse health() override;

  const std::string& base_url() const noexcept { return base_url_; }

 private:
  std::string post(const char* endpoint, const std::string& request_id, const std::string& body);
  std::string next_id();

  std::string base_url_;
  HttpBackendOptions options_;
  std::atomic<std::uint64_t> counter_{0};
};

/// Serves a Backend over HTTP with the wire contract's endpoints.
class BackendServer {
 public:
  explicit BackendServer(Backend& backend);
  ~BackendServer();
  BackendServer(const BackendServer&) = delete;
  BackendServer& operator=(const BackendServer&) = delete;

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  bool listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qud
