#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "qud/backend.hpp"

namespace qud {

using namespace protocol;

HttpBackend::HttpBackend(std::string base_url, HttpBackendOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw ConfigError("backend url is empty");
}

std::string HttpBackend::next_id() {
  return "req-" + std::to_string(counter_.fetch_add(1) + 1);
}

std::string HttpBackend::post(const char* endpoint, const std::string& request_id,
                              const std::string& body) {
  using Kind = BackendError::Kind;
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
  for (int attempt = 0;; ++attempt) {
    httplib::Client client(base_url_);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    const auto started = std::chrono::steady_clock::now();
    auto result = client.Post(endpoint, body, "application/json");
    if (result) {
      if (result->status != 200) {
        throw BackendError(Kind::HttpStatus, endpoint, request_id,
                           "status " + std::to_string(result->status) + ": " + result->body);
      }
      return result->body;
    }
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const auto err = result.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed >= options_.timeout);
    if (attempt >= options_.retries) {
      throw BackendError(timed_out ? Kind::Timeout : Kind::Transport, endpoint, request_id,
                         httplib::to_string(err));
    }
  }
}

AnchorResponse HttpBackend::anchor(const AnchorRequest& req) {
  AnchorRequest sent = req;
  if (sent.request_id.empty()) sent.request_id = next_id();
  auto resp = decode<AnchorResponse>(post(kAnchorEndpoint, sent.request_id, encode(sent)));
  check(sent, resp);
  return resp;
}

GenerateResponse HttpBackend::generate(const GenerateRequest& req) {
  GenerateRequest sent = req;
  if (sent.request_id.empty()) sent.request_id = next_id();
  auto resp = decode<GenerateResponse>(post(kGenerateEndpoint, sent.request_id, encode(sent)));
  check(sent, resp);
  return resp;
}

RerankResponse HttpBackend::rerank(const RerankRequest& req) {
  RerankRequest sent = req;
  if (sent.request_id.empty()) sent.request_id = next_id();
  auto resp = decode<RerankResponse>(post(kRerankEndpoint, sent.request_id, encode(sent)));
  check(sent, resp);
  return resp;
}

NerResponse HttpBackend::ner(const NerRequest& req) {
  NerRequest sent = req;
  if (sent.request_id.empty()) sent.request_id = next_id();
  auto resp = decode<NerResponse>(post(kNerEndpoint, sent.request_id, encode(sent)));
  check(sent, resp);
  return resp;
}

HealthResponse HttpBackend::health() {
  using Kind = BackendError::Kind;
  httplib::Client client(base_url_);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  client.set_connection_timeout(seconds.count(), 0);
  client.set_read_timeout(seconds.count(), 0);
  auto result = client.Get(kHealthEndpoint);
  if (!result) throw BackendError(Kind::Transport, kHealthEndpoint, "", httplib::to_string(result.error()));
  if (result->status != 200) {
    throw BackendError(Kind::HttpStatus, kHealthEndpoint, "", "status " + std::to_string(result->status));
  }
  return decode<HealthResponse>(result->body);
}

struct BackendServer::Impl {
  Backend& backend;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Backend& b) : backend(b) {}
};

namespace {

template <typename Request, typename Fn>
void route(httplib::Server& server, const char* endpoint, Fn handler) {
  server.Post(endpoint, [handler](const httplib::Request& http_req, httplib::Response& res) {
    try {
      auto req = decode<Request>(http_req.body);
      res.set_content(encode(handler(req)), "application/json");
    } catch (const BackendError& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    } catch (const PreconditionError& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  });
}

}  // namespace

BackendServer::BackendServer(Backend& backend) : impl_(std::make_unique<Impl>(backend)) {
  auto& b = impl_->backend;
  auto& s = impl_->server;
  route<AnchorRequest>(s, kAnchorEndpoint, [&b](const AnchorRequest& r) {
    if (r.answer_index < 2 || r.answer_index > r.n) {
      throw PreconditionError("answer_index must be in 2..n");
    }
    return b.anchor(r);
  });
  route<GenerateRequest>(s, kGenerateEndpoint, [&b](const GenerateRequest& r) {
    check_request(r);
    return b.generate(r);
  });
  route<RerankRequest>(s, kRerankEndpoint, [&b](const RerankRequest& r) { return b.rerank(r); });
  route<NerRequest>(s, kNerEndpoint, [&b](const NerRequest& r) { return b.ner(r); });
  s.Get(kHealthEndpoint, [&b](const httplib::Request&, httplib::Response& res) {
    res.set_content(encode(b.health()), "application/json");
  });
}

BackendServer::~BackendServer() { stop(); }

int BackendServer::start(const std::string& host, int port) {
  auto& s = impl_->server;
  int bound = port == 0 ? s.bind_to_any_port(host) : (s.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([&s] { s.listen_after_bind(); });
  s.wait_until_ready();
  return bound;
}

bool BackendServer::listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

void BackendServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace qud
