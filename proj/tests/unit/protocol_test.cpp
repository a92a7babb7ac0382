#include <gtest/gtest.h>

#include <atomic>
#include <future>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "qud/backend.hpp"
#include "qud/protocol.hpp"

namespace qud::protocol {
namespace {

using Kind = BackendError::Kind;

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {"a", "Zürich", "\"quoted\"", "tab\t", "line\nbreak",
                                                  "[SEP]", "emoji \xF0\x9F\x98\x80", "\\", ""};
  std::string s;
  const int k = static_cast<int>(rng() % 4);
  for (int i = 0; i < k; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

double random_unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

template <typename M>
void expect_round_trip(const M& m) {
  EXPECT_EQ(decode<M>(encode(m)), m);
}

TEST(WireCodec, RoundTripsRandomMessages) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string id = "id-" + random_text(rng);
    expect_round_trip(AnchorRequest{id, random_text(rng), 1 + static_cast<int>(rng() % 50), 2});
    AnchorResponse ar{id, static_cast<int>(rng() % 20), std::nullopt};
    if (rng() % 2) ar.scores = std::vector<double>{random_unit(rng), random_unit(rng), 1e-300, 0.1};
    expect_round_trip(ar);
    expect_round_trip(GenerateRequest{id, random_text(rng), 1 + static_cast<int>(rng() % 20), random_unit(rng), rng()});
    GenerateResponse gr{id, {}};
    for (int k = 0; k < 1 + static_cast<int>(rng() % 5); ++k) gr.questions.push_back(random_text(rng));
    expect_round_trip(gr);
    expect_round_trip(RerankRequest{id, random_text(rng), random_text(rng), random_text(rng)});
    expect_round_trip(RerankResponse{id, random_unit(rng)});
    expect_round_trip(NerRequest{id, 3, {"Hurricane", "Hugo", random_text(rng)}});
    expect_round_trip(NerResponse{id, {{3, 0, 1, "MISC"}, {3, 2, 2, "LOC"}}});
    expect_round_trip(HealthResponse{"ok", {{"anchor", random_text(rng)}}});
  }
}

TEST(WireCodec, ScoresSurviveExactly) {
  for (double v : {0.1, 1.0 / 3.0, 0.9999999999999999, 5e-324, 0.0, 1.0}) {
    EXPECT_EQ(decode<RerankResponse>(encode(RerankResponse{"r", v})).score, v);
  }
}

TEST(WireCodec, MalformedBodies) {
  for (const char* body : {"", "not json", "[]", "{}", R"({"request_id":"r","score":"high"})",
                           R"({"request_id":5,"score":0.5})"}) {
    try {
      decode<RerankResponse>(body);
      ADD_FAILURE() << body;
    } catch (const BackendError& e) {
      EXPECT_EQ(e.kind(), Kind::MalformedBody) << body;
    }
  }
  EXPECT_THROW(decode<GenerateResponse>(R"({"request_id":"r","questions":[1,2]})"), BackendError);
  EXPECT_THROW(decode<AnchorResponse>(R"({"request_id":"r"})"), BackendError);
}

TEST(WireCodec, FieldNames) {
  auto j = nlohmann::json::parse(encode(GenerateRequest{"g1", "p", 10, 0.9, 7}));
  EXPECT_EQ(j.at("request_id"), "g1");
  EXPECT_EQ(j.at("prompt"), "p");
  EXPECT_EQ(j.at("num_samples"), 10);
  EXPECT_DOUBLE_EQ(j.at("top_p").get<double>(), 0.9);
  auto a = nlohmann::json::parse(encode(AnchorRequest{"a1", "enc", 5, 3}));
  EXPECT_TRUE(a.contains("encoding") && a.contains("n") && a.contains("answer_index"));
}

TEST(ResponseChecks, AnchorMustPrecedeAnswer) {
  AnchorRequest req{"a", "enc", 8, 5};
  EXPECT_NO_THROW(check(req, AnchorResponse{"a", 4, std::nullopt}));
  EXPECT_NO_THROW(check(req, AnchorResponse{"a", 1, std::nullopt}));
  try {
    check(req, AnchorResponse{"a", 7, std::nullopt});
    ADD_FAILURE();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), Kind::InvariantViolation);
    EXPECT_NE(std::string(e.what()).find("anchor"), std::string::npos);
    EXPECT_EQ(e.request_id(), "a");
  }
  EXPECT_THROW(check(req, AnchorResponse{"a", 5, std::nullopt}), BackendError);
  EXPECT_THROW(check(req, AnchorResponse{"a", 0, std::nullopt}), BackendError);
  EXPECT_THROW(check(req, AnchorResponse{"other", 4, std::nullopt}), BackendError);
}

TEST(ResponseChecks, GenerateSampleCount) {
  GenerateRequest req{"g", "p", 10, 0.9, 0};
  EXPECT_NO_THROW(check(req, GenerateResponse{"g", std::vector<std::string>(10, "Why?")}));
  EXPECT_NO_THROW(check(req, GenerateResponse{"g", std::vector<std::string>(3, "Why?")}));
  EXPECT_THROW(check(req, GenerateResponse{"g", std::vector<std::string>(11, "Why?")}), BackendError);
  EXPECT_THROW(check(req, GenerateResponse{"g", {}}), BackendError);
}

TEST(ResponseChecks, RerankScoreRange) {
  RerankRequest req{"r", "q", "a", "b"};
  EXPECT_NO_THROW(check(req, RerankResponse{"r", 0.0}));
  EXPECT_NO_THROW(check(req, RerankResponse{"r", 1.0}));
  EXPECT_THROW(check(req, RerankResponse{"r", 1.3}), BackendError);
  EXPECT_THROW(check(req, RerankResponse{"r", -0.01}), BackendError);
}

TEST(ResponseChecks, NerSpans) {
  NerRequest req{"n", 2, {"Hurricane", "Hugo", "hit"}};
  EXPECT_NO_THROW(check(req, NerResponse{"n", {{2, 0, 1, "MISC"}}}));
  EXPECT_THROW(check(req, NerResponse{"n", {{2, 0, 3, "MISC"}}}), BackendError);
  EXPECT_THROW(check(req, NerResponse{"n", {{2, 0, 1, "MISC"}, {2, 1, 2, "LOC"}}}), BackendError);
  EXPECT_THROW(check(req, NerResponse{"n", {{1, 0, 0, "PER"}}}), BackendError);
}

TEST(RequestChecks, GenerateParameters) {
  EXPECT_NO_THROW(check_request(GenerateRequest{"g", "p", 10, 0.9, 0}));
  EXPECT_THROW(check_request(GenerateRequest{"g", "p", 0, 0.9, 0}), Error);
  EXPECT_THROW(check_request(GenerateRequest{"g", "p", 10, 0.0, 0}), Error);
  EXPECT_THROW(check_request(GenerateRequest{"g", "p", 10, 1.5, 0}), Error);
}

TEST(MockBackend, Deterministic) {
  MockBackend a(3), b(3);
  GenerateRequest g{"g", "ctx [SEP] The quake killed dozens of people today [SEP] ans", 4, 0.9, 1};
  EXPECT_EQ(a.generate(g), b.generate(g));
  auto qs = a.generate(g).questions;
  ASSERT_EQ(qs.size(), 4u);
  EXPECT_EQ(qs[0], "What happened after The quake killed dozens of? (1)");
  EXPECT_EQ(qs[3], "What happened after The quake killed dozens of? (4)");
  for (const auto& q : qs) EXPECT_EQ(a.rerank({"r", q, "", ""}), b.rerank({"r", q, "", ""}));
  EXPECT_EQ(a.anchor({"x", "e", 9, 6}).anchor_index, 5);
  EXPECT_TRUE(a.ner({"n", 1, {"A"}}).spans.empty());
}

TEST(MockBackend, SeedsChangeScores) {
  int differing = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const double x = MockBackend::score_of(s, "Why?");
    const double y = MockBackend::score_of(s + 1000, "Why?");
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    if (x != y) ++differing;
  }
  EXPECT_EQ(differing, 100);
}

class HttpRoundTrip : public ::testing::Test {
 protected:
  void SetUp() override { port_ = server_.start("127.0.0.1", 0); }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  MockBackend mock_{9};
  BackendServer server_{mock_};
  int port_ = 0;
};

TEST_F(HttpRoundTrip, MatchesInProcessMock) {
  HttpBackend http(url());
  GenerateRequest g{"g-1", "c [SEP] Storm hit the coast [SEP] a", 3, 0.9, 5};
  EXPECT_EQ(http.generate(g), mock_.generate(g));
  RerankRequest r{"r-1", "Why?", "x", "y"};
  EXPECT_EQ(http.rerank(r), mock_.rerank(r));
  AnchorRequest a{"a-1", "enc", 6, 4};
  EXPECT_EQ(http.anchor(a), mock_.anchor(a));
  NerRequest n{"n-1", 2, {"Hugo"}};
  EXPECT_EQ(http.ner(n), mock_.ner(n));
  auto h = http.health();
  EXPECT_EQ(h.status, "ok");
  EXPECT_EQ(h.model_ids.size(), 4u);
}

TEST_F(HttpRoundTrip, AssignsRequestIdsWhenMissing) {
  HttpBackend http(url());
  auto r1 = http.rerank({"", "q", "a", "b"});
  auto r2 = http.rerank({"", "q", "a", "b"});
  EXPECT_FALSE(r1.request_id.empty());
  EXPECT_NE(r1.request_id, r2.request_id);
}

TEST_F(HttpRoundTrip, ServerRejectsBadRequests) {
  httplib::Client raw(url());
  auto res = raw.Post(kRerankEndpoint, "{oops", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_TRUE(nlohmann::json::parse(res->body).contains("error"));
  HttpBackend http(url());
  try {
    http.anchor({"a", "e", 3, 1});
    ADD_FAILURE();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), Kind::HttpStatus);
    EXPECT_EQ(e.endpoint(), kAnchorEndpoint);
    EXPECT_EQ(e.request_id(), "a");
  }
  EXPECT_THROW(http.generate({"g", "p", 0, 0.9, 0}), BackendError);
}

TEST_F(HttpRoundTrip, ConcurrentCalls) {
  HttpBackend http(url());
  std::vector<std::future<bool>> futures;
  for (int t = 0; t < 8; ++t) {
    futures.push_back(std::async(std::launch::async, [&, t] {
      bool ok = true;
      for (int k = 0; k < 10; ++k) {
        const std::string q = "q" + std::to_string(t) + "-" + std::to_string(k);
        ok &= http.rerank({"r" + q, q, "a", "b"}).score == MockBackend::score_of(9, q);
      }
      return ok;
    }));
  }
  for (auto& f : futures) EXPECT_TRUE(f.get());
}

struct RawServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
  ~RawServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

TEST(HttpBackendErrors, MalformedResponseBody) {
  RawServer raw;
  raw.server.Post(kRerankEndpoint, [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"score\": [1,2]}", "application/json");
  });
  raw.start();
  HttpBackend http(raw.url());
  try {
    http.rerank({"r9", "q", "a", "b"});
    ADD_FAILURE();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), Kind::MalformedBody);
    EXPECT_EQ(e.endpoint(), kRerankEndpoint);
  }
}

TEST(HttpBackendErrors, InvariantViolationFromServer) {
  RawServer raw;
  raw.server.Post(kAnchorEndpoint, [](const httplib::Request& req, httplib::Response& res) {
    auto r = decode<AnchorRequest>(req.body);
    res.set_content(encode(AnchorResponse{r.request_id, r.answer_index + 2, std::nullopt}), "application/json");
  });
  raw.start();
  HttpBackend http(raw.url());
  try {
    http.anchor({"a7", "e", 8, 5});
    ADD_FAILURE();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), Kind::InvariantViolation);
    EXPECT_EQ(e.request_id(), "a7");
  }
}

TEST(HttpBackendErrors, TransportFailure) {
  int port;
  {
    RawServer raw;
    raw.start();
    port = raw.port;
  }
  HttpBackend http("http://127.0.0.1:" + std::to_string(port), {std::chrono::milliseconds(500), 1});
  try {
    http.rerank({"r", "q", "a", "b"});
    ADD_FAILURE();
  } catch (const BackendError& e) {
    EXPECT_TRUE(e.kind() == Kind::Transport || e.kind() == Kind::Timeout);
  }
}

TEST(HttpBackendErrors, TimeoutAndRetry) {
  RawServer raw;
  std::atomic<int> hits{0};
  raw.server.Post(kRerankEndpoint, [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    auto r = decode<RerankRequest>(req.body);
    res.set_content(encode(RerankResponse{r.request_id, 0.5}), "application/json");
  });
  raw.start();
  HttpBackend http(raw.url(), {std::chrono::milliseconds(150), 1});
  try {
    http.rerank({"slow", "q", "a", "b"});
    ADD_FAILURE();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), Kind::Timeout);
    EXPECT_EQ(e.request_id(), "slow");
  }
  EXPECT_EQ(hits.load(), 2);
}

TEST(HttpBackendErrors, EmptyUrlIsConfigError) { EXPECT_THROW(HttpBackend(""), ConfigError); }

}  // namespace
}  // namespace qud::protocol
