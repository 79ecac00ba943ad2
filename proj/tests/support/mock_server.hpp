// SPDX-License-Identifier: Apache-2.0
#pragma once

// In-process HTTP server speaking the /v1 scoring protocol. Score responses
// come from a swappable callback so tests can inject protocol violations.

#include <httplib.h>

#include <atomic>
#include <functional>
#include <json.hpp>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "emovec/toy_backend.hpp"
#include "emovec/io.hpp"

namespace emovec::testing {

class MockServer {
 public:
  using ScoreFn = std::function<std::string(const std::vector<TokenId>&)>;

  explicit MockServer(std::size_t vocab, std::size_t max_context = 256,
                      std::string model = "mock-model")
      : vocab_(vocab), max_context_(max_context), model_(std::move(model)),
        tokenizer_(vocab) {
    using nlohmann::json;
    server_.Get("/v1/model", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"model", model_}, {"vocab_size", vocab_}, {"max_context", max_context_}}
                          .dump(),
                      "application/json");
    });
    server_.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      score_requests_.fetch_add(1);
      const auto body = json::parse(req.body);
      const auto tokens = body.at("tokens").get<std::vector<TokenId>>();
      ScoreFn fn;
      {
        std::lock_guard lock(mutex_);
        fn = score_fn_;
      }
      if (fail_remaining_.load() > 0) {
        fail_remaining_.fetch_sub(1);
        res.status = 503;
        res.set_content("busy", "text/plain");
        return;
      }
      res.set_content(fn ? fn(tokens) : uniform_body(), "application/json");
    });
    server_.Post("/v1/tokenize", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      res.set_content(
          json{{"tokens", tokenizer_.encode(body.at("text").get<std::string>())}}.dump(),
          "application/json");
    });
    server_.Post("/v1/detokenize", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      res.set_content(
          json{{"text", tokenizer_.decode(body.at("tokens").get<std::vector<TokenId>>())}}.dump(),
          "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::size_t score_requests() const { return score_requests_.load(); }
  void fail_next(int n) { fail_remaining_.store(n); }

  void on_score(ScoreFn fn) {
    std::lock_guard lock(mutex_);
    score_fn_ = std::move(fn);
  }

  /// Serializes probs with 17 significant digits, as a real server would.
  static std::string body_for(std::size_t vocab, const std::vector<double>& probs) {
    std::string out = "{\"vocab_size\":" + std::to_string(vocab) + ",\"probs\":[";
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (i) out += ',';
      out += format_double17(probs[i]);
    }
    return out + "]}";
  }

  std::string uniform_body() const {
    return body_for(vocab_, std::vector<double>(vocab_, 1.0 / static_cast<double>(vocab_)));
  }

  /// Serve the toy backend's distributions for the given seed.
  void serve_toy(std::uint64_t seed) {
    ToyBackendOptions o;
    o.seed = seed;
    o.vocab_size = vocab_;
    o.max_context = max_context_;
    auto toy = std::make_shared<ToyBackend>(o);
    const std::size_t vocab = vocab_;
    on_score([toy, vocab](const std::vector<TokenId>& tokens) {
      return body_for(vocab, toy->next_token_distribution(tokens).probs);
    });
  }

 private:
  std::size_t vocab_;
  std::size_t max_context_;
  std::string model_;
  CharTokenizer tokenizer_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  ScoreFn score_fn_;
  std::atomic<std::size_t> score_requests_{0};
  std::atomic<int> fail_remaining_{0};
};

}  // namespace emovec::testing
