// SPDX-License-Identifier: Apache-2.0
#include "emovec/remote_backend.hpp"

#include <httplib.h>

#include <atomic>
#include <cmath>
#include <deque>
#include <json.hpp>
#include <mutex>
#include <shared_mutex>
#include <thread>
#include <unordered_map>

#include "emovec/errors.hpp"

namespace emovec {

using nlohmann::json;

namespace {

json parse_json(std::string_view body, std::string_view what) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedResponseError(std::string(what) + ": response is not JSON: " + e.what());
  }
}

template <typename T>
T field(const json& obj, const char* name, std::string_view what) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw MalformedResponseError(std::string(what) + ": missing field '" + name + "'");
  }
  try {
    return obj.at(name).get<T>();
  } catch (const json::exception&) {
    throw MalformedResponseError(std::string(what) + ": field '" + name + "' has the wrong type");
  }
}

// Shared HTTP plumbing for the backend and its tokenizer.
class Transport {
 public:
  explicit Transport(const RemoteBackendOptions& options) : options_(options) {}

  std::string get(const std::string& path) const { return send(path, nullptr); }
  std::string post(const std::string& path, const std::string& body) const {
    return send(path, &body);
  }

  std::size_t requests() const { return requests_.load(); }
  const RemoteBackendOptions& options() const { return options_; }

 private:
  std::string send(const std::string& path, const std::string* body) const {
    std::string last_error;
    for (unsigned attempt = 0; attempt <= options_.retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50) * attempt);
      }
      httplib::Client client(options_.endpoint);
      client.set_connection_timeout(options_.timeout);
      client.set_read_timeout(options_.timeout);
      client.set_write_timeout(options_.timeout);
      requests_.fetch_add(1);
      auto res = body ? client.Post(path, *body, "application/json") : client.Get(path);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) {
        return res->body;
      }
      if (res->status >= 500 || res->status == 429) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      throw ProtocolError(path + ": HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    throw TransportError(options_.endpoint + path + ": " + last_error + " (after " +
                         std::to_string(options_.retries + 1) + " attempts)");
  }

  RemoteBackendOptions options_;
  mutable std::atomic<std::size_t> requests_{0};
};

class RemoteTokenizer : public Tokenizer {
 public:
  RemoteTokenizer(const Transport& transport, std::string model, std::size_t vocab)
      : transport_(transport), model_(std::move(model)), vocab_(vocab) {}

  std::size_t vocab_size() const override { return vocab_; }

  std::vector<TokenId> encode(std::string_view text) const override {
    const json req = {{"model", model_}, {"text", std::string(text)}};
    const json res = parse_json(transport_.post("/v1/tokenize", req.dump()), "/v1/tokenize");
    auto tokens = field<std::vector<TokenId>>(res, "tokens", "/v1/tokenize");
    for (TokenId t : tokens) {
      if (t < 0 || static_cast<std::size_t>(t) >= vocab_) {
        throw ProtocolError("/v1/tokenize: token id " + std::to_string(t) + " outside vocabulary");
      }
    }
    return tokens;
  }

  std::string decode(std::span<const TokenId> tokens) const override {
    const json req = {{"model", model_},
                      {"tokens", std::vector<TokenId>(tokens.begin(), tokens.end())}};
    const json res = parse_json(transport_.post("/v1/detokenize", req.dump()), "/v1/detokenize");
    return field<std::string>(res, "text", "/v1/detokenize");
  }

 private:
  const Transport& transport_;
  std::string model_;
  std::size_t vocab_;
};

}  // namespace

std::vector<double> parse_score_response(std::string_view body, std::size_t expected_vocab) {
  const json res = parse_json(body, "/v1/score");
  const auto vocab = field<std::size_t>(res, "vocab_size", "/v1/score");
  if (vocab != expected_vocab) {
    throw ProtocolError("/v1/score: vocab_size " + std::to_string(vocab) +
                        " does not match declared " + std::to_string(expected_vocab));
  }
  auto probs = field<std::vector<double>>(res, "probs", "/v1/score");
  if (probs.size() != vocab) {
    throw MalformedResponseError("/v1/score: " + std::to_string(probs.size()) +
                                 " probabilities for vocab_size " + std::to_string(vocab));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw ProtocolError("/v1/score: negative or non-finite probability");
    }
    sum += p;
  }
  const double deviation = std::abs(sum - 1.0);
  if (deviation > kRemoteSumTolerance) {
    throw ProtocolError("/v1/score: probabilities sum to " + std::to_string(sum));
  }
  if (deviation > 1e-9) {
    for (double& p : probs) p /= sum;
  }
  return probs;
}

struct RemoteBackend::Impl {
  explicit Impl(const RemoteBackendOptions& options) : transport(options) {}

  Transport transport;
  std::unique_ptr<RemoteTokenizer> tokenizer;
  std::string model;

  mutable std::shared_mutex cache_mutex;
  mutable std::unordered_map<std::string, std::shared_ptr<const std::vector<double>>> cache;
  mutable std::deque<std::string> cache_order;
  mutable std::atomic<std::size_t> hits{0};

  std::shared_ptr<const std::vector<double>> lookup(const std::string& key) const {
    std::shared_lock lock(cache_mutex);
    auto it = cache.find(key);
    if (it == cache.end()) return nullptr;
    hits.fetch_add(1);
    return it->second;
  }

  void store(const std::string& key, std::shared_ptr<const std::vector<double>> probs) const {
    const std::size_t capacity = transport.options().cache_capacity;
    if (capacity == 0) return;
    std::unique_lock lock(cache_mutex);
    if (!cache.emplace(key, std::move(probs)).second) return;
    cache_order.push_back(key);
    while (cache_order.size() > capacity) {
      cache.erase(cache_order.front());
      cache_order.pop_front();
    }
  }
};

RemoteBackend::RemoteBackend(RemoteBackendOptions options)
    : impl_(std::make_unique<Impl>(options)) {
  if (options.endpoint.empty()) {
    throw ValidationError("remote backend needs an endpoint URL");
  }
  const json info = parse_json(impl_->transport.get("/v1/model"), "/v1/model");
  impl_->model = field<std::string>(info, "model", "/v1/model");
  if (!options.model_id.empty() && options.model_id != impl_->model) {
    throw ProtocolError("server serves model '" + impl_->model + "', requested '" +
                        options.model_id + "'");
  }
  descriptor_.vocab_size = field<std::size_t>(info, "vocab_size", "/v1/model");
  descriptor_.max_context = field<std::size_t>(info, "max_context", "/v1/model");
  if (descriptor_.vocab_size < 2) {
    throw ProtocolError("/v1/model: vocab_size must be at least 2");
  }
  if (descriptor_.max_context < kMinContextWindow) {
    throw ProtocolError("/v1/model: max_context must be at least " +
                        std::to_string(kMinContextWindow));
  }
  descriptor_.name = "remote:" + impl_->model + "@" + options.endpoint;
  descriptor_.deterministic = false;
  impl_->tokenizer =
      std::make_unique<RemoteTokenizer>(impl_->transport, impl_->model, descriptor_.vocab_size);
}

RemoteBackend::~RemoteBackend() = default;

const Tokenizer& RemoteBackend::tokenizer() const { return *impl_->tokenizer; }

TokenDistribution RemoteBackend::next_token_distribution(std::span<const TokenId> context) const {
  check_context(descriptor_, context);
  std::string key = token_digest(context);
  if (auto cached = impl_->lookup(key)) {
    return TokenDistribution{*cached, std::move(key)};
  }
  const json req = {{"model", impl_->model},
                    {"tokens", std::vector<TokenId>(context.begin(), context.end())}};
  auto probs = std::make_shared<const std::vector<double>>(
      parse_score_response(impl_->transport.post("/v1/score", req.dump()), descriptor_.vocab_size));
  impl_->store(key, probs);
  return TokenDistribution{*probs, std::move(key)};
}

std::size_t RemoteBackend::requests_sent() const { return impl_->transport.requests(); }
std::size_t RemoteBackend::cache_hits() const { return impl_->hits.load(); }

std::unique_ptr<Backend> remote_backend(const std::string& endpoint, const std::string& model_id) {
  RemoteBackendOptions options;
  options.endpoint = endpoint;
  options.model_id = model_id;
  return std::make_unique<RemoteBackend>(options);
}

}  // namespace emovec
