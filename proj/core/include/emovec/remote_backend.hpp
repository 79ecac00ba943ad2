// SPDX-License-Identifier: Apache-2.0
#pragma once

// HTTP adapter for an external inference server.
//
//   GET  /v1/model       -> {"model": id, "vocab_size": V, "max_context": N}
//   POST /v1/score       {"model": id, "tokens": [...]}  -> {"vocab_size": V, "probs": [V floats]}
//   POST /v1/tokenize    {"model": id, "text": "..."}     -> {"tokens": [...]}
//   POST /v1/detokenize  {"model": id, "tokens": [...]}   -> {"text": "..."}
//
// Score responses are validated on receipt. A sum off by at most 1e-6 is
// renormalized; anything further is a ProtocolError.

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "emovec/backend.hpp"

namespace emovec {

struct RemoteBackendOptions {
  std::string endpoint;  // e.g. "http://127.0.0.1:8080"
  std::string model_id;  // empty: accept whatever the server reports
  std::chrono::milliseconds timeout{30000};
  unsigned retries = 2;
  std::size_t cache_capacity = 4096;
};

/// Tolerance on the probability sum before a response is rejected.
inline constexpr double kRemoteSumTolerance = 1e-6;

/// Validates and, if needed, renormalizes a /v1/score response body.
std::vector<double> parse_score_response(std::string_view body, std::size_t expected_vocab);

class RemoteBackend : public Backend {
 public:
  /// Queries /v1/model; throws TransportError / ProtocolError on failure.
  explicit RemoteBackend(RemoteBackendOptions options);
  ~RemoteBackend() override;

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  const Tokenizer& tokenizer() const override;
  TokenDistribution next_token_distribution(std::span<const TokenId> context) const override;

  std::size_t requests_sent() const;
  std::size_t cache_hits() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  BackendDescriptor descriptor_;
};

std::unique_ptr<Backend> remote_backend(const std::string& endpoint, const std::string& model_id);

}  // namespace emovec
