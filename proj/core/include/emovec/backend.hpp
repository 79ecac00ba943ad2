// SPDX-License-Identifier: Apache-2.0
#pragma once

// Language-model backend contract: a tokenizer plus the full next-token
// distribution for a token context.

#include <atomic>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emovec/digest.hpp"

namespace emovec {

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  /// Number of token ids V; every id returned by encode() is in [0, V).
  virtual std::size_t vocab_size() const = 0;
  virtual std::vector<TokenId> encode(std::string_view text) const = 0;
  virtual std::string decode(std::span<const TokenId> tokens) const = 0;
};

/// Normalized probabilities over the whole vocabulary for one context.
struct TokenDistribution {
  std::vector<double> probs;
  std::string context_digest;
};

struct BackendDescriptor {
  std::string name;
  std::size_t vocab_size = 0;
  std::size_t max_context = 0;
  bool deterministic = false;
};

inline constexpr std::size_t kMinContextWindow = 16;

/// Implementations must tolerate concurrent calls to next_token_distribution.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;
  virtual const Tokenizer& tokenizer() const = 0;

  /// Full distribution over the vocabulary for the token following `context`.
  /// Throws ContextTooLongError if the context exceeds max_context.
  virtual TokenDistribution next_token_distribution(std::span<const TokenId> context) const = 0;
};

/// Softmax at temperature 1, shifted by the maximum logit before exponentiation.
std::vector<double> softmax(std::span<const double> logits);

/// Throws ValidationError for an empty context and ContextTooLongError for
/// one longer than `d.max_context`.
void check_context(const BackendDescriptor& d, std::span<const TokenId> context);

/// Throws ProtocolError unless `probs` has length V, is non-negative and
/// finite, and sums to 1 within `tolerance`.
void check_distribution(std::span<const double> probs, std::size_t vocab_size,
                        double tolerance = 1e-9);

/// Decorator that counts next_token_distribution calls on the wrapped backend.
class CountingBackend : public Backend {
 public:
  explicit CountingBackend(const Backend& inner) : inner_(inner) {}

  const BackendDescriptor& descriptor() const override { return inner_.descriptor(); }
  const Tokenizer& tokenizer() const override { return inner_.tokenizer(); }
  TokenDistribution next_token_distribution(std::span<const TokenId> context) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_.next_token_distribution(context);
  }

  std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }
  void reset() { calls_.store(0, std::memory_order_relaxed); }

 private:
  const Backend& inner_;
  mutable std::atomic<std::size_t> calls_{0};
};

}  // namespace emovec
