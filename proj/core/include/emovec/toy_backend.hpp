// SPDX-License-Identifier: Apache-2.0
#pragma once

// Deterministic offline backend. Logits are a keyed hash of
// (seed, context, token), so any process reproduces the same
// distributions bit for bit.

#include <array>
#include <cstdint>
#include <memory>

#include "emovec/backend.hpp"

namespace emovec {

/// Character-level tokenizer sized to a vocabulary of V ids.
///
/// Ids [0, min(95, V-1)) map one-to-one onto printable ASCII characters in a
/// fixed priority order (space, a-z, '-', A-Z, 0-9, remaining punctuation).
/// Id V-1 is an escape: it is followed by a fixed number of base-V digit
/// tokens spelling one byte. Any byte without a direct id, including all
/// non-ASCII bytes, goes through the escape, so decode(encode(s)) == s for
/// every byte string. The smallest usable vocabulary is 2.
class CharTokenizer : public Tokenizer {
 public:
  static constexpr std::size_t kMinVocab = 2;

  explicit CharTokenizer(std::size_t vocab_size);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::vector<TokenId> encode(std::string_view text) const override;
  std::string decode(std::span<const TokenId> tokens) const override;

  TokenId escape_token() const { return static_cast<TokenId>(vocab_size_ - 1); }
  std::size_t direct_count() const { return direct_count_; }
  std::size_t escape_digits() const { return escape_digits_; }

 private:
  std::size_t vocab_size_;
  std::size_t direct_count_;
  std::size_t escape_digits_;
  std::array<TokenId, 256> byte_to_id_{};
  std::array<unsigned char, 95> id_to_byte_{};
};

struct ToyBackendOptions {
  std::uint64_t seed = 0;
  std::size_t vocab_size = 256;
  std::size_t max_context = 2048;
  /// Logits are drawn from [-logit_scale, logit_scale]; 0 gives uniform output.
  double logit_scale = 4.0;
};

/// Logit of `token` after `context`. The reference definition used by ToyBackend.
double toy_logit(std::uint64_t seed, std::span<const TokenId> context, TokenId token,
                 double logit_scale);

class ToyBackend : public Backend {
 public:
  explicit ToyBackend(const ToyBackendOptions& options);

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  const Tokenizer& tokenizer() const override { return tokenizer_; }
  TokenDistribution next_token_distribution(std::span<const TokenId> context) const override;

  std::vector<double> logits(std::span<const TokenId> context) const;
  const ToyBackendOptions& options() const { return options_; }

 private:
  ToyBackendOptions options_;
  CharTokenizer tokenizer_;
  BackendDescriptor descriptor_;
};

std::unique_ptr<Backend> toy_backend(std::uint64_t seed, std::size_t vocab_size,
                                     std::size_t max_context);

}  // namespace emovec
