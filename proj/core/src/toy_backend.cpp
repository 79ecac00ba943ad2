// SPDX-License-Identifier: Apache-2.0
#include "emovec/toy_backend.hpp"

#include <string>

#include "emovec/errors.hpp"
#include "emovec/io.hpp"

namespace emovec {

namespace {

constexpr std::size_t kPrintable = 95;

std::array<unsigned char, kPrintable> priority_alphabet() {
  std::array<unsigned char, kPrintable> out{};
  std::array<bool, 128> used{};
  std::size_t n = 0;
  auto push = [&](unsigned char c) {
    if (!used[c]) {
      used[c] = true;
      out[n++] = c;
    }
  };
  push(' ');
  for (unsigned char c = 'a'; c <= 'z'; ++c) push(c);
  push('-');
  for (unsigned char c = 'A'; c <= 'Z'; ++c) push(c);
  for (unsigned char c = '0'; c <= '9'; ++c) push(c);
  for (unsigned char c = 33; c <= 126; ++c) push(c);
  return out;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

std::uint64_t context_state(std::uint64_t seed, std::span<const TokenId> context) {
  std::uint64_t h = mix64(seed + kGolden);
  for (TokenId t : context) {
    h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t)) + kGolden));
  }
  return h;
}

double logit_from_state(std::uint64_t state, TokenId token, double scale) {
  const std::uint64_t u =
      mix64(state ^ mix64(static_cast<std::uint64_t>(static_cast<std::uint32_t>(token)) +
                          0xD1B54A32D192ED03ull));
  const double unit = static_cast<double>(u >> 11) * 0x1.0p-53;
  return scale * (2.0 * unit - 1.0);
}

}  // namespace

CharTokenizer::CharTokenizer(std::size_t vocab_size) : vocab_size_(vocab_size) {
  if (vocab_size < kMinVocab) {
    throw ValidationError("toy tokenizer needs a vocabulary of at least " +
                          std::to_string(kMinVocab) + " ids, got " + std::to_string(vocab_size));
  }
  direct_count_ = std::min(kPrintable, vocab_size - 1);
  escape_digits_ = 1;
  for (std::size_t span = vocab_size; span < 256; span *= vocab_size) {
    ++escape_digits_;
  }
  byte_to_id_.fill(-1);
  const auto alphabet = priority_alphabet();
  for (std::size_t i = 0; i < direct_count_; ++i) {
    byte_to_id_[alphabet[i]] = static_cast<TokenId>(i);
    id_to_byte_[i] = alphabet[i];
  }
}

std::vector<TokenId> CharTokenizer::encode(std::string_view text) const {
  std::vector<TokenId> out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto byte = static_cast<unsigned char>(ch);
    if (byte_to_id_[byte] >= 0) {
      out.push_back(byte_to_id_[byte]);
      continue;
    }
    out.push_back(escape_token());
    const std::size_t first = out.size();
    out.resize(first + escape_digits_);
    std::size_t value = byte;
    for (std::size_t d = escape_digits_; d-- > 0;) {
      out[first + d] = static_cast<TokenId>(value % vocab_size_);
      value /= vocab_size_;
    }
  }
  return out;
}

std::string CharTokenizer::decode(std::span<const TokenId> tokens) const {
  std::string out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const TokenId t = tokens[i];
    if (t < 0 || static_cast<std::size_t>(t) >= vocab_size_) {
      throw ValidationError("token id " + std::to_string(t) + " outside vocabulary");
    }
    if (t == escape_token()) {
      if (i + escape_digits_ >= tokens.size()) {
        throw ValidationError("truncated byte escape in token sequence");
      }
      std::size_t value = 0;
      for (std::size_t d = 0; d < escape_digits_; ++d) {
        const TokenId digit = tokens[++i];
        if (digit < 0 || static_cast<std::size_t>(digit) >= vocab_size_) {
          throw ValidationError("token id " + std::to_string(digit) + " outside vocabulary");
        }
        value = value * vocab_size_ + static_cast<std::size_t>(digit);
      }
      if (value > 255) {
        throw ValidationError("byte escape encodes " + std::to_string(value));
      }
      out.push_back(static_cast<char>(value));
    } else if (static_cast<std::size_t>(t) < direct_count_) {
      out.push_back(static_cast<char>(id_to_byte_[static_cast<std::size_t>(t)]));
    } else {
      throw ValidationError("token id " + std::to_string(t) + " has no surface form");
    }
  }
  return out;
}

double toy_logit(std::uint64_t seed, std::span<const TokenId> context, TokenId token,
                 double logit_scale) {
  return logit_from_state(context_state(seed, context), token, logit_scale);
}

ToyBackend::ToyBackend(const ToyBackendOptions& options)
    : options_(options), tokenizer_(options.vocab_size) {
  if (options.max_context < kMinContextWindow) {
    throw ValidationError("toy backend max_context must be at least " +
                          std::to_string(kMinContextWindow));
  }
  descriptor_.name = "toy:seed=" + std::to_string(options.seed) +
                     ",vocab=" + std::to_string(options.vocab_size) +
                     ",ctx=" + std::to_string(options.max_context);
  if (options.logit_scale != 4.0) {
    descriptor_.name += ",scale=" + format_shortest(options.logit_scale);
  }
  descriptor_.vocab_size = options.vocab_size;
  descriptor_.max_context = options.max_context;
  descriptor_.deterministic = true;
}

std::vector<double> ToyBackend::logits(std::span<const TokenId> context) const {
  const std::uint64_t state = context_state(options_.seed, context);
  std::vector<double> out(options_.vocab_size);
  for (std::size_t t = 0; t < out.size(); ++t) {
    out[t] = logit_from_state(state, static_cast<TokenId>(t), options_.logit_scale);
  }
  return out;
}

TokenDistribution ToyBackend::next_token_distribution(std::span<const TokenId> context) const {
  check_context(descriptor_, context);
  return TokenDistribution{softmax(logits(context)), token_digest(context)};
}

std::unique_ptr<Backend> toy_backend(std::uint64_t seed, std::size_t vocab_size,
                                     std::size_t max_context) {
  ToyBackendOptions options;
  options.seed = seed;
  options.vocab_size = vocab_size;
  options.max_context = max_context;
  return std::make_unique<ToyBackend>(options);
}

}  // namespace emovec
