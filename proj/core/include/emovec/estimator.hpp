// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emovec/backend.hpp"
#include "emovec/dictionary.hpp"

namespace emovec {

inline constexpr std::string_view kDefaultTailPhrase = "Reading this makes me feel";
inline constexpr std::string_view kTextPlaceholder = "{text}";

/// Prompt template with exactly one `{text}` placeholder.
class TailPrompt {
 public:
  /// "{text} Reading this makes me feel"
  TailPrompt();
  explicit TailPrompt(std::string template_text);

  /// "{text} " followed by `phrase`.
  static TailPrompt with_tail(std::string_view phrase);

  /// Substitutes the whitespace-trimmed text into the template.
  std::string render(std::string_view text) const;
  const std::string& template_text() const { return template_; }

 private:
  std::string template_;
};

struct EmotionVector {
  std::vector<double> raw;
  std::vector<double> scaled;
  std::string dictionary_digest;
  std::string backend;
  std::string text_digest;
  bool truncated = false;
  /// raw / sum(raw); only present when requested.
  std::optional<std::vector<double>> renormalized;

  std::size_t size() const { return raw.size(); }
  friend bool operator==(const EmotionVector&, const EmotionVector&) = default;
};

/// JSON object with 17-significant-digit floats. Byte-stable for equal input.
std::string to_json(const EmotionVector& v);
EmotionVector emotion_vector_from_json(std::string_view json_text);

/// raw[i] / max(raw). Throws DegenerateDistributionError if max(raw) is 0.
std::vector<double> max_scale(std::span<const double> raw);

/// Sum over variants of the chain-rule product
/// P(t_1 | ctx) * P(t_2 | ctx t_1) * ... read from the backend.
double word_probability(std::span<const TokenId> context, const DescriptorVariants& variants,
                        const Backend& backend);

struct EstimatorConfig {
  TailPrompt prompt;
  VariantPolicy policy;
  bool renormalize = false;

  /// Stable text form of everything except the dictionary and backend.
  std::string fingerprint() const;
};

/// Scores texts against one dictionary and backend. Variants are tokenized
/// once at construction and arranged as a prefix tree, so a shared prefix is
/// queried once per text. Safe to call score() concurrently.
class Estimator {
 public:
  Estimator(const EmotionDictionary& dict, const Backend& backend, EstimatorConfig config = {});

  EmotionVector score(std::string_view text) const;

  /// Key for caching score(text): covers text, dictionary, backend and config.
  std::string cache_key(std::string_view text) const;

  const EmotionDictionary& dictionary() const { return dict_; }
  const Backend& backend() const { return backend_; }
  const EstimatorConfig& config() const { return config_; }
  const std::vector<DescriptorVariants>& variants() const { return variants_; }
  std::size_t longest_variant() const { return longest_variant_; }

 private:
  struct Node {
    TokenId token = 0;
    std::vector<std::size_t> children;
    // (descriptor, variant) pairs whose token sequence ends here
    std::vector<std::pair<std::size_t, std::size_t>> terminals;
  };

  EmotionDictionary dict_;
  const Backend& backend_;
  EstimatorConfig config_;
  std::vector<DescriptorVariants> variants_;
  std::vector<Node> trie_;
  std::size_t longest_variant_ = 0;
};

EmotionVector emotion_vector(std::string_view text, const EmotionDictionary& dict,
                             const TailPrompt& prompt, const Backend& backend,
                             const VariantPolicy& policy);

struct RankedEmotion {
  std::string word;
  double value = 0.0;
  std::size_t index = 0;
};

/// The k highest scaled values, descending; ties go to the lower dictionary index.
std::vector<RankedEmotion> top_k(const EmotionVector& vec, const EmotionDictionary& dict,
                                 std::size_t k);

struct Superposition {
  std::vector<double> mean;
  std::vector<std::vector<double>> overlay;
};

/// Mean of the scaled vectors plus every row, for overlay plots.
Superposition superpose(std::span<const EmotionVector> vectors);

}  // namespace emovec
