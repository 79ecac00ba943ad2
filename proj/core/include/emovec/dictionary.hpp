// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emovec/backend.hpp"

namespace emovec {

/// Size of the bundled default dictionary.
inline constexpr std::size_t kBundledDictionarySize = 271;

struct EmotionDescriptor {
  std::string word;
  std::size_t index = 0;

  friend bool operator==(const EmotionDescriptor&, const EmotionDescriptor&) = default;
};

/// Ordered, duplicate-free list of emotion words. Immutable once built.
class EmotionDictionary {
 public:
  /// Parses dictionary text: one descriptor per line, '#' comments, blank
  /// lines ignored. `source` names the origin in error messages.
  static EmotionDictionary parse(std::string_view text, std::string_view source = "<memory>");

  /// Builds from already-normalized words, in the given order.
  static EmotionDictionary from_words(const std::vector<std::string>& words);

  const std::vector<EmotionDescriptor>& descriptors() const { return descriptors_; }
  const EmotionDescriptor& operator[](std::size_t i) const { return descriptors_[i]; }
  std::size_t size() const { return descriptors_.size(); }

  /// SHA-256 over serialize().
  const std::string& digest() const { return digest_; }

  std::vector<std::string> words() const;
  std::optional<std::size_t> find(std::string_view word) const;

  /// Normalized file form: one word per line, '\n' terminated.
  std::string serialize() const;

  friend bool operator==(const EmotionDictionary&, const EmotionDictionary&) = default;

 private:
  std::vector<EmotionDescriptor> descriptors_;
  std::string digest_;
};

/// Trim, collapse internal whitespace runs to one space, ASCII-lowercase.
std::string normalize_descriptor(std::string_view line);

EmotionDictionary load_dictionary(const std::filesystem::path& path);

/// The compiled-in default word list.
EmotionDictionary bundled_dictionary();

/// Which surface forms of a word are scored. Probabilities of enabled forms are summed.
struct VariantPolicy {
  bool leading_space = true;  // " joy"
  bool bare = false;          // "joy"
  bool capitalized = false;   // " Joy"

  /// Comma list of `space`, `bare`, `cap`, e.g. "space,bare".
  static VariantPolicy parse(std::string_view spec);
  std::string to_string() const;

  friend bool operator==(const VariantPolicy&, const VariantPolicy&) = default;
};

struct DescriptorVariants {
  std::size_t descriptor_index = 0;
  std::vector<std::vector<TokenId>> variants;
  std::vector<std::string> variant_labels;

  friend bool operator==(const DescriptorVariants&, const DescriptorVariants&) = default;
};

/// Tokenizes every enabled surface form of every descriptor. Forms that
/// tokenize to nothing are dropped and described in `dropped` when given;
/// a descriptor that loses all of its forms is a ValidationError.
std::vector<DescriptorVariants> expand_variants(const EmotionDictionary& dict,
                                                const Tokenizer& tokenizer,
                                                const VariantPolicy& policy,
                                                std::vector<std::string>* dropped = nullptr);

}  // namespace emovec
