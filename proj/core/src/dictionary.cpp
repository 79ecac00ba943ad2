// SPDX-License-Identifier: Apache-2.0
#include "emovec/dictionary.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "emovec/digest.hpp"
#include "emovec/errors.hpp"
#include "emovec/io.hpp"

namespace emovec {

namespace detail {
extern const std::string_view kBundledDictionaryText;
}  // namespace detail

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

EmotionDictionary build(std::vector<std::string> words, const std::vector<std::size_t>& lines,
                        std::string_view source) {
  if (words.empty()) {
    throw ValidationError("dictionary " + std::string(source) + " contains no descriptors");
  }
  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto [it, inserted] = seen.emplace(words[i], i);
    if (!inserted) {
      throw ValidationError("dictionary " + std::string(source) + ": duplicate word '" + words[i] +
                            "' on lines " + std::to_string(lines[it->second]) + " and " +
                            std::to_string(lines[i]));
    }
  }
  return EmotionDictionary::from_words(words);
}

}  // namespace

std::string normalize_descriptor(std::string_view line) {
  std::string out;
  out.reserve(line.size());
  bool pending_space = false;
  for (char c : trim(line)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

EmotionDictionary EmotionDictionary::parse(std::string_view text, std::string_view source) {
  std::vector<std::string> words;
  std::vector<std::size_t> lines;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    words.push_back(normalize_descriptor(body));
    lines.push_back(line_no);
  }
  return build(std::move(words), lines, source);
}

EmotionDictionary EmotionDictionary::from_words(const std::vector<std::string>& words) {
  EmotionDictionary dict;
  dict.descriptors_.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].empty()) {
      throw ValidationError("empty descriptor at index " + std::to_string(i));
    }
    dict.descriptors_.push_back(EmotionDescriptor{words[i], i});
  }
  if (dict.descriptors_.empty()) {
    throw ValidationError("dictionary contains no descriptors");
  }
  std::vector<std::string_view> sorted;
  sorted.reserve(words.size());
  for (const auto& w : words) sorted.push_back(w);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("dictionary contains duplicate words");
  }
  dict.digest_ = sha256_hex(dict.serialize());
  return dict;
}

std::vector<std::string> EmotionDictionary::words() const {
  std::vector<std::string> out;
  out.reserve(descriptors_.size());
  for (const auto& d : descriptors_) out.push_back(d.word);
  return out;
}

std::optional<std::size_t> EmotionDictionary::find(std::string_view word) const {
  for (const auto& d : descriptors_) {
    if (d.word == word) return d.index;
  }
  return std::nullopt;
}

std::string EmotionDictionary::serialize() const {
  std::string out;
  for (const auto& d : descriptors_) {
    out += d.word;
    out += '\n';
  }
  return out;
}

EmotionDictionary load_dictionary(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ValidationError("dictionary file not found: " + path.string());
  }
  return EmotionDictionary::parse(read_file(path), path.string());
}

EmotionDictionary bundled_dictionary() {
  static const EmotionDictionary dict =
      EmotionDictionary::parse(detail::kBundledDictionaryText, "<bundled>");
  return dict;
}

VariantPolicy VariantPolicy::parse(std::string_view spec) {
  VariantPolicy policy{false, false, false};
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const std::string_view item = trim(spec.substr(0, comma));
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    if (item == "space") {
      policy.leading_space = true;
    } else if (item == "bare") {
      policy.bare = true;
    } else if (item == "cap") {
      policy.capitalized = true;
    } else {
      throw ValidationError("unknown variant form '" + std::string(item) +
                            "' (expected space, bare or cap)");
    }
  }
  if (!policy.leading_space && !policy.bare && !policy.capitalized) {
    throw ValidationError("variant policy enables no surface forms");
  }
  return policy;
}

std::string VariantPolicy::to_string() const {
  std::string out;
  auto add = [&](bool on, std::string_view name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(leading_space, "space");
  add(bare, "bare");
  add(capitalized, "cap");
  return out;
}

std::vector<DescriptorVariants> expand_variants(const EmotionDictionary& dict,
                                                const Tokenizer& tokenizer,
                                                const VariantPolicy& policy,
                                                std::vector<std::string>* dropped) {
  std::vector<DescriptorVariants> out;
  out.reserve(dict.size());
  const auto vocab = tokenizer.vocab_size();
  for (const auto& d : dict.descriptors()) {
    std::vector<std::string> labels;
    if (policy.leading_space) labels.push_back(" " + d.word);
    if (policy.bare) labels.push_back(d.word);
    if (policy.capitalized) {
      std::string cap = " " + d.word;
      cap[1] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[1])));
      labels.push_back(std::move(cap));
    }

    DescriptorVariants dv;
    dv.descriptor_index = d.index;
    for (auto& label : labels) {
      auto tokens = tokenizer.encode(label);
      if (tokens.empty()) {
        if (dropped) dropped->push_back("'" + d.word + "': variant '" + label + "' tokenizes empty");
        continue;
      }
      for (TokenId t : tokens) {
        if (t < 0 || static_cast<std::size_t>(t) >= vocab) {
          throw ValidationError("tokenizer returned id " + std::to_string(t) +
                                " outside vocabulary for '" + label + "'");
        }
      }
      if (std::find(dv.variants.begin(), dv.variants.end(), tokens) != dv.variants.end()) {
        continue;
      }
      dv.variants.push_back(std::move(tokens));
      dv.variant_labels.push_back(std::move(label));
    }
    if (dv.variants.empty()) {
      throw ValidationError("descriptor '" + d.word + "': every variant tokenized to nothing");
    }
    out.push_back(std::move(dv));
  }
  return out;
}

}  // namespace emovec
