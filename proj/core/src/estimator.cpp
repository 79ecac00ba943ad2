// SPDX-License-Identifier: Apache-2.0
#include "emovec/estimator.hpp"

#include <algorithm>
#include <functional>
#include <json.hpp>

#include "emovec/digest.hpp"
#include "emovec/errors.hpp"
#include "emovec/io.hpp"

namespace emovec {

using nlohmann::json;

TailPrompt::TailPrompt() : TailPrompt(std::string(kTextPlaceholder) + " " + std::string(kDefaultTailPhrase)) {}

TailPrompt::TailPrompt(std::string template_text) : template_(std::move(template_text)) {
  const auto first = template_.find(kTextPlaceholder);
  if (first == std::string::npos ||
      template_.find(kTextPlaceholder, first + kTextPlaceholder.size()) != std::string::npos) {
    throw ValidationError("prompt template must contain {text} exactly once: '" + template_ + "'");
  }
}

TailPrompt TailPrompt::with_tail(std::string_view phrase) {
  return TailPrompt(std::string(kTextPlaceholder) + " " + std::string(phrase));
}

std::string TailPrompt::render(std::string_view text) const {
  std::string out = template_;
  out.replace(out.find(kTextPlaceholder), kTextPlaceholder.size(), trim(text));
  return out;
}

namespace {

void append_array(std::string& out, std::span<const double> values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double17(values[i]);
  }
  out += ']';
}

std::vector<double> read_array(const json& obj, const char* name) {
  if (!obj.contains(name) || !obj.at(name).is_array()) {
    throw ValidationError(std::string("emotion vector: missing array '") + name + "'");
  }
  std::vector<double> out;
  out.reserve(obj.at(name).size());
  for (const auto& v : obj.at(name)) {
    if (!v.is_number()) {
      throw ValidationError(std::string("emotion vector: non-numeric entry in '") + name + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::string read_string(const json& obj, const char* name) {
  if (!obj.contains(name) || !obj.at(name).is_string()) {
    throw ValidationError(std::string("emotion vector: missing string '") + name + "'");
  }
  return obj.at(name).get<std::string>();
}

}  // namespace

std::string to_json(const EmotionVector& v) {
  std::string out = "{\"dictionary_digest\":";
  out += json(v.dictionary_digest).dump();
  out += ",\"backend\":";
  out += json(v.backend).dump();
  out += ",\"text_digest\":";
  out += json(v.text_digest).dump();
  out += ",\"truncated\":";
  out += v.truncated ? "true" : "false";
  out += ",\"raw\":";
  append_array(out, v.raw);
  out += ",\"scaled\":";
  append_array(out, v.scaled);
  if (v.renormalized) {
    out += ",\"renormalized\":";
    append_array(out, *v.renormalized);
  }
  out += "}\n";
  return out;
}

EmotionVector emotion_vector_from_json(std::string_view json_text) {
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("emotion vector: invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) {
    throw ValidationError("emotion vector: expected a JSON object");
  }
  EmotionVector v;
  v.dictionary_digest = read_string(obj, "dictionary_digest");
  v.backend = read_string(obj, "backend");
  v.text_digest = read_string(obj, "text_digest");
  if (!obj.contains("truncated") || !obj.at("truncated").is_boolean()) {
    throw ValidationError("emotion vector: missing boolean 'truncated'");
  }
  v.truncated = obj.at("truncated").get<bool>();
  v.raw = read_array(obj, "raw");
  v.scaled = read_array(obj, "scaled");
  if (obj.contains("renormalized")) {
    v.renormalized = read_array(obj, "renormalized");
  }
  if (v.raw.empty() || v.raw.size() != v.scaled.size() ||
      (v.renormalized && v.renormalized->size() != v.raw.size())) {
    throw ValidationError("emotion vector: array lengths disagree or are zero");
  }
  return v;
}

std::vector<double> max_scale(std::span<const double> raw) {
  const double max_raw = raw.empty() ? 0.0 : *std::max_element(raw.begin(), raw.end());
  if (!(max_raw > 0.0)) {
    throw DegenerateDistributionError("every descriptor has zero probability");
  }
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = raw[i] / max_raw;
  }
  return out;
}

double word_probability(std::span<const TokenId> context, const DescriptorVariants& variants,
                        const Backend& backend) {
  if (context.empty()) {
    throw ValidationError("word_probability: empty context");
  }
  if (variants.variants.empty()) {
    throw ValidationError("word_probability: no variants");
  }
  double total = 0.0;
  std::vector<TokenId> ctx;
  for (const auto& seq : variants.variants) {
    ctx.assign(context.begin(), context.end());
    double p = 1.0;
    for (TokenId t : seq) {
      const auto dist = backend.next_token_distribution(ctx);
      p *= dist.probs.at(static_cast<std::size_t>(t));
      ctx.push_back(t);
    }
    total += p;
  }
  return total;
}

std::string EstimatorConfig::fingerprint() const {
  return "prompt=" + prompt.template_text() + "\npolicy=" + policy.to_string() +
         "\nrenormalize=" + (renormalize ? "1" : "0");
}

Estimator::Estimator(const EmotionDictionary& dict, const Backend& backend, EstimatorConfig config)
    : dict_(dict), backend_(backend), config_(std::move(config)) {
  if (backend.tokenizer().vocab_size() != backend.descriptor().vocab_size) {
    throw ValidationError("backend tokenizer and descriptor disagree on vocab_size");
  }
  variants_ = expand_variants(dict_, backend.tokenizer(), config_.policy);
  trie_.emplace_back();
  for (std::size_t d = 0; d < variants_.size(); ++d) {
    const auto& seqs = variants_[d].variants;
    for (std::size_t v = 0; v < seqs.size(); ++v) {
      longest_variant_ = std::max(longest_variant_, seqs[v].size());
      std::size_t node = 0;
      for (TokenId t : seqs[v]) {
        std::size_t next = 0;
        for (std::size_t c : trie_[node].children) {
          if (trie_[c].token == t) {
            next = c;
            break;
          }
        }
        if (next == 0) {
          next = trie_.size();
          trie_.push_back(Node{t, {}, {}});
          trie_[node].children.push_back(next);
        }
        node = next;
      }
      trie_[node].terminals.emplace_back(d, v);
    }
  }
  if (longest_variant_ >= backend.descriptor().max_context) {
    throw ValidationError("longest descriptor variant (" + std::to_string(longest_variant_) +
                          " tokens) does not fit the backend context window");
  }
}

EmotionVector Estimator::score(std::string_view text) const {
  const std::string_view body = trim(text);
  if (body.empty()) {
    throw ValidationError("input text is empty");
  }
  std::vector<TokenId> context = backend_.tokenizer().encode(config_.prompt.render(body));
  if (context.empty()) {
    throw ValidationError("rendered prompt tokenizes to nothing");
  }

  EmotionVector out;
  const std::size_t window = backend_.descriptor().max_context;
  // The deepest query is context + (longest_variant - 1) tokens.
  if (context.size() + longest_variant_ - 1 > window) {
    const std::size_t keep = window - longest_variant_;
    context.erase(context.begin(), context.end() - static_cast<std::ptrdiff_t>(keep));
    out.truncated = true;
  }

  std::vector<std::vector<double>> variant_probs(variants_.size());
  for (std::size_t d = 0; d < variants_.size(); ++d) {
    variant_probs[d].assign(variants_[d].variants.size(), 0.0);
  }

  const std::size_t prefix = context.size();
  std::function<void(std::size_t, double)> visit = [&](std::size_t node, double prob) {
    for (const auto& [d, v] : trie_[node].terminals) {
      variant_probs[d][v] = prob;
    }
    if (trie_[node].children.empty()) {
      return;
    }
    const auto dist = backend_.next_token_distribution(context);
    for (std::size_t c : trie_[node].children) {
      const TokenId t = trie_[c].token;
      context.push_back(t);
      visit(c, prob * dist.probs.at(static_cast<std::size_t>(t)));
      context.pop_back();
    }
  };
  visit(0, 1.0);
  context.resize(prefix);

  out.raw.assign(variants_.size(), 0.0);
  for (std::size_t d = 0; d < variants_.size(); ++d) {
    double total = 0.0;
    for (double p : variant_probs[d]) total += p;
    out.raw[d] = total;
  }
  out.scaled = max_scale(out.raw);
  if (config_.renormalize) {
    double sum = 0.0;
    for (double r : out.raw) sum += r;
    std::vector<double> renorm(out.raw.size());
    for (std::size_t i = 0; i < renorm.size(); ++i) renorm[i] = out.raw[i] / sum;
    out.renormalized = std::move(renorm);
  }
  out.dictionary_digest = dict_.digest();
  out.backend = backend_.descriptor().name;
  out.text_digest = sha256_hex(body);
  return out;
}

std::string Estimator::cache_key(std::string_view text) const {
  return sha256_hex("emovec-vector-v1\n" + sha256_hex(trim(text)) + "\n" + dict_.digest() + "\n" +
                    backend_.descriptor().name + "\n" + config_.fingerprint());
}

EmotionVector emotion_vector(std::string_view text, const EmotionDictionary& dict,
                             const TailPrompt& prompt, const Backend& backend,
                             const VariantPolicy& policy) {
  EstimatorConfig config;
  config.prompt = prompt;
  config.policy = policy;
  return Estimator(dict, backend, std::move(config)).score(text);
}

std::vector<RankedEmotion> top_k(const EmotionVector& vec, const EmotionDictionary& dict,
                                 std::size_t k) {
  if (vec.scaled.size() != dict.size()) {
    throw ValidationError("top_k: vector length " + std::to_string(vec.scaled.size()) +
                          " does not match dictionary size " + std::to_string(dict.size()));
  }
  if (k < 1 || k > dict.size()) {
    throw ValidationError("top_k: k must be in [1, " + std::to_string(dict.size()) + "], got " +
                          std::to_string(k));
  }
  std::vector<std::size_t> order(dict.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (vec.scaled[a] != vec.scaled[b]) return vec.scaled[a] > vec.scaled[b];
                      return a < b;
                    });
  std::vector<RankedEmotion> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(RankedEmotion{dict[order[i]].word, vec.scaled[order[i]], order[i]});
  }
  return out;
}

Superposition superpose(std::span<const EmotionVector> vectors) {
  if (vectors.empty()) {
    throw ValidationError("superpose: no vectors");
  }
  const auto& first = vectors.front();
  Superposition out;
  out.mean.assign(first.scaled.size(), 0.0);
  out.overlay.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.dictionary_digest != first.dictionary_digest || v.scaled.size() != first.scaled.size()) {
      throw ValidationError("superpose: vectors come from different dictionaries");
    }
    for (std::size_t i = 0; i < v.scaled.size(); ++i) out.mean[i] += v.scaled[i];
    out.overlay.push_back(v.scaled);
  }
  const double n = static_cast<double>(vectors.size());
  for (double& m : out.mean) m /= n;
  return out;
}

}  // namespace emovec
