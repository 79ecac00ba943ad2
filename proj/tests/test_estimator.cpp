// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "emovec/errors.hpp"
#include "emovec/estimator.hpp"
#include "emovec/toy_backend.hpp"
#include "support/oracles.hpp"

using namespace emovec;

namespace {

DescriptorVariants variants_of(std::vector<std::vector<TokenId>> seqs) {
  DescriptorVariants dv;
  dv.variants = std::move(seqs);
  for (std::size_t i = 0; i < dv.variants.size(); ++i) dv.variant_labels.push_back("v" + std::to_string(i));
  return dv;
}

std::vector<std::size_t> argsort(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  return idx;
}

bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// Frozen from oracle::toy_sequence_probability (seed 7, vocab 64, text "good",
// default prompt, leading-space variants).
constexpr double kGoldenJoy = 4.1228645056389268e-12;
constexpr double kGoldenFear = 5.3598299794490565e-12;
constexpr double kGoldenCalm = 3.6791701850637597e-14;

}  // namespace

TEST_CASE("tail prompt rendering") {
  const TailPrompt prompt;
  CHECK(prompt.template_text() == "{text} Reading this makes me feel");
  CHECK(prompt.render("  Great book.\n") == "Great book. Reading this makes me feel");
  CHECK(TailPrompt::with_tail("This makes me").render("x") == "x This makes me");
  CHECK_THROWS_AS(TailPrompt("no placeholder"), ValidationError);
  CHECK_THROWS_AS(TailPrompt("{text} and {text}"), ValidationError);
}

TEST_CASE("word_probability: single token equals the distribution entry") {
  const auto toy = toy_backend(7, 16, 64);
  const std::vector<TokenId> ctx{1, 2, 3};
  const auto dist = toy->next_token_distribution(ctx);
  CHECK(word_probability(ctx, variants_of({{5}}), *toy) == dist.probs[5]);
}

TEST_CASE("word_probability: two-token chain matches exhaustive enumeration") {
  const std::size_t vocab = 16;
  const auto toy = toy_backend(7, vocab, 64);
  const std::vector<TokenId> ctx{4, 4, 2};
  const auto table = oracle::toy_two_step_table(7, ctx, vocab);
  long double total = 0.0L;
  for (std::size_t a = 0; a < vocab; ++a) {
    for (std::size_t b = 0; b < vocab; ++b) {
      total += table[a][b];
      const double got = word_probability(
          ctx, variants_of({{static_cast<TokenId>(a), static_cast<TokenId>(b)}}), *toy);
      CHECK(rel_close(got, table[a][b], 1e-12));
    }
  }
  CHECK(std::abs(static_cast<double>(total) - 1.0) <= 1e-9);
}

TEST_CASE("word_probability: disjoint variants add") {
  const auto toy = toy_backend(1, 16, 64);
  const std::vector<TokenId> ctx{7};
  const auto dist = toy->next_token_distribution(ctx);
  CHECK(word_probability(ctx, variants_of({{2}, {9}}), *toy) == dist.probs[2] + dist.probs[9]);
}

TEST_CASE("chain-rule consistency: all sequences of length <= 2 partition the mass") {
  // Every length-1 continuation plus every length-2 continuation of it
  // counts the same mass twice, so check each level separately.
  const std::size_t vocab = 8;
  const auto toy = toy_backend(5, vocab, 64);
  const std::vector<TokenId> ctx{1, 1};
  double level1 = 0.0;
  double level2 = 0.0;
  for (TokenId a = 0; a < static_cast<TokenId>(vocab); ++a) {
    level1 += word_probability(ctx, variants_of({{a}}), *toy);
    for (TokenId b = 0; b < static_cast<TokenId>(vocab); ++b) {
      level2 += word_probability(ctx, variants_of({{a, b}}), *toy);
    }
  }
  CHECK(std::abs(level1 - 1.0) <= 1e-9);
  CHECK(std::abs(level2 - 1.0) <= 1e-9);
}

TEST_CASE("emotion_vector: golden fixture from the per-descriptor oracle") {
  const auto toy = toy_backend(7, 64, 2048);
  const auto dict = EmotionDictionary::parse("joy\nfear\ncalm\n");
  const auto vec = emotion_vector("good", dict, TailPrompt{}, *toy, VariantPolicy{});
  REQUIRE(vec.size() == 3);
  CHECK(rel_close(vec.raw[0], kGoldenJoy, 1e-12));
  CHECK(rel_close(vec.raw[1], kGoldenFear, 1e-12));
  CHECK(rel_close(vec.raw[2], kGoldenCalm, 1e-12));
  CHECK(vec.scaled[1] == 1.0);
  CHECK(vec.scaled[0] == vec.raw[0] / vec.raw[1]);
  CHECK_FALSE(vec.truncated);
  CHECK(vec.backend == "toy:seed=7,vocab=64,ctx=2048");
  CHECK(vec.dictionary_digest == dict.digest());
  CHECK(vec.text_digest == sha256_hex("good"));

  // Trie scoring agrees bit-for-bit with word_probability.
  const auto ctx = toy->tokenizer().encode(TailPrompt{}.render("good"));
  const auto variants = expand_variants(dict, toy->tokenizer(), VariantPolicy{});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(vec.raw[i] == word_probability(ctx, variants[i], *toy));
  }
}

TEST_CASE("emotion_vector: singleton dictionary scales to [1.0]") {
  const auto toy = toy_backend(3, 64, 2048);
  const auto dict = EmotionDictionary::parse("joy\n");
  const auto vec = emotion_vector("anything at all", dict, TailPrompt{}, *toy, VariantPolicy{});
  CHECK(vec.scaled == std::vector<double>{1.0});
}

TEST_CASE("emotion_vector: bundled dictionary gives 271 entries") {
  const auto toy = toy_backend(7, 128, 2048);
  const auto vec = emotion_vector("Very disappointing.", bundled_dictionary(), TailPrompt{}, *toy,
                                  VariantPolicy{});
  CHECK(vec.raw.size() == 271);
  CHECK(vec.scaled.size() == 271);
  CHECK(*std::max_element(vec.scaled.begin(), vec.scaled.end()) == 1.0);
  double sum = 0.0;
  for (double r : vec.raw) {
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    sum += r;
  }
  CHECK(sum <= 1.0 + 1e-6);
}

TEST_CASE("emotion_vector errors") {
  const auto toy = toy_backend(3, 64, 2048);
  const auto dict = EmotionDictionary::parse("joy\n");
  CHECK_THROWS_AS(emotion_vector("   \n", dict, TailPrompt{}, *toy, VariantPolicy{}),
                  ValidationError);
  CHECK_THROWS_AS(max_scale(std::vector<double>{0.0, 0.0}), DegenerateDistributionError);
}

TEST_CASE("multi-variant policy sums variant probabilities") {
  const auto toy = toy_backend(9, 64, 2048);
  const auto dict = EmotionDictionary::parse("joy\nfear\n");
  const auto policy = VariantPolicy::parse("space,bare");
  const auto vec = emotion_vector("ok", dict, TailPrompt{}, *toy, policy);
  const auto ctx = toy->tokenizer().encode(TailPrompt{}.render("ok"));
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& w = dict[i].word;
    const double expected =
        oracle::toy_sequence_probability(9, ctx, toy->tokenizer().encode(" " + w), 64) +
        oracle::toy_sequence_probability(9, ctx, toy->tokenizer().encode(w), 64);
    CHECK(rel_close(vec.raw[i], expected, 1e-12));
  }
}

TEST_CASE("truncation keeps the tail of the prompt adjacent") {
  const std::size_t window = 40;
  const auto toy = toy_backend(2, 64, window);
  const auto dict = EmotionDictionary::parse("joy\ncalm\n");
  const Estimator est(dict, *toy);
  REQUIRE(est.longest_variant() == 5);

  const auto short_vec = est.score("ok");
  CHECK_FALSE(short_vec.truncated);

  const std::string long_text(200, 'x');
  const auto vec = est.score(long_text);
  CHECK(vec.truncated);
  auto ctx = toy->tokenizer().encode(TailPrompt{}.render(long_text));
  ctx.erase(ctx.begin(), ctx.end() - static_cast<std::ptrdiff_t>(window - 5));
  const auto variants = est.variants();
  CHECK(vec.raw[0] == word_probability(ctx, variants[0], *toy));
  CHECK(vec.raw[1] == word_probability(ctx, variants[1], *toy));
}

TEST_CASE("property: short texts are never truncated and score identically twice") {
  const auto toy = toy_backend(11, 64, 2048);
  const Estimator est(EmotionDictionary::parse("joy\nfear\ncalm\nawe\nself-pity\n"), *toy);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> ch('a', 'z');
  for (int trial = 0; trial < 20; ++trial) {
    std::string text(static_cast<std::size_t>(1 + trial * 5), ' ');
    for (auto& c : text) c = static_cast<char>(ch(rng));
    const auto a = est.score(text);
    const auto b = est.score(text);
    CHECK_FALSE(a.truncated);
    CHECK(a == b);
    CHECK(argsort(a.raw) == argsort(a.scaled));
  }
}

TEST_CASE("property: permuting the dictionary permutes the vector") {
  const auto toy = toy_backend(4, 64, 2048);
  std::vector<std::string> words{"joy", "fear", "calm", "awe", "grief", "hope"};
  const auto base = emotion_vector("The kettle broke.", EmotionDictionary::from_words(words),
                                   TailPrompt{}, *toy, VariantPolicy{});
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    auto shuffled = words;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto vec = emotion_vector("The kettle broke.", EmotionDictionary::from_words(shuffled),
                                    TailPrompt{}, *toy, VariantPolicy{});
    for (std::size_t i = 0; i < shuffled.size(); ++i) {
      const auto j = static_cast<std::size_t>(
          std::find(words.begin(), words.end(), shuffled[i]) - words.begin());
      CHECK(vec.raw[i] == base.raw[j]);
      CHECK(vec.scaled[i] == base.scaled[j]);
    }
  }
}

TEST_CASE("trie scoring queries each shared prefix once") {
  const auto toy = toy_backend(1, 64, 2048);
  CountingBackend counted(*toy);
  // " joy" and " joyful" share " joy"; " calm" shares only " ".
  const Estimator est(EmotionDictionary::parse("joy\njoyful\ncalm\n"), counted);
  est.score("fine");
  // nodes with children: root, " ", " j", " jo", " joy", " joyf", " joyfu", " c", " ca", " cal"
  CHECK(counted.calls() == 10);
}

TEST_CASE("top_k ordering, ties and bounds") {
  const auto dict = EmotionDictionary::parse("a\nb\nc\nd\n");
  EmotionVector v;
  v.scaled = {0.5, 1.0, 0.5, 0.25};
  const auto top = top_k(v, dict, 3);
  REQUIRE(top.size() == 3);
  CHECK(top[0].word == "b");
  CHECK(top[1].word == "a");
  CHECK(top[2].word == "c");

  const auto all = top_k(v, dict, 4);
  CHECK(std::is_sorted(all.begin(), all.end(),
                       [](const auto& x, const auto& y) { return x.value > y.value; }));

  v.scaled = {1.0, 1.0, 1.0, 1.0};
  const auto ties = top_k(v, dict, 3);
  CHECK(ties[0].word == "a");
  CHECK(ties[1].word == "b");
  CHECK(ties[2].word == "c");

  CHECK_THROWS_AS(top_k(v, dict, 0), ValidationError);
  CHECK_THROWS_AS(top_k(v, dict, 5), ValidationError);
}

TEST_CASE("property: top_k is invariant under positive rescaling of raw") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> c(1e-6, 1e6);
  const auto dict = bundled_dictionary();
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> raw(dict.size());
    for (auto& r : raw) r = std::floor(u(rng) * 20.0) / 20.0;  // plenty of ties
    raw[0] = 1.0;
    EmotionVector a;
    a.raw = raw;
    a.scaled = max_scale(raw);
    const double k = c(rng);
    for (auto& r : raw) r *= k;
    EmotionVector b;
    b.raw = raw;
    b.scaled = max_scale(raw);
    const auto ta = top_k(a, dict, 10);
    const auto tb = top_k(b, dict, 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(ta[i].index == tb[i].index);
  }
}

TEST_CASE("superpose") {
  EmotionVector x;
  x.scaled = {1.0, 0.0};
  x.dictionary_digest = "d";
  EmotionVector y;
  y.scaled = {0.0, 1.0};
  y.dictionary_digest = "d";

  CHECK(superpose(std::vector{x}).mean == x.scaled);
  const auto both = superpose(std::vector{x, y});
  CHECK(both.mean == std::vector<double>{0.5, 0.5});
  CHECK(both.overlay.size() == 2);

  y.dictionary_digest = "other";
  CHECK_THROWS_AS(superpose(std::vector{x, y}), ValidationError);
  CHECK_THROWS_AS(superpose(std::vector<EmotionVector>{}), ValidationError);
}

TEST_CASE("superpose of 50 toy vectors matches a streaming mean") {
  const auto toy = toy_backend(7, 64, 2048);
  const Estimator est(EmotionDictionary::parse("joy\nfear\ncalm\nawe\ngrief\nhope\nmad\n"), *toy);
  std::vector<EmotionVector> vecs;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 50; ++i) {
    vecs.push_back(est.score("review number " + std::to_string(i)));
    rows.push_back(vecs.back().scaled);
  }
  const auto sup = superpose(vecs);
  const auto expected = oracle::streaming_mean(rows);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(std::abs(sup.mean[i] - expected[i]) <= 1e-12);
  }
}

TEST_CASE("vector JSON: 17 digits, exact round trip, stable bytes") {
  const auto toy = toy_backend(7, 64, 2048);
  EstimatorConfig config;
  config.renormalize = true;
  const Estimator est(EmotionDictionary::parse("joy\nfear\ncalm\n"), *toy, config);
  const auto v = est.score("good");
  const auto text = to_json(v);
  CHECK(text.rfind("{\"dictionary_digest\":", 0) == 0);
  CHECK(text.find("\"truncated\":false") != std::string::npos);
  CHECK(text.find("\"renormalized\":[") != std::string::npos);
  const auto back = emotion_vector_from_json(text);
  CHECK(back == v);
  CHECK(to_json(back) == text);
  double s = 0.0;
  for (double r : *v.renormalized) s += r;
  CHECK(std::abs(s - 1.0) <= 1e-12);

  CHECK_THROWS_AS(emotion_vector_from_json("{}"), ValidationError);
  CHECK_THROWS_AS(emotion_vector_from_json("[1,2]"), ValidationError);
}

TEST_CASE("cache key depends on every part of the configuration") {
  const auto toy7 = toy_backend(7, 64, 2048);
  const auto toy8 = toy_backend(8, 64, 2048);
  const auto dict = EmotionDictionary::parse("joy\nfear\n");
  const Estimator a(dict, *toy7);
  CHECK(a.cache_key("text") == Estimator(dict, *toy7).cache_key("  text "));
  CHECK(a.cache_key("text") != a.cache_key("other"));
  CHECK(a.cache_key("text") != Estimator(dict, *toy8).cache_key("text"));
  CHECK(a.cache_key("text") !=
        Estimator(EmotionDictionary::parse("fear\njoy\n"), *toy7).cache_key("text"));
  EstimatorConfig cfg;
  cfg.policy = VariantPolicy::parse("space,bare");
  CHECK(a.cache_key("text") != Estimator(dict, *toy7, cfg).cache_key("text"));
  EstimatorConfig tail;
  tail.prompt = TailPrompt::with_tail("This makes me");
  CHECK(a.cache_key("text") != Estimator(dict, *toy7, tail).cache_key("text"));
}
