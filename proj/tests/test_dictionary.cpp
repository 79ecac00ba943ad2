// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "emovec/dictionary.hpp"
#include "emovec/errors.hpp"
#include "emovec/io.hpp"
#include "emovec/toy_backend.hpp"

using namespace emovec;

namespace {

// Tokenizes nothing, to exercise the dropped-variant path.
class EmptyTokenizer : public Tokenizer {
 public:
  std::size_t vocab_size() const override { return 8; }
  std::vector<TokenId> encode(std::string_view) const override { return {}; }
  std::string decode(std::span<const TokenId>) const override { return {}; }
};

// Drops every variant that starts with a space.
class NoSpaceTokenizer : public CharTokenizer {
 public:
  NoSpaceTokenizer() : CharTokenizer(128) {}
  std::vector<TokenId> encode(std::string_view text) const override {
    if (!text.empty() && text.front() == ' ') return {};
    return CharTokenizer::encode(text);
  }
};

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  auto p = std::filesystem::temp_directory_path() / ("emovec_dict_" + name);
  write_file_atomic(p, contents);
  return p;
}

}  // namespace

TEST_CASE("two-line file loads in file order") {
  const auto path = temp_file("two.txt", "joy\nfear\n");
  const auto dict = load_dictionary(path);
  REQUIRE(dict.size() == 2);
  CHECK(dict[0].word == "joy");
  CHECK(dict[1].word == "fear");
  CHECK(dict[1].index == 1);
  CHECK(dict.digest().size() == 64);
}

TEST_CASE("bundled dictionary has 271 sorted descriptors") {
  const auto dict = bundled_dictionary();
  CHECK(dict.size() == kBundledDictionarySize);
  const auto words = dict.words();
  CHECK(std::is_sorted(words.begin(), words.end()));
  CHECK(dict.find("annoyed").has_value());
  CHECK(dict.find("anticipating").has_value());
  CHECK_FALSE(dict.find("annoyed anticipating").has_value());
  CHECK(dict.find("bitter sweetness").has_value());
  CHECK(dict.find("self-pity").has_value());
  CHECK(dict.find("wrath").has_value());
  CHECK(dict.find("aggressive").value() < dict.find("agony").value());
}

TEST_CASE("duplicate word reports the word and both lines") {
  try {
    EmotionDictionary::parse("joy\n# comment\n\nJoy\n", "dup.txt");
    FAIL("expected duplicate error");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("'joy'") != std::string::npos);
    CHECK(msg.find("lines 1 and 4") != std::string::npos);
  }
}

TEST_CASE("missing and empty files are errors") {
  CHECK_THROWS_AS(load_dictionary("/definitely/not/here.txt"), ValidationError);
  const auto empty = temp_file("empty.txt", "# only a comment\n\n   \n");
  CHECK_THROWS_AS(load_dictionary(empty), ValidationError);
}

TEST_CASE("normalization trims, collapses whitespace and lowercases") {
  CHECK(normalize_descriptor("  Bitter \t  Sweetness \r") == "bitter sweetness");
  CHECK(normalize_descriptor("Self-Pity") == "self-pity");
  const auto dict = EmotionDictionary::parse("  JOY  \n\tMixed    Up\n");
  CHECK(dict.words() == std::vector<std::string>{"joy", "mixed up"});
}

TEST_CASE("load, serialize, load round-trips including digest") {
  std::mt19937_64 rng(11);
  auto words = bundled_dictionary().words();
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(words.begin(), words.end(), rng);
    words.resize(10 + trial * 30);
    const auto a = EmotionDictionary::from_words(words);
    const auto path = temp_file("rt.txt", a.serialize());
    const auto b = load_dictionary(path);
    CHECK(a == b);
    CHECK(a.digest() == b.digest());
    words = bundled_dictionary().words();
  }
}

TEST_CASE("digest depends on order") {
  const auto a = EmotionDictionary::parse("joy\nfear\n");
  const auto b = EmotionDictionary::parse("fear\njoy\n");
  CHECK(a.digest() != b.digest());
}

TEST_CASE("default policy: one leading-space variant from the tokenizer") {
  const CharTokenizer tok(64);
  const auto dict = EmotionDictionary::parse("joy\n");
  const auto v = expand_variants(dict, tok, VariantPolicy{});
  REQUIRE(v.size() == 1);
  REQUIRE(v[0].variants.size() == 1);
  CHECK(v[0].variant_labels[0] == " joy");
  CHECK(v[0].variants[0].size() == 4);
  CHECK(tok.decode(v[0].variants[0]) == " joy");
}

TEST_CASE("space and bare policy gives two distinct sequences") {
  const CharTokenizer tok(64);
  const auto dict = EmotionDictionary::parse("joy\n");
  const auto v = expand_variants(dict, tok, VariantPolicy::parse("space,bare"));
  REQUIRE(v[0].variants.size() == 2);
  CHECK(v[0].variants[0] != v[0].variants[1]);
  CHECK(v[0].variant_labels == std::vector<std::string>{" joy", "joy"});
}

TEST_CASE("capitalized variant") {
  const CharTokenizer tok(128);
  const auto dict = EmotionDictionary::parse("self-pity\n");
  const auto v = expand_variants(dict, tok, VariantPolicy::parse("cap"));
  CHECK(v[0].variant_labels == std::vector<std::string>{" Self-pity"});
}

TEST_CASE("all variants empty is an error; partial drop is reported") {
  const auto dict = EmotionDictionary::parse("joy\n");
  CHECK_THROWS_AS(expand_variants(dict, EmptyTokenizer{}, VariantPolicy{}), ValidationError);

  std::vector<std::string> dropped;
  const auto v = expand_variants(dict, NoSpaceTokenizer{}, VariantPolicy::parse("space,bare"),
                                 &dropped);
  REQUIRE(v[0].variants.size() == 1);
  CHECK(v[0].variant_labels[0] == "joy");
  CHECK(dropped.size() == 1);
}

TEST_CASE("expand_variants is deterministic and covers every descriptor once") {
  const CharTokenizer tok(96);
  const auto dict = bundled_dictionary();
  const auto policy = VariantPolicy::parse("space,bare,cap");
  const auto a = expand_variants(dict, tok, policy);
  const auto b = expand_variants(dict, tok, policy);
  CHECK(a == b);
  REQUIRE(a.size() == dict.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].descriptor_index == i);
    for (const auto& seq : a[i].variants) {
      CHECK_FALSE(seq.empty());
      for (TokenId t : seq) CHECK(static_cast<std::size_t>(t) < tok.vocab_size());
    }
  }
}

TEST_CASE("policy parsing") {
  CHECK(VariantPolicy::parse("space").to_string() == "space");
  CHECK(VariantPolicy::parse("cap, bare").to_string() == "bare,cap");
  CHECK_THROWS_AS(VariantPolicy::parse("upper"), ValidationError);
  CHECK_THROWS_AS(VariantPolicy::parse(""), ValidationError);
}
