#include <doctest.h>

#include <random>

#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "alp/textnorm.hpp"

using alp::textnorm::extract_year;
using alp::textnorm::fold;
using alp::textnorm::jaccard;
using alp::textnorm::token_set;
using alp::textnorm::tokenize;
using Tokens = std::vector<std::string>;

namespace {

std::string random_utf8(std::mt19937& rng, int max_len) {
  // Mix of ASCII, Latin-1/Latin Extended, combining marks, Greek, CJK and
  // a few case-mapping oddities.
  static const std::vector<std::pair<UChar32, UChar32>> ranges = {
      {0x20, 0x7e},   {0xa0, 0x24f},  {0x300, 0x36f}, {0x370, 0x3ff},
      {0x400, 0x4ff}, {0x1e00, 0x1eff}, {0x2100, 0x214f}, {0x4e00, 0x4e40},
      {0x130, 0x131}, {0xfb00, 0xfb06}};
  std::uniform_int_distribution<int> len_dist(0, max_len);
  std::uniform_int_distribution<std::size_t> range_dist(0, ranges.size() - 1);
  icu::UnicodeString s;
  const int len = len_dist(rng);
  for (int i = 0; i < len; ++i) {
    const auto& [lo, hi] = ranges[range_dist(rng)];
    std::uniform_int_distribution<UChar32> cp(lo, hi);
    s.append(cp(rng));
  }
  std::string out;
  s.toUTF8String(out);
  return out;
}

bool token_is_clean(const std::string& token) {
  if (token.empty()) return false;
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(token);
  for (int32_t i = 0; i < u.length();) {
    UChar32 c = u.char32At(i);
    if (!(u_isalpha(c) || u_isdigit(c))) return false;
    if ((U_GET_GC_MASK(c) & U_GC_M_MASK) != 0) return false;
    if (u_tolower(c) != c) return false;
    i += U16_LENGTH(c);
  }
  return true;
}

}  // namespace

TEST_CASE("fold strips diacritics and lowercases") {
  CHECK(fold("Doré") == "dore");
  CHECK(fold("L'ingénieur") == "l'ingenieur");
  CHECK(fold("abc") == "abc");
  CHECK(fold("CÉZANNE") == "cezanne");
  // Dotted capital I lowercases to i + U+0307, which must be stripped too.
  CHECK(fold("\xC4\xB0stanbul") == "istanbul");
  CHECK(fold("") == "");
}

TEST_CASE("tokenize splits on non-alphanumerics, apostrophes included") {
  CHECK(tokenize("Du dessin et de la couleur") == Tokens{"du", "dessin", "et", "de", "la", "couleur"});
  CHECK(tokenize("") == Tokens{});
  CHECK(tokenize("19e siècle") == Tokens{"19e", "siecle"});
  CHECK(tokenize("L'ingénieur") == Tokens{"l", "ingenieur"});
  CHECK(tokenize("Fables. Avec les dessins de Gustave Doré") ==
        Tokens{"fables", "avec", "les", "dessins", "de", "gustave", "dore"});
  CHECK(tokenize("  --  ") == Tokens{});
  CHECK(tokenize("Peinture -- France") == Tokens{"peinture", "france"});
}

TEST_CASE("token_set sorts and de-duplicates") {
  CHECK(token_set("de la Manche de la") == Tokens{"de", "la", "manche"});
}

TEST_CASE("jaccard over token sets") {
  CHECK(jaccard({"a", "b"}, {"a", "b"}) == 1.0);
  CHECK(jaccard({}, {}) == 0.0);
  CHECK(jaccard({"a"}, {}) == 0.0);
  // 5 shared of 8 distinct.
  CHECK(jaccard(token_set("L'ingénieur Hidalgo Don Quichotte de la Manche"),
                token_set("Don Quichotte de la Manche")) == doctest::Approx(0.625));
}

TEST_CASE("extract_year takes the first four-digit run") {
  CHECK(extract_year("1885") == 1885);
  CHECK(extract_year("Paris, 1869") == 1869);
  CHECK(extract_year("vers 1868-1869") == 1868);
  CHECK(extract_year("[18..]") == std::nullopt);
  CHECK(extract_year("s.d.") == std::nullopt);
  CHECK(extract_year("123") == std::nullopt);
}

TEST_CASE("property: fold is idempotent and tokens are clean") {
  std::mt19937 rng(20190101);
  for (int i = 0; i < 2000; ++i) {
    const std::string s = random_utf8(rng, 24);
    const std::string once = fold(s);
    CAPTURE(s);
    CHECK(fold(once) == once);
    const auto tokens = tokenize(s);
    CHECK(tokens == tokenize(once));
    for (const auto& t : tokens) CHECK(token_is_clean(t));
  }
}
