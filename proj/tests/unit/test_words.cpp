#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "symdyn/words.hpp"

using namespace symdyn;

namespace {

Dyadic d(const char* text) { return *Dyadic::parse(text); }

oracle::RWord as_rational(const RealWord& x) {
  oracle::RWord out;
  for (const auto& v : x) out.push_back(v.to_rational());
  return out;
}

}  // namespace

TEST(Dyadic, ParsesEveryLiteralForm) {
  EXPECT_EQ(d("3"), Dyadic(3));
  EXPECT_EQ(d("3/2^2"), Dyadic::from_parts(3, 2));
  EXPECT_EQ(d("3/4"), Dyadic::from_parts(3, 2));
  EXPECT_EQ(d("0.375"), Dyadic::from_parts(3, 3));
  EXPECT_EQ(d("-0.5"), -Dyadic::from_parts(1, 1));
  EXPECT_FALSE(Dyadic::parse("1/3"));
  EXPECT_FALSE(Dyadic::parse("0.1"));
  EXPECT_FALSE(Dyadic::parse("abc"));
}

TEST(Dyadic, NormalizesAndCompares) {
  EXPECT_EQ(Dyadic::from_parts(4, 3), Dyadic::from_parts(1, 1));
  EXPECT_EQ(Dyadic::from_parts(4, 3).exponent(), 1u);
  EXPECT_LT(d("1/2^3"), d("1/2^2"));
  EXPECT_EQ((d("3/4") + d("1/4")), Dyadic(1));
  EXPECT_EQ((d("3/4") * d("1/2")), d("3/8"));
  EXPECT_EQ(d("3/4").scaled(-2), d("3/16"));
  EXPECT_DOUBLE_EQ(d("5/2^7").to_double(), 5.0 / 128);
}

TEST(Dyadic, FromDoubleIsExact) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int i = 0; i < 200; ++i) {
    double v = u(rng);
    EXPECT_EQ(Dyadic::from_double(v).to_double(), v);
    EXPECT_EQ(Dyadic::from_double(v).to_rational(), mpq_class(v));
  }
}

TEST(WeightedNorm, MatchesTheDefinition) {
  RealWord x = {d("1/2"), Dyadic(1)};
  EXPECT_EQ(weighted_norm(x), d("1/2"));  // 1/4 + 1/4
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    RealWord w;
    for (int i = 0; i < 20; ++i) w.push_back(Dyadic::from_parts(rng() % 1024, 10));
    EXPECT_EQ(weighted_norm(w).to_rational(), oracle::norm(as_rational(w)));
  }
}

TEST(WeightedNorm, RejectsDiscreteWords) {
  Word w = std::vector<std::string>{"a", "b"};
  EXPECT_THROW(weighted_norm(w), WordError);
}

TEST(WeightedDistance, IsAMetricOnSamples) {
  std::mt19937_64 rng(11);
  auto random_word = [&] {
    std::vector<double> w(12);
    for (auto& v : w) v = static_cast<double>(rng() % 256) / 256;
    return w;
  };
  for (int i = 0; i < 100; ++i) {
    auto a = random_word(), b = random_word(), c = random_word();
    EXPECT_EQ(weighted_distance(a, a), 0.0);
    EXPECT_EQ(weighted_distance(a, b), weighted_distance(b, a));
    EXPECT_LE(weighted_distance(a, c), weighted_distance(a, b) + weighted_distance(b, c) + 1e-15);
    EXPECT_LE(weighted_distance(a, b), 1.0);
  }
}

TEST(Quantize, FloorsOntoTheGrid) {
  std::vector<double> a = {0.0, 0.05, 0.1, 0.75, 1.0};
  auto q = quantize_indices(std::span<const double>(a), 0.25);
  EXPECT_EQ(q, (std::vector<std::int64_t>{0, 0, 0, 3, 4}));
  auto f = quantize(std::span<const double>(a), 0.25);
  EXPECT_DOUBLE_EQ(f[3], 0.75);
  EXPECT_THROW(quantize_indices(std::span<const double>(a), 0.0), std::invalid_argument);
}

TEST(Quantize, WithinEpsOfTheInput) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> a(500);
  for (auto& v : a) v = u(rng);
  auto q = quantize(std::span<const double>(a), 0.1);
  EXPECT_LT(sup_distance(a, q), 0.1);
}

TEST(Shift, DropsAndSaturates) {
  RealWord x = {Dyadic(1), d("1/2"), d("1/4")};
  EXPECT_EQ(shift(x, 1), (RealWord{d("1/2"), d("1/4")}));
  EXPECT_TRUE(shift(x, 5).empty());
  EXPECT_EQ(shift(std::string("abc"), 2), "c");
}

TEST(Streams, PrefixIsRepeatable) {
  PeriodicStream s({d("0.9375"), d("0.125")});
  auto a = prefix(s, 5);
  auto b = prefix(s, 5);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[4], d("0.9375"));
  WordStream w({Dyadic(1)});
  EXPECT_EQ(take(w, 10).size(), 1u);
  EXPECT_THROW(PeriodicStream(RealWord{}), std::invalid_argument);
}

TEST(WordFiles, RoundTrip) {
  auto words = read_words("# comment\n1/2^1 1 0.25\n\na b c\n");
  ASSERT_EQ(words.size(), 2u);
  EXPECT_EQ(std::get<RealWord>(words[0]), (RealWord{d("1/2"), Dyadic(1), d("1/4")}));
  EXPECT_EQ(std::get<std::vector<std::string>>(words[1]), (std::vector<std::string>{"a", "b", "c"}));
  for (const auto& w : words) EXPECT_EQ(parse_word_line(format_word(w)), w);
}

TEST(WordFiles, RejectsMixedLines) {
  EXPECT_THROW(parse_word_line("0.5 a"), WordError);
  EXPECT_EQ(std::get<std::vector<std::string>>(parse_word_line("0 1", SymbolKind::discrete)).size(), 2u);
  EXPECT_THROW(parse_word_line("a", SymbolKind::real), WordError);
}
