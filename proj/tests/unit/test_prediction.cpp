#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "symdyn/prediction.hpp"

using namespace symdyn;

namespace {

const Alphabet kBinary = Alphabet::from_chars("01");

DiscreteWord enc(const char* s) { return kBinary.encode(s); }

// Number of distinct length-k continuations of each length-m word, from a
// long sample of the Fibonacci word.
std::map<std::string, std::set<std::string>> sample_futures(std::size_t m, std::size_t k) {
  std::string w = oracle::fibonacci_word(200000);
  std::map<std::string, std::set<std::string>> out;
  for (std::size_t i = 0; i + m + k <= w.size(); ++i) out[w.substr(i, m)].insert(w.substr(i + m, k));
  return out;
}

}  // namespace

TEST(Extensions, GoldenMean) {
  ForbiddenWordShift x(kBinary, {enc("11")});
  EXPECT_EQ(extensions(x, enc("1"), 1), (std::vector<DiscreteWord>{enc("0")}));
  EXPECT_EQ(extensions(x, enc("0"), 2).size(), 3u);
  EXPECT_THROW(extensions(x, enc("11"), 1), NotInLanguage);
}

TEST(PastBranching, FibonacciFixtures) {
  SturmianShift fib(Rational::make(233, 610));
  auto p = past_branching(fib, 3, 4);
  EXPECT_EQ(p.max_extensions, 3u);
  EXPECT_EQ(kBinary.render(p.argmax_past), "010");
  EXPECT_EQ(past_branching(fib, 3, 2).max_extensions, 2u);
  std::set<std::string> futures;
  for (const auto& u : extensions(fib, enc("010"), 4)) futures.insert("010" + kBinary.render(u));
  EXPECT_EQ(futures, (std::set<std::string>{"0100100", "0100101", "0101001"}));
}

TEST(PastBranching, MatchesSampledFutures) {
  SturmianShift fib(Rational::make(233, 610));
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t k = 1; k <= 5; ++k) {
      auto sampled = sample_futures(m, k);
      std::size_t best = 0;
      std::map<std::size_t, std::size_t> hist;
      for (const auto& [past, fut] : sampled) {
        best = std::max(best, fut.size());
        ++hist[fut.size()];
      }
      auto p = past_branching(fib, m, k);
      EXPECT_EQ(p.max_extensions, best) << m << "," << k;
      EXPECT_EQ(p.histogram, hist) << m << "," << k;
    }
  }
}

TEST(PastBranching, SturmianEventuallyAtMostTwo) {
  SturmianShift fib(Rational::make(377, 610));
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_LE(past_branching(fib, 24, k).max_extensions, 2u) << k;
}

TEST(PastBranching, FullShiftKeepsBranching) {
  FullShift x(kBinary);
  EXPECT_EQ(past_branching(x, 4, 3).max_extensions, 8u);
}

TEST(Periodicity, PeriodicUnionsAreRecognized) {
  for (auto periods : std::vector<std::vector<const char*>>{{"01"}, {"001"}, {"0", "1"}, {"011", "0"}}) {
    std::vector<DiscreteWord> enc_periods;
    for (auto p : periods) enc_periods.push_back(enc(p));
    PeriodicUnion x(kBinary, enc_periods);
    std::size_t longest = 0;
    for (const auto& p : enc_periods) longest = std::max(longest, p.size());
    for (std::size_t order = longest; order <= longest + 2; ++order) {
      auto d = is_periodic_union(sft_approximation(x, order));
      EXPECT_TRUE(d.periodic_union) << periods[0] << " order " << order;
      EXPECT_FALSE(d.witness);
    }
  }
}

TEST(Periodicity, PositiveEntropyShiftsAreNot) {
  ForbiddenWordShift golden(kBinary, {enc("11")});
  FullShift full(kBinary);
  for (const LanguageOracle* x : {static_cast<const LanguageOracle*>(&golden), static_cast<const LanguageOracle*>(&full)}) {
    for (std::size_t order = 1; order <= 3; ++order) {
      auto g = sft_approximation(*x, order);
      auto d = is_periodic_union(g);
      EXPECT_FALSE(d.periodic_union);
      ASSERT_TRUE(d.witness);
      ASSERT_GE(d.witness_extensions.size(), 2u);
      for (const auto& u : d.witness_extensions) EXPECT_TRUE(g.contains(*d.witness + u));
    }
  }
}

TEST(Predictor, FibonacciEmptyPast) {
  SturmianShift fib(Rational::make(233, 610));
  auto r = find_predictor_word(fib, "", 1, 6);
  ASSERT_TRUE(r.word);
  // The result must force its continuation; "00" (followed by 1) would too.
  auto ext = extensions(fib, *r.word, 1);
  EXPECT_EQ(ext.size(), 1u);
  EXPECT_EQ(ext.front(), r.forced);
  EXPECT_EQ(extensions(fib, enc("00"), 1), (std::vector<DiscreteWord>{enc("1")}));
}

TEST(Predictor, PeriodicOrbit) {
  PeriodicUnion x(kBinary, {enc("01")});
  auto r = find_predictor_word(x, enc("0"), 1, 4);
  ASSERT_TRUE(r.word);
  EXPECT_TRUE(r.word->empty());
  EXPECT_EQ(r.forced, enc("1"));
}

TEST(Predictor, FullShiftHasNone) {
  FullShift x(kBinary);
  auto r = find_predictor_word(x, enc("0"), 1, 8);
  EXPECT_FALSE(r.word);
}

TEST(Predictor, LongerHorizons) {
  SturmianShift fib(Rational::make(377, 610));
  for (std::size_t k = 1; k <= 6; ++k) {
    auto r = find_predictor_word(fib, enc("01"), k, 20);
    ASSERT_TRUE(r.word) << k;
    DiscreteWord ba = *r.word + enc("01");
    EXPECT_EQ(extensions(fib, ba, k).size(), 1u);
    EXPECT_EQ(r.horizon, ba.size() + k);
  }
}

TEST(Forcing, FibonacciFixtures) {
  SturmianShift fib(Rational::make(233, 610));
  auto one = find_forcing_word(fib, enc("1"), 8);
  ASSERT_TRUE(one.word);
  EXPECT_EQ(extensions(fib, *one.word, 1), (std::vector<DiscreteWord>{enc("1")}));
  auto zero = find_forcing_word(fib, enc("0"), 12);
  ASSERT_TRUE(zero.word);
  EXPECT_FALSE(fib.contains(enc("11")) && *zero.word == enc("11"));
  // Check against a long sample: every occurrence of v is followed by u.
  std::string w = oracle::fibonacci_word(100000);
  std::string v = kBinary.render(*zero.word);
  for (std::size_t at = w.find(v); at != std::string::npos && at + v.size() < w.size(); at = w.find(v, at + 1))
    EXPECT_EQ(w[at + v.size()], '0');
}

TEST(Forcing, PeriodThree) {
  PeriodicUnion x(kBinary, {enc("001")});
  auto r = find_forcing_word(x, enc("001"), 4);
  ASSERT_TRUE(r.word);
  EXPECT_EQ(*r.word, enc("1"));
}

TEST(Forcing, FullShiftHasNone) {
  FullShift x(kBinary);
  EXPECT_FALSE(find_forcing_word(x, enc("1"), 6).word);
}
