#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "symdyn/entropy.hpp"
#include "symdyn/subshifts.hpp"
#include "symdyn/systems.hpp"

using namespace symdyn;

namespace {

std::vector<std::string> rendered(const LanguageOracle& x, std::size_t n) {
  std::vector<std::string> out;
  for (const auto& w : x.words(n, default_enumeration_cap())) out.push_back(x.alphabet().render(w));
  return out;
}

std::vector<std::string> sorted(std::set<std::string> s) { return {s.begin(), s.end()}; }

const Alphabet kBinary = Alphabet::from_chars("01");

}  // namespace

TEST(Alphabet, EncodeRenderRoundTrip) {
  auto w = kBinary.encode("0110");
  EXPECT_EQ(w.size(), 4u);
  EXPECT_EQ(static_cast<Label>(w[1]), 1);
  EXPECT_EQ(kBinary.render(w), "0110");
  EXPECT_THROW(kBinary.encode("012"), std::invalid_argument);
  Alphabet multi({"ab", "c"});
  EXPECT_FALSE(multi.single_char());
  EXPECT_EQ(multi.render(multi.encode(std::vector<std::string>{"ab", "c"})), "ab c");
}

TEST(Alphabet, ProductLabels) {
  auto p = Alphabet::product(kBinary, Alphabet::from_chars("xyz"));
  EXPECT_EQ(p.size(), 6u);
  EXPECT_EQ(p.token(4), "(1,y)");
}

TEST(FullShift, LanguageIsEverything) {
  FullShift x(kBinary);
  EXPECT_EQ(rendered(x, 2), (std::vector<std::string>{"00", "01", "10", "11"}));
  EXPECT_EQ(rendered(x, 7), oracle::all_words("01", 7));
  EXPECT_TRUE(x.contains(kBinary.encode("0101")));
}

TEST(ForbiddenWords, GoldenMeanMatchesBruteForce) {
  ForbiddenWordShift x(kBinary, {kBinary.encode("11")});
  EXPECT_EQ(rendered(x, 3), (std::vector<std::string>{"000", "001", "010", "100", "101"}));
  for (std::size_t n = 1; n <= 12; ++n) EXPECT_EQ(rendered(x, n), oracle::avoiding("01", n, {"11"})) << n;
}

TEST(ForbiddenWords, LongerConstraints) {
  Alphabet abc = Alphabet::from_chars("abc");
  std::vector<std::string> forbid = {"aa", "bcb", "cab"};
  std::vector<DiscreteWord> enc;
  for (const auto& f : forbid) enc.push_back(abc.encode(f));
  ForbiddenWordShift x(abc, enc);
  for (std::size_t n = 1; n <= 7; ++n) {
    // The brute-force filter also keeps words that cannot extend forever;
    // the shift keeps only the extendable ones.
    std::vector<std::string> extendable;
    auto longer = oracle::avoiding("abc", n + 8, forbid);
    std::set<std::string> fronts;
    for (const auto& w : longer) fronts.insert(w.substr(4, n));
    EXPECT_EQ(rendered(x, n), sorted(fronts)) << n;
  }
}

TEST(ForbiddenWords, EmptyWhenEverythingIsForbidden) {
  ForbiddenWordShift x(kBinary, {kBinary.encode("0"), kBinary.encode("1")});
  EXPECT_TRUE(x.words(1, 16).empty());
  EXPECT_TRUE(x.graph().empty());
  EXPECT_THROW(sft_entropy_exact(x.graph()), EmptySubshift);
}

TEST(Periodic, CyclicFactors) {
  PeriodicUnion x(kBinary, {kBinary.encode("001")});
  EXPECT_EQ(rendered(x, 2), (std::vector<std::string>{"00", "01", "10"}));
  EXPECT_EQ(rendered(x, 5), sorted(oracle::cyclic_factor_set("001", 5)));
  PeriodicUnion two(kBinary, {kBinary.encode("01"), kBinary.encode("0")});
  EXPECT_EQ(rendered(two, 3), (std::vector<std::string>{"000", "010", "101"}));
}

TEST(Sturmian, FibonacciConvergentHasComplexityNPlusOne) {
  SturmianShift x(Rational::make(377, 610));
  for (std::size_t n = 1; n <= 30; ++n) EXPECT_EQ(x.words(n, 1u << 20).size(), n + 1) << n;
}

TEST(Sturmian, AgreesWithTheIrrationalMechanicalWord) {
  long double golden = (std::sqrt(5.0L) - 1) / 2;
  std::string w = oracle::mechanical_word(golden, 0.0L, 200000);
  SturmianShift x(Rational::make(377, 610));
  for (std::size_t n = 1; n <= 30; ++n) EXPECT_EQ(rendered(x, n), sorted(oracle::factor_set(w, n))) << n;
}

TEST(Sturmian, FixtureSlopeMatchesTheFibonacciWord) {
  std::string w = oracle::fibonacci_word(100000);
  SturmianShift x(Rational::make(233, 610));
  EXPECT_EQ(rendered(x, 3), (std::vector<std::string>{"001", "010", "100", "101"}));
  for (std::size_t n = 1; n <= 25; ++n) EXPECT_EQ(rendered(x, n), sorted(oracle::factor_set(w, n))) << n;
}

TEST(Substitution, FibonacciSubstitution) {
  SubstitutionShift x(kBinary, {kBinary.encode("01"), kBinary.encode("0")}, 0);
  std::string w = oracle::fibonacci_word(50000);
  for (std::size_t n = 1; n <= 20; ++n) EXPECT_EQ(rendered(x, n), sorted(oracle::factor_set(w, n))) << n;
}

TEST(Substitution, ThueMorse) {
  SubstitutionShift x(kBinary, {kBinary.encode("01"), kBinary.encode("10")}, 0);
  std::string t = "0";
  while (t.size() < 1 << 16) {
    std::string next;
    for (char c : t) next += c == '0' ? "01" : "10";
    t = next;
  }
  for (std::size_t n = 1; n <= 16; ++n) EXPECT_EQ(rendered(x, n), sorted(oracle::factor_set(t, n))) << n;
  EXPECT_FALSE(x.contains(kBinary.encode("000")));
}

TEST(SampleShift, FactorsOfTheSample) {
  SampleShift x(kBinary, kBinary.encode("0010111"), "fixture");
  EXPECT_TRUE(x.sample_based());
  EXPECT_EQ(rendered(x, 3), sorted(oracle::factor_set("0010111", 3)));
}

TEST(Product, LanguageFactorizes) {
  auto golden = std::make_shared<ForbiddenWordShift>(kBinary, std::vector<DiscreteWord>{kBinary.encode("11")});
  auto coin = std::make_shared<FullShift>(kBinary);
  auto p = product_oracle(golden, coin);
  for (std::size_t n = 1; n <= 10; ++n)
    EXPECT_EQ(p->words(n, 1u << 22).size(), golden->words(n, 1u << 22).size() << n) << n;
  auto orbit = std::make_shared<PeriodicUnion>(kBinary, std::vector<DiscreteWord>{kBinary.encode("01")});
  EXPECT_EQ(product_oracle(orbit, orbit)->words(2, 100).size(), 4u);
}

TEST(Product, SplitAndPair) {
  auto a = std::make_shared<FullShift>(kBinary);
  auto b = std::make_shared<FullShift>(Alphabet::from_chars("xyz"));
  ProductShift p(a, b);
  auto w = p.pair(kBinary.encode("01"), b->alphabet().encode("zx"));
  auto [l, r] = p.split(w);
  EXPECT_EQ(kBinary.render(l), "01");
  EXPECT_EQ(b->alphabet().render(r), "zx");
  EXPECT_TRUE(p.contains(w));
}

TEST(Budget, CapIsEnforced) {
  FullShift x(kBinary);
  EXPECT_THROW(x.words(12, 1000), BudgetExceeded);
  try {
    x.words(12, 1000);
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.limit(), 1000u);
  }
}

TEST(SftApproximation, GoldenMeanIsItsOwnApproximation) {
  ForbiddenWordShift x(kBinary, {kBinary.encode("11")});
  auto g = sft_approximation(x, 1);
  std::vector<std::string> vertices, edges;
  for (auto v : g.essential_vertices()) vertices.push_back(kBinary.render(g.vertices()[v]));
  for (const auto& e : g.edges())
    if (g.edge_essential(e)) edges.push_back(kBinary.render(e.block));
  std::sort(edges.begin(), edges.end());
  EXPECT_EQ(vertices, (std::vector<std::string>{"0", "1"}));
  EXPECT_EQ(edges, (std::vector<std::string>{"00", "01", "10"}));
}

TEST(SftApproximation, FibonacciOrderTwo) {
  SturmianShift x(Rational::make(233, 610));
  auto g = sft_approximation(x, 2);
  std::vector<std::string> vertices, edges;
  for (auto v : g.essential_vertices()) vertices.push_back(kBinary.render(g.vertices()[v]));
  for (const auto& e : g.edges())
    if (g.edge_essential(e)) edges.push_back(kBinary.render(e.block));
  std::sort(edges.begin(), edges.end());
  EXPECT_EQ(vertices, (std::vector<std::string>{"00", "01", "10"}));
  EXPECT_EQ(edges, (std::vector<std::string>{"001", "010", "100", "101"}));
}

TEST(SftApproximation, ContainsTheOriginalLanguage) {
  SturmianShift x(Rational::make(377, 610));
  for (std::size_t m = 1; m <= 5; ++m) {
    GraphShift y(sft_approximation(x, m));
    for (std::size_t n = 1; n <= 10; ++n)
      for (const auto& w : x.words(n, 1u << 20)) EXPECT_TRUE(y.contains(w));
  }
}

TEST(TransferGraph, TrimsDeadEnds) {
  // 0 -> 1 only; 1 -> 1: vertex 0 has no incoming edge and is not essential.
  TransferGraph g(kBinary, 1, {kBinary.encode("0"), kBinary.encode("1")},
                  {kBinary.encode("01"), kBinary.encode("11")});
  EXPECT_FALSE(g.essential(0));
  EXPECT_TRUE(g.essential(1));
  EXPECT_EQ(g.language(3).size(), 1u);
}

TEST(Systems, SpecsBuildTheRightOracles) {
  auto golden = make_oracle(parse_spec("sft { alphabet = \"01\"; forbid = [\"11\"]; }"));
  EXPECT_EQ(golden->words(5, 100).size(), 13u);
  auto fib = make_oracle(parse_spec("substitution { alphabet = \"01\"; rules = [\"0->01\", \"1->0\"]; }"));
  EXPECT_EQ(fib->words(5, 100).size(), 6u);
  auto per = make_oracle(parse_spec("periodic { orbits = [\"001\"]; }"));
  EXPECT_EQ(per->words(4, 100).size(), 3u);
  auto prod = make_oracle(parse_spec(
      "sturmian { name = \"s\"; alpha = 377/610; }\nfull { name = \"f\"; alphabet = \"01\"; }\n"
      "product { left = \"s\"; right = \"f\"; }"));
  EXPECT_EQ(prod->words(4, 1000).size(), 5u * 16u);
  auto noninv = make_oracle(parse_spec("noninv { dmax = 2; multiplicity = [4]; eps = 1/8; prefix = 36; }"));
  EXPECT_TRUE(noninv->sample_based());
  EXPECT_FALSE(noninv->words(1, 100).empty());
}
