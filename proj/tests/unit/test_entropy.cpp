#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "symdyn/entropy.hpp"
#include "symdyn/noninv.hpp"

using namespace symdyn;

namespace {

const Alphabet kBinary = Alphabet::from_chars("01");
const double kLogGolden = std::log(std::numbers::phi);

DiscreteWord enc(const char* s) { return kBinary.encode(s); }

// Distance 2^-i at the first disagreement i (1-based).
double first_difference(const std::string& a, const std::string& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    if (a[i] != b[i]) return std::ldexp(1.0, -static_cast<int>(i));
  return 0.0;
}

}  // namespace

TEST(Complexity, KnownTables) {
  FullShift full(kBinary);
  EXPECT_EQ(complexity(full, 5).rows[4].count, 32u);
  ForbiddenWordShift golden(kBinary, {enc("11")});
  auto t = complexity(golden, 5);
  std::vector<std::uint64_t> counts;
  for (const auto& r : t.rows) counts.push_back(r.count);
  EXPECT_EQ(counts, (std::vector<std::uint64_t>{2, 3, 5, 8, 13}));
  for (std::size_t n = 1; n <= 5; ++n) EXPECT_EQ(counts[n - 1], oracle::avoiding("01", n, {"11"}).size());
  SturmianShift fib(Rational::make(377, 610));
  EXPECT_EQ(complexity(fib, 5).rows[4].count, 6u);
}

TEST(Complexity, SlopeColumn) {
  ForbiddenWordShift golden(kBinary, {enc("11")});
  for (const auto& r : complexity(golden, 20).rows)
    EXPECT_NEAR(r.slope, std::log(static_cast<double>(r.count)) / static_cast<double>(r.n), 1e-12);
}

TEST(Complexity, Submultiplicative) {
  std::vector<std::shared_ptr<LanguageOracle>> fixtures = {
      std::make_shared<ForbiddenWordShift>(kBinary, std::vector<DiscreteWord>{enc("11")}),
      std::make_shared<SturmianShift>(Rational::make(377, 610)),
      std::make_shared<PeriodicUnion>(kBinary, std::vector<DiscreteWord>{enc("001"), enc("01")}),
      std::make_shared<SubstitutionShift>(kBinary, std::vector<DiscreteWord>{enc("01"), enc("10")}, 0),
  };
  for (const auto& x : fixtures) {
    auto t = complexity(*x, 20);
    for (std::size_t m = 1; m < 20; ++m)
      for (std::size_t n = 1; m + n <= 20; ++n)
        EXPECT_LE(t.rows[m + n - 1].count, t.rows[m - 1].count * t.rows[n - 1].count) << x->description();
  }
}

TEST(Complexity, TruncatesAtTheCap) {
  FullShift full(kBinary);
  auto t = complexity(full, 20, 1000);
  EXPECT_TRUE(t.truncated);
  EXPECT_EQ(t.rows.size(), 9u);
}

TEST(Estimate, KnownSlopes) {
  FullShift full(kBinary);
  auto e = entropy_estimate(complexity(full, 20));
  EXPECT_DOUBLE_EQ(e.final_slope, std::log(2.0));
  EXPECT_NEAR(e.fit_slope, std::log(2.0), 1e-12);
  ForbiddenWordShift golden(kBinary, {enc("11")});
  auto g = entropy_estimate(complexity(golden, 30));
  EXPECT_NEAR(g.final_slope, kLogGolden, 0.05);
  EXPECT_NEAR(g.fit_slope, kLogGolden, 0.05);
  SturmianShift fib(Rational::make(377, 610));
  auto s = entropy_estimate(complexity(fib, 30));
  EXPECT_NEAR(s.final_slope, std::log(31.0) / 30, 1e-12);
  EXPECT_THROW(entropy_estimate(complexity(fib, 3)), std::invalid_argument);
}

TEST(Spectral, ClosedForms) {
  ForbiddenWordShift golden(kBinary, {enc("11")});
  auto g = sft_entropy_exact(golden.graph());
  EXPECT_NEAR(g.entropy, kLogGolden, 1e-9);
  EXPECT_TRUE(g.converged);
  EXPECT_NEAR(g.path_growth, kLogGolden, 1e-9);
  EXPECT_LE(g.radius_lower, g.radius_upper);

  auto full = sft_entropy_exact(sft_approximation(FullShift(kBinary), 1));
  EXPECT_EQ(full.entropy, std::log(2.0));
  for (const char* p : {"1", "01", "0011", "0010111"}) {
    auto cycle = sft_entropy_exact(sft_approximation(PeriodicUnion(kBinary, {enc(p)}), std::strlen(p)));
    EXPECT_EQ(cycle.entropy, 0.0) << p;
  }
}

TEST(Spectral, AgreesWithEstimatesOnSfts) {
  std::vector<std::vector<const char*>> rules = {{"11"}, {"000", "111"}, {"101"}, {}};
  for (const auto& forbid : rules) {
    std::vector<DiscreteWord> f;
    for (auto w : forbid) f.push_back(enc(w));
    ForbiddenWordShift x(kBinary, f);
    double exact = sft_entropy_exact(x.graph()).entropy;
    auto est = entropy_estimate(complexity(x, 22));
    EXPECT_NEAR(est.fit_slope, exact, 0.05);
  }
}

TEST(Spectral, ApproximationsDecrease) {
  std::vector<std::shared_ptr<LanguageOracle>> fixtures = {
      std::make_shared<ForbiddenWordShift>(kBinary, std::vector<DiscreteWord>{enc("11")}),
      std::make_shared<SturmianShift>(Rational::make(377, 610)),
      std::make_shared<PeriodicUnion>(kBinary, std::vector<DiscreteWord>{enc("001"), enc("01")}),
  };
  for (const auto& x : fixtures) {
    double previous = INFINITY;
    for (std::size_t m = 1; m <= 6; ++m) {
      double h = sft_entropy_exact(sft_approximation(*x, m)).entropy;
      EXPECT_LE(h, previous + 1e-12) << x->description() << " m=" << m;
      previous = h;
    }
  }
}

TEST(Spectral, ReducibleGraphTakesTheLargestComponent) {
  // Golden-mean block on {a,b}, a one-way bridge to a fixed point c.
  Alphabet abc = Alphabet::from_chars("abc");
  TransferGraph g(abc, 1, {abc.encode("a"), abc.encode("b"), abc.encode("c")},
                  {abc.encode("aa"), abc.encode("ab"), abc.encode("ba"), abc.encode("ac"), abc.encode("cc")});
  auto s = sft_entropy_exact(g);
  EXPECT_EQ(s.components, 2u);
  EXPECT_NEAR(s.entropy, kLogGolden, 1e-9);
}

TEST(Separated, StreamFixtures) {
  PeriodicStream constant({*Dyadic::parse("0.6875")});
  EXPECT_EQ(separated_count(constant, 5, 0.1, 100), 1u);
  PeriodicStream alternating({*Dyadic::parse("0.875"), *Dyadic::parse("0.125")});
  EXPECT_EQ(separated_count(alternating, 4, 0.1, 100), 2u);
  WordStream short_word({Dyadic(1), Dyadic(0)});
  EXPECT_THROW(separated_count(short_word, 4, 0.1, 10), std::invalid_argument);
  EXPECT_THROW(separated_count(constant, 4, 0.1, 0), std::invalid_argument);
}

TEST(Separated, DeBruijnPrefixRealizesEveryWord) {
  // de Bruijn sequence B(2,10) by the prefer-one rule, as 0/1 reals.
  std::string seq(10, '0');
  std::set<std::string> seen{seq};
  while (true) {
    std::string tail = seq.substr(seq.size() - 9);
    if (!seen.count(tail + "1")) {
      seq += '1';
    } else if (!seen.count(tail + "0")) {
      seq += '0';
    } else {
      break;
    }
    seen.insert(seq.substr(seq.size() - 10));
  }
  std::vector<double> x;
  for (char c : seq) x.push_back(c == '1' ? 1.0 : 0.0);
  EXPECT_EQ(separated_count(std::span<const double>(x), 10, 0.5), 1024u);
}

TEST(Separated, DominatesGreedySeparatedFamilies) {
  std::mt19937_64 rng(2);
  std::vector<double> x(400);
  for (auto& v : x) v = static_cast<double>(rng() % 16) / 16;
  for (std::size_t n : {1, 2, 3}) {
    // Greedy eps-separated family in sup distance.
    std::vector<std::vector<double>> family;
    for (std::size_t i = 0; i + n <= x.size(); ++i) {
      std::vector<double> w(x.begin() + i, x.begin() + i + n);
      bool far = true;
      for (const auto& f : family) far = far && sup_distance(f, w) >= 0.25;
      if (far) family.push_back(w);
    }
    EXPECT_GE(separated_count(std::span<const double>(x), n, 0.25), family.size());
  }
}

TEST(PreimageTree, FullShiftPrepend) {
  auto forward = [](const std::string& y) { return y.substr(1); };
  auto t0 = [](const std::string& y) { return "0" + y; };
  auto t1 = [](const std::string& y) { return "1" + y; };
  for (std::size_t n : {3u, 10u}) {
    auto f = preimage_tree(std::string("0000"), forward, t0, t1, first_difference, 1.0, n);
    EXPECT_EQ(f.points.size(), std::size_t{1} << n);
    EXPECT_TRUE(f.distinct);
    EXPECT_TRUE(f.pairs_checked);
    EXPECT_TRUE(f.separated);
    EXPECT_EQ(std::log(static_cast<double>(f.points.size())) / static_cast<double>(n), std::log(2.0));
    // Index bits read a_n ... a_1 from the top; the point starts with a_n.
    EXPECT_EQ(f.points[1].substr(0, n), std::string(n - 1, '0') + "1");
  }
}

TEST(PreimageTree, ForwardOfAPointDropsTheOuterBranch) {
  auto forward = [](const std::string& y) { return y.substr(1); };
  auto t0 = [](const std::string& y) { return "0" + y; };
  auto t1 = [](const std::string& y) { return "1" + y; };
  auto f4 = preimage_tree(std::string("1"), forward, t0, t1, first_difference, 1.0, 4);
  auto f3 = preimage_tree(std::string("1"), forward, t0, t1, first_difference, 1.0, 3);
  for (std::size_t c = 0; c < 16; ++c) EXPECT_EQ(forward(f4.points[c]), f3.points[c & 7]);
}

TEST(PreimageTree, ContractViolationsAreLocated) {
  auto forward = [](const std::string& y) { return y.substr(1); };
  auto t0 = [](const std::string& y) { return "0" + y; };
  auto bad = [](const std::string& y) { return y.size() >= 3 ? "0" + y : "1" + y; };
  try {
    preimage_tree(std::string("0"), forward, t0, bad, first_difference, 1.0, 5);
    FAIL() << "expected a violation";
  } catch (const SelectorViolation& e) {
    EXPECT_EQ(e.code(), "100");
  }
  auto not_preimage = [](const std::string& y) { return "1" + y + "x"; };
  EXPECT_THROW(preimage_tree(std::string("0"), forward, t0, not_preimage, first_difference, 1.0, 2),
               SelectorViolation);
}

TEST(PreimageTree, ConstructionSelectorsShrink) {
  // tau_0, tau_1 of the construction: separation at a node is |y|/8 in the
  // first coordinate, which decays with depth.
  auto forward = [](const RealWord& y) { return shift(y, 1); };
  auto t0 = [](const RealWord& y) { return tau("0", y); };
  auto t1 = [](const RealWord& y) { return tau("1", y); };
  auto dist = [](const RealWord& a, const RealWord& b) { return weighted_distance(a, b).to_double(); };
  RealWord x = {*Dyadic::parse("1/2"), Dyadic(1)};
  auto f = preimage_tree(x, forward, t0, t1, dist, 0.0, 8);
  EXPECT_TRUE(f.distinct);
  for (std::size_t l = 1; l < f.branch_separation.size(); ++l) EXPECT_LT(f.branch_separation[l], f.branch_separation[l - 1]);
  EXPECT_NEAR(f.branch_separation[0], weighted_norm(x).to_double() / 16, 1e-15);
  EXPECT_THROW(preimage_tree(x, forward, t0, t1, dist, 0.01, 8), SelectorViolation);
}
