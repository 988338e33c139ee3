#include <gtest/gtest.h>

#include <random>

#include "symdyn/speclang.hpp"

using namespace symdyn;

namespace {

SpecError error_of(std::string_view text) {
  try {
    parse_spec(text);
  } catch (const SpecError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a SpecError for: " << text;
  return SpecError(Diagnostic{});
}

const char* kCorpus[] = {
    "sft { alphabet = \"01\"; forbid = [\"11\"]; }",
    "sturmian { alpha = 377/610; symbolic = golden; }",
    "full { alphabet = \"abc\"; }",
    "periodic { orbits = [\"01\", \"001\"]; }",
    "substitution { alphabet = \"01\"; rules = [\"0->01\", \"1->0\"]; start = \"0\"; }",
    "noninv { x0 = [1/2, 1]; dmax = 2; multiplicity = [4]; depth = scaled; precision = exact; }",
    "sturmian { name = \"s\"; alpha = 0.25; }\nfull { name = \"f\"; alphabet = \"01\"; }\n"
    "product { left = \"s\"; right = \"f\"; }",
};

}  // namespace

TEST(Parse, SftBlock) {
  auto doc = parse_spec("sft { alphabet = \"01\"; forbid = [\"11\"] }");
  const auto& s = doc.main();
  EXPECT_EQ(s.kind, SystemKind::sft);
  EXPECT_EQ(*s.get_string("alphabet"), "01");
  EXPECT_EQ(*s.get_strings("forbid"), std::vector<std::string>{"11"});
}

TEST(Parse, SturmianRational) {
  auto s = parse_spec("sturmian { alpha = 377/610 }").main();
  EXPECT_EQ(*s.get_number("alpha"), Rational::make(377, 610));
  auto t = parse_spec("sturmian { alpha = 754/1220 }").main();
  EXPECT_EQ(*t.get_number("alpha"), Rational::make(377, 610));
}

TEST(Parse, NumberForms) {
  auto s = parse_spec("noninv { x0 = [1/2^3, 0.125, 1]; }").main();
  auto x0 = *s.get_numbers("x0");
  EXPECT_EQ(x0[0], Rational::make(1, 8));
  EXPECT_EQ(x0[1], Rational::make(1, 8));
  EXPECT_EQ(x0[2], Rational::make(1, 1));
}

TEST(Parse, CommentsAndWhitespace) {
  auto doc = parse_spec("# header\n\nfull {   # trailing\n alphabet = \"01\" ; }\n# end\n");
  EXPECT_EQ(doc.main().kind, SystemKind::full);
}

TEST(Parse, ProductsResolveNames) {
  auto doc = parse_spec(kCorpus[6]);
  ASSERT_EQ(doc.systems.size(), 3u);
  EXPECT_NE(doc.find("s"), nullptr);
  EXPECT_EQ(doc.find("nope"), nullptr);
}

TEST(Errors, SeedMustBePositive) {
  auto e = error_of("noninv { x0 = [0, 1]; dmax = 6 }");
  EXPECT_NE(e.diagnostic().message.find("seed must be strictly positive"), std::string::npos);
}

TEST(Errors, RotationOutsideUnitInterval) {
  EXPECT_NE(error_of("sturmian { alpha = 3/2 }").diagnostic().message.find("(0,1)"), std::string::npos);
  error_of("sturmian { alpha = 0 }");
}

TEST(Errors, SubstitutionCoverage) {
  error_of("substitution { alphabet = \"01\"; rules = [\"0->01\"]; }");
  error_of("substitution { alphabet = \"01\"; rules = [\"0->01\", \"0->1\", \"1->0\"]; }");
  error_of("substitution { alphabet = \"01\"; rules = [\"0->02\", \"1->0\"]; }");
}

TEST(Errors, SyntaxCarriesPositionAndExpectations) {
  auto e = error_of("sft {\n  alphabet \"01\"; }");
  EXPECT_EQ(e.diagnostic().pos.line, 2);
  EXPECT_FALSE(e.diagnostic().expected.empty());
  auto k = error_of("graph { }");
  EXPECT_EQ(k.diagnostic().pos.line, 1);
}

TEST(Errors, DanglingProductComponent) {
  error_of("full { name = \"a\"; alphabet = \"01\"; }\nproduct { left = \"a\"; right = \"b\"; }");
}

TEST(Errors, UnknownAndMissingKeys) {
  error_of("full { }");
  error_of("full { alphabet = \"01\"; colour = red; }");
  error_of("sft { alphabet = \"00\"; }");
}

TEST(RoundTrip, PrettyThenParseIsIdentity) {
  for (const char* text : kCorpus) {
    auto doc = parse_spec(text);
    auto again = parse_spec(pretty(doc));
    EXPECT_EQ(doc, again) << text;
    EXPECT_EQ(pretty(doc), pretty(again));
  }
}

TEST(Fuzz, RandomBytesNeverCrash) {
  std::mt19937_64 rng(0);
  const std::string alphabet = "{}[];=,\"#/^.-_ \nabcdefghijklmnopqrstuvwxyz0123456789>";
  for (int i = 0; i < 3000; ++i) {
    std::string text;
    std::size_t len = rng() % 80;
    for (std::size_t j = 0; j < len; ++j) text += alphabet[rng() % alphabet.size()];
    try {
      parse_spec(text);
    } catch (const SpecError&) {
    }
  }
}

TEST(Fuzz, MutatedCorpusEitherParsesOrDiagnoses) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 3000; ++i) {
    std::string text = kCorpus[rng() % std::size(kCorpus)];
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits && !text.empty(); ++e) {
      std::size_t at = rng() % text.size();
      switch (rng() % 3) {
        case 0: text.erase(at, 1); break;
        case 1: text.insert(at, 1, static_cast<char>(32 + rng() % 95)); break;
        default: text[at] = static_cast<char>(rng() % 256); break;
      }
    }
    try {
      auto doc = parse_spec(text);
      EXPECT_EQ(parse_spec(pretty(doc)), doc);
    } catch (const SpecError& err) {
      EXPECT_GE(err.diagnostic().pos.line, 1);
    }
  }
}
