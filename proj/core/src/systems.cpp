#include "symdyn/systems.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "symdyn/noninv.hpp"

namespace symdyn {

namespace {

constexpr double kDefaultEps = 0.125;
constexpr std::uint64_t kDefaultPrefix = 4096;

OraclePtr noninv_oracle(const SystemSpec& spec) {
  auto schedule = schedule_from_spec(spec);
  double eps = kDefaultEps;
  if (auto e = spec.get_number("eps")) eps = e->to_double();
  std::uint64_t count = kDefaultPrefix;
  if (auto p = spec.get_number("prefix")) count = static_cast<std::uint64_t>(p->num);
  auto stream = prefix_stream(schedule, count);
  RealWord sample = prefix(*stream, count);
  auto cells = quantize_indices(std::span<const Dyadic>(sample), eps);
  std::int64_t top = *std::max_element(cells.begin(), cells.end());
  if (top >= 256) throw std::invalid_argument("eps too fine for a byte alphabet");
  std::vector<std::string> tokens;
  for (std::int64_t c = 0; c <= top; ++c) tokens.push_back(std::to_string(c));
  DiscreteWord word(cells.size(), '\0');
  for (std::size_t i = 0; i < cells.size(); ++i) word[i] = static_cast<char>(static_cast<Label>(cells[i]));
  std::ostringstream origin;
  origin << "noninv prefix of " << count << " symbols quantized at eps=" << eps;
  return std::make_shared<SampleShift>(Alphabet(std::move(tokens)), std::move(word), origin.str());
}

}  // namespace

OraclePtr make_oracle(const SpecDocument& document, const SystemSpec& spec) {
  switch (spec.kind) {
    case SystemKind::full:
      return std::make_shared<FullShift>(Alphabet::from_chars(*spec.get_string("alphabet")));
    case SystemKind::periodic: {
      auto orbits = *spec.get_strings("orbits");
      std::string glyphs;
      if (auto a = spec.get_string("alphabet")) {
        glyphs = *a;
      } else {
        std::set<char> seen;
        for (const auto& o : orbits) seen.insert(o.begin(), o.end());
        glyphs.assign(seen.begin(), seen.end());
      }
      Alphabet alphabet = Alphabet::from_chars(glyphs);
      std::vector<DiscreteWord> periods;
      for (const auto& o : orbits) periods.push_back(alphabet.encode(o));
      return std::make_shared<PeriodicUnion>(alphabet, std::move(periods));
    }
    case SystemKind::sft: {
      Alphabet alphabet = Alphabet::from_chars(*spec.get_string("alphabet"));
      std::vector<DiscreteWord> forbidden;
      for (const auto& w : spec.get_strings("forbid").value_or(std::vector<std::string>{}))
        forbidden.push_back(alphabet.encode(w));
      return std::make_shared<ForbiddenWordShift>(alphabet, std::move(forbidden));
    }
    case SystemKind::substitution: {
      Alphabet alphabet = Alphabet::from_chars(*spec.get_string("alphabet"));
      std::vector<DiscreteWord> images(alphabet.size());
      auto rules = spec.get_strings("rules").value();
      for (const auto& rule : rules)
        images[*alphabet.find(rule.substr(0, 1))] = alphabet.encode(rule.substr(3));
      Label start = 0;
      if (auto s = spec.get_string("start")) start = *alphabet.find(*s);
      return std::make_shared<SubstitutionShift>(alphabet, std::move(images), start);
    }
    case SystemKind::sturmian:
      return std::make_shared<SturmianShift>(*spec.get_number("alpha"));
    case SystemKind::noninv:
      return noninv_oracle(spec);
    case SystemKind::product: {
      auto left = document.find(*spec.get_string("left"));
      auto right = document.find(*spec.get_string("right"));
      return product_oracle(make_oracle(document, *left), make_oracle(document, *right));
    }
  }
  throw std::logic_error("unknown system kind");
}

OraclePtr make_oracle(const SpecDocument& document) { return make_oracle(document, document.main()); }

SpecDocument load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec(text.str());
}

}  // namespace symdyn
