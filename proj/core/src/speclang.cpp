#include "symdyn/speclang.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace symdyn {

std::string Diagnostic::to_string() const {
  std::ostringstream out;
  out << pos.line << ':' << pos.column << ": " << message;
  if (!expected.empty()) {
    out << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) out << (i + 1 == expected.size() ? " or " : ", ");
      out << expected[i];
    }
    out << ')';
  }
  return out.str();
}

SpecError::SpecError(Diagnostic diagnostic)
    : std::runtime_error(diagnostic.to_string()), diagnostic_(std::move(diagnostic)) {}

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::full: return "full";
    case SystemKind::periodic: return "periodic";
    case SystemKind::sft: return "sft";
    case SystemKind::substitution: return "substitution";
    case SystemKind::sturmian: return "sturmian";
    case SystemKind::noninv: return "noninv";
    case SystemKind::product: return "product";
  }
  return "?";
}

const Entry* SystemSpec::find(std::string_view key) const {
  auto it = std::find_if(entries.begin(), entries.end(), [key](const Entry& e) { return e.key == key; });
  return it == entries.end() ? nullptr : &*it;
}

namespace {

template <class T>
const T* atom_as(const Value& v) {
  if (const auto* atom = std::get_if<Atom>(&v)) return std::get_if<T>(atom);
  return nullptr;
}

template <class T>
std::optional<std::vector<T>> list_as(const Value& v) {
  const auto* list = std::get_if<std::vector<Atom>>(&v);
  if (!list) return std::nullopt;
  std::vector<T> out;
  for (const auto& a : *list) {
    const auto* t = std::get_if<T>(&a);
    if (!t) return std::nullopt;
    out.push_back(*t);
  }
  return out;
}

}  // namespace

std::optional<std::string> SystemSpec::get_string(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  if (const auto* s = atom_as<std::string>(e->value)) return *s;
  return std::nullopt;
}

std::optional<Rational> SystemSpec::get_number(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  if (const auto* r = atom_as<Rational>(e->value)) return *r;
  return std::nullopt;
}

std::optional<std::string> SystemSpec::get_ident(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  if (const auto* i = atom_as<Identifier>(e->value)) return i->name;
  return std::nullopt;
}

std::optional<std::vector<std::string>> SystemSpec::get_strings(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  return list_as<std::string>(e->value);
}

std::optional<std::vector<Rational>> SystemSpec::get_numbers(std::string_view key) const {
  const auto* e = find(key);
  if (!e) return std::nullopt;
  return list_as<Rational>(e->value);
}

bool operator==(const SystemSpec& a, const SystemSpec& b) {
  if (a.kind != b.kind || a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].key != b.entries[i].key || a.entries[i].value != b.entries[i].value) return false;
  }
  return true;
}

const SystemSpec* SpecDocument::find(std::string_view name) const {
  for (const auto& s : systems) {
    if (auto n = s.name(); n && *n == name) return &s;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { ident, string, number, lbrace, rbrace, lbracket, rbracket, equals, semicolon, comma, end };

std::string describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::string: return "string";
    case Tok::number: return "number";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::equals: return "'='";
    case Tok::semicolon: return "';'";
    case Tok::comma: return "','";
    case Tok::end: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::end;
  std::string text;
  Rational number;
  SourcePos pos;
};

[[noreturn]] void fail(SourcePos pos, std::string message, std::vector<std::string> expected = {}) {
  throw SpecError(Diagnostic{pos, std::move(message), std::move(expected)});
}

constexpr std::int64_t kMaxMagnitude = 1'000'000'000'000'000'000;  // 10^18

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    Token t;
    t.pos = pos_;
    if (at_end()) {
      t.kind = Tok::end;
      return t;
    }
    char c = peek();
    switch (c) {
      case '{': advance(); t.kind = Tok::lbrace; return t;
      case '}': advance(); t.kind = Tok::rbrace; return t;
      case '[': advance(); t.kind = Tok::lbracket; return t;
      case ']': advance(); t.kind = Tok::rbracket; return t;
      case '=': advance(); t.kind = Tok::equals; return t;
      case ';': advance(); t.kind = Tok::semicolon; return t;
      case ',': advance(); t.kind = Tok::comma; return t;
      case '"': return lex_string(t);
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Tok::ident;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) t.text.push_back(advance());
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.') return lex_number(t);
    fail(pos_, std::string("unexpected character '") + (std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "?") + "'");
  }

 private:
  bool at_end() const { return offset_ >= text_.size(); }
  char peek() const { return text_[offset_]; }
  char advance() {
    char c = text_[offset_++];
    if (c == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    return c;
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Token lex_string(Token t) {
    advance();  // opening quote
    t.kind = Tok::string;
    while (true) {
      if (at_end() || peek() == '\n') fail(t.pos, "unterminated string");
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail(t.pos, "unterminated string");
        char e = advance();
        if (e != '"' && e != '\\') fail(pos_, "unknown escape sequence", {"'\\\"'", "'\\\\'"});
        t.text.push_back(e);
      } else {
        t.text.push_back(c);
      }
    }
    return t;
  }

  std::int64_t digits(SourcePos start, int& count) {
    std::int64_t v = 0;
    count = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      int d = advance() - '0';
      if (v > (kMaxMagnitude - d) / 10) fail(start, "number too large");
      v = v * 10 + d;
      ++count;
    }
    return v;
  }

  Token lex_number(Token t) {
    t.kind = Tok::number;
    bool negative = false;
    if (peek() == '-') {
      negative = true;
      advance();
    }
    int count = 0;
    std::int64_t whole = digits(t.pos, count);
    std::int64_t num = whole;
    std::int64_t den = 1;
    bool any = count > 0;
    if (!at_end() && peek() == '.') {
      advance();
      int frac_count = 0;
      std::int64_t frac = digits(t.pos, frac_count);
      if (frac_count > 17) fail(t.pos, "too many decimal places");
      any = any || frac_count > 0;
      for (int i = 0; i < frac_count; ++i) {
        if (num > kMaxMagnitude / 10) fail(t.pos, "number too large");
        num *= 10;
        den *= 10;
      }
      num += frac;
    }
    if (!any) fail(t.pos, "malformed number", {"digit"});
    if (!at_end() && peek() == '/') {
      if (den != 1) fail(t.pos, "decimal numerator in a fraction");
      advance();
      if (!at_end() && peek() == '2' && offset_ + 1 < text_.size() && text_[offset_ + 1] == '^') {
        advance();
        advance();
        int power_count = 0;
        std::int64_t power = digits(t.pos, power_count);
        if (power_count == 0) fail(pos_, "malformed power of two", {"digit"});
        if (power > 62) fail(t.pos, "power of two too large (max 2^62)");
        den = std::int64_t{1} << power;
      } else {
        int den_count = 0;
        den = digits(t.pos, den_count);
        if (den_count == 0) fail(pos_, "malformed fraction", {"digit", "'2^'"});
        if (den == 0) fail(t.pos, "zero denominator");
      }
    }
    t.number = Rational::make(negative ? -num : num, den);
    if (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '.'))
      fail(pos_, "malformed number");
    return t;
  }

  std::string_view text_;
  std::size_t offset_ = 0;
  SourcePos pos_;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { current_ = lexer_.next(); }

  SpecDocument document() {
    SpecDocument doc;
    while (current_.kind != Tok::end) doc.systems.push_back(system());
    if (doc.systems.empty()) fail(current_.pos, "empty specification", {"system kind"});
    return doc;
  }

 private:
  Token take() {
    Token t = std::move(current_);
    current_ = lexer_.next();
    return t;
  }

  Token expect(Tok kind) {
    if (current_.kind != kind) fail(current_.pos, "unexpected " + describe(current_.kind), {describe(kind)});
    return take();
  }

  SystemSpec system() {
    static const std::map<std::string, SystemKind, std::less<>> kinds = {
        {"full", SystemKind::full},       {"periodic", SystemKind::periodic},
        {"sft", SystemKind::sft},         {"substitution", SystemKind::substitution},
        {"sturmian", SystemKind::sturmian}, {"noninv", SystemKind::noninv},
        {"product", SystemKind::product}};
    if (current_.kind != Tok::ident)
      fail(current_.pos, "unexpected " + describe(current_.kind), {"system kind"});
    auto it = kinds.find(current_.text);
    if (it == kinds.end())
      fail(current_.pos, "unknown system kind '" + current_.text + "'",
           {"full", "periodic", "sft", "substitution", "sturmian", "noninv", "product"});
    SystemSpec spec;
    spec.pos = current_.pos;
    spec.kind = it->second;
    take();
    expect(Tok::lbrace);
    while (current_.kind != Tok::rbrace) {
      spec.entries.push_back(entry(spec));
      if (current_.kind == Tok::semicolon) {
        take();
      } else if (current_.kind != Tok::rbrace) {
        fail(current_.pos, "unexpected " + describe(current_.kind), {"';'", "'}'"});
      }
    }
    take();
    return spec;
  }

  Entry entry(const SystemSpec& spec) {
    if (current_.kind != Tok::ident)
      fail(current_.pos, "unexpected " + describe(current_.kind), {"identifier", "'}'"});
    Entry e;
    e.pos = current_.pos;
    e.key = take().text;
    if (spec.find(e.key)) fail(e.pos, "duplicate key '" + e.key + "'");
    expect(Tok::equals);
    if (current_.kind == Tok::lbracket) {
      take();
      std::vector<Atom> items;
      items.push_back(atom());
      while (current_.kind == Tok::comma) {
        take();
        items.push_back(atom());
      }
      expect(Tok::rbracket);
      e.value = std::move(items);
    } else {
      e.value = atom();
    }
    return e;
  }

  Atom atom() {
    switch (current_.kind) {
      case Tok::string: return take().text;
      case Tok::number: return take().number;
      case Tok::ident: return Identifier{take().text};
      default: fail(current_.pos, "unexpected " + describe(current_.kind), {"string", "number", "identifier"});
    }
  }

  Lexer lexer_;
  Token current_;
};

// ---------------------------------------------------------------------------
// Semantic validation

struct KeyRule {
  const char* key;
  enum Type { string, number, ident, strings, numbers } type;
  bool required;
};

const std::vector<KeyRule>& rules_for(SystemKind kind) {
  static const std::map<SystemKind, std::vector<KeyRule>> rules = {
      {SystemKind::full, {{"alphabet", KeyRule::string, true}}},
      {SystemKind::periodic, {{"alphabet", KeyRule::string, false}, {"orbits", KeyRule::strings, true}}},
      {SystemKind::sft, {{"alphabet", KeyRule::string, true}, {"forbid", KeyRule::strings, false}}},
      {SystemKind::substitution,
       {{"alphabet", KeyRule::string, true}, {"rules", KeyRule::strings, true}, {"start", KeyRule::string, false}}},
      {SystemKind::sturmian, {{"alpha", KeyRule::number, true}, {"symbolic", KeyRule::ident, false}}},
      {SystemKind::noninv,
       {{"x0", KeyRule::numbers, false},
        {"dmax", KeyRule::number, false},
        {"depth", KeyRule::ident, false},
        {"multiplicity", KeyRule::numbers, false},
        {"precision", KeyRule::ident, false},
        {"exact_cap", KeyRule::number, false},
        {"eps", KeyRule::number, false},
        {"prefix", KeyRule::number, false}}},
      {SystemKind::product, {{"left", KeyRule::string, true}, {"right", KeyRule::string, true}}},
  };
  return rules.at(kind);
}

const char* type_name(KeyRule::Type t) {
  switch (t) {
    case KeyRule::string: return "string";
    case KeyRule::number: return "number";
    case KeyRule::ident: return "identifier";
    case KeyRule::strings: return "list of strings";
    case KeyRule::numbers: return "list of numbers";
  }
  return "?";
}

bool has_type(const Value& v, KeyRule::Type t) {
  switch (t) {
    case KeyRule::string: return atom_as<std::string>(v) != nullptr;
    case KeyRule::number: return atom_as<Rational>(v) != nullptr;
    case KeyRule::ident: return atom_as<Identifier>(v) != nullptr;
    case KeyRule::strings: return list_as<std::string>(v).has_value();
    case KeyRule::numbers: return list_as<Rational>(v).has_value();
  }
  return false;
}

SourcePos pos_of(const SystemSpec& spec, std::string_view key) {
  const auto* e = spec.find(key);
  return e ? e->pos : spec.pos;
}

void check_alphabet(const SystemSpec& spec, const std::string& alphabet) {
  if (alphabet.empty()) fail(pos_of(spec, "alphabet"), "alphabet must be nonempty");
  std::set<char> seen;
  for (char c : alphabet) {
    if (std::isspace(static_cast<unsigned char>(c))) fail(pos_of(spec, "alphabet"), "alphabet symbols must be visible characters");
    if (!seen.insert(c).second) fail(pos_of(spec, "alphabet"), std::string("duplicate alphabet symbol '") + c + "'");
  }
}

void check_over(const SystemSpec& spec, std::string_view key, const std::string& alphabet, const std::string& word) {
  for (char c : word) {
    if (alphabet.find(c) == std::string::npos)
      fail(pos_of(spec, key), std::string("unknown symbol '") + c + "' in " + std::string(key));
  }
}

bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

void validate_noninv(const SystemSpec& spec) {
  if (auto x0 = spec.get_numbers("x0")) {
    for (const auto& r : *x0) {
      if (r.num <= 0) fail(pos_of(spec, "x0"), "seed must be strictly positive");
      if (r.num > r.den) fail(pos_of(spec, "x0"), "seed symbols must lie in [0,1]");
      if (!is_power_of_two(r.den)) fail(pos_of(spec, "x0"), "seed symbols must be dyadic rationals");
    }
  }
  auto positive_integer = [&](std::string_view key) {
    if (auto n = spec.get_number(key); n && (!n->is_integer() || n->num < 1))
      fail(pos_of(spec, key), std::string(key) + " must be a positive integer");
  };
  positive_integer("dmax");
  positive_integer("exact_cap");
  positive_integer("prefix");
  if (auto m = spec.get_numbers("multiplicity")) {
    for (const auto& r : *m) {
      if (!r.is_integer() || r.num < 1) fail(pos_of(spec, "multiplicity"), "multiplicities must be positive integers");
    }
  }
  if (auto d = spec.get_ident("depth"); d && *d != "scaled" && *d != "unbounded")
    fail(pos_of(spec, "depth"), "unknown depth rule '" + *d + "'", {"scaled", "unbounded"});
  if (auto p = spec.get_ident("precision"); p && *p != "exact" && *p != "float")
    fail(pos_of(spec, "precision"), "unknown precision '" + *p + "'", {"exact", "float"});
  if (auto e = spec.get_number("eps"); e && (e->num <= 0 || e->num > e->den))
    fail(pos_of(spec, "eps"), "eps must lie in (0,1]");
}

void validate(const SystemSpec& spec) {
  const auto& rules = rules_for(spec.kind);
  for (const auto& e : spec.entries) {
    if (e.key == "name") {
      if (!atom_as<std::string>(e.value)) fail(e.pos, "name must be a string");
      continue;
    }
    auto rule = std::find_if(rules.begin(), rules.end(), [&](const KeyRule& r) { return e.key == r.key; });
    if (rule == rules.end()) {
      std::vector<std::string> allowed{"name"};
      for (const auto& r : rules) allowed.emplace_back(r.key);
      fail(e.pos, "unknown key '" + e.key + "' for " + std::string(to_string(spec.kind)), allowed);
    }
    if (!has_type(e.value, rule->type))
      fail(e.pos, "'" + e.key + "' must be a " + type_name(rule->type));
  }
  for (const auto& r : rules) {
    if (r.required && !spec.find(r.key))
      fail(spec.pos, "missing required key '" + std::string(r.key) + "' for " + std::string(to_string(spec.kind)));
  }

  switch (spec.kind) {
    case SystemKind::full:
      check_alphabet(spec, *spec.get_string("alphabet"));
      break;
    case SystemKind::periodic: {
      auto orbits = *spec.get_strings("orbits");
      auto alphabet = spec.get_string("alphabet");
      if (alphabet) check_alphabet(spec, *alphabet);
      for (const auto& o : orbits) {
        if (o.empty()) fail(pos_of(spec, "orbits"), "orbit words must be nonempty");
        if (alphabet) check_over(spec, "orbits", *alphabet, o);
      }
      break;
    }
    case SystemKind::sft: {
      auto alphabet = *spec.get_string("alphabet");
      check_alphabet(spec, alphabet);
      for (const auto& w : spec.get_strings("forbid").value_or(std::vector<std::string>{})) {
        if (w.empty()) fail(pos_of(spec, "forbid"), "forbidden words must be nonempty");
        check_over(spec, "forbid", alphabet, w);
      }
      break;
    }
    case SystemKind::substitution: {
      auto alphabet = *spec.get_string("alphabet");
      check_alphabet(spec, alphabet);
      std::set<char> covered;
      auto rules = spec.get_strings("rules").value();
      for (const auto& rule : rules) {
        auto arrow = rule.find("->");
        if (arrow != 1) fail(pos_of(spec, "rules"), "rule '" + rule + "' must have the form \"a->word\"");
        char from = rule[0];
        std::string image = rule.substr(3);
        check_over(spec, "rules", alphabet, std::string(1, from));
        if (image.empty()) fail(pos_of(spec, "rules"), "rule '" + rule + "' has an empty image");
        check_over(spec, "rules", alphabet, image);
        if (!covered.insert(from).second)
          fail(pos_of(spec, "rules"), std::string("symbol '") + from + "' has more than one rule");
      }
      for (char c : alphabet) {
        if (!covered.count(c)) fail(pos_of(spec, "rules"), std::string("symbol '") + c + "' has no rule");
      }
      if (auto start = spec.get_string("start")) {
        if (start->size() != 1) fail(pos_of(spec, "start"), "start must be a single symbol");
        check_over(spec, "start", alphabet, *start);
      }
      break;
    }
    case SystemKind::sturmian: {
      auto alpha = *spec.get_number("alpha");
      if (alpha.num <= 0 || alpha.num >= alpha.den)
        fail(pos_of(spec, "alpha"), "rotation parameter must lie in (0,1)");
      break;
    }
    case SystemKind::noninv:
      validate_noninv(spec);
      break;
    case SystemKind::product:
      break;
  }
}

void validate_document(const SpecDocument& doc) {
  std::set<std::string> names;
  for (const auto& s : doc.systems) {
    validate(s);
    if (auto n = s.name(); n && !names.insert(*n).second) fail(pos_of(s, "name"), "duplicate system name '" + *n + "'");
  }
  // Products must reference named blocks, and the reference graph must be acyclic.
  std::map<std::string, const SystemSpec*> by_name;
  for (const auto& s : doc.systems) {
    if (auto n = s.name()) by_name[*n] = &s;
  }
  for (const auto& s : doc.systems) {
    if (s.kind != SystemKind::product) continue;
    for (const char* side : {"left", "right"}) {
      auto ref = *s.get_string(side);
      if (!by_name.count(ref)) fail(pos_of(s, side), "product component '" + ref + "' does not name a system");
    }
  }
  for (const auto& s : doc.systems) {
    if (s.kind != SystemKind::product) continue;
    std::set<const SystemSpec*> on_path;
    // Depth-first walk; revisiting a product on the current chain means a cycle.
    std::function<void(const SystemSpec*)> visit = [&](const SystemSpec* node) {
      if (node->kind != SystemKind::product) return;
      if (!on_path.insert(node).second) fail(pos_of(s, "left"), "product components form a cycle");
      visit(by_name.at(*node->get_string("left")));
      visit(by_name.at(*node->get_string("right")));
      on_path.erase(node);
    };
    visit(&s);
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string pretty_atom(const Atom& a) {
  if (const auto* s = std::get_if<std::string>(&a)) return quote(*s);
  if (const auto* r = std::get_if<Rational>(&a)) return r->to_string();
  return std::get<Identifier>(a).name;
}

}  // namespace

SpecDocument parse_spec(std::string_view text) {
  Parser parser(text);
  SpecDocument doc = parser.document();
  validate_document(doc);
  return doc;
}

std::string pretty(const SystemSpec& spec) {
  std::string out(to_string(spec.kind));
  out += " {\n";
  for (const auto& e : spec.entries) {
    out += "  " + e.key + " = ";
    if (const auto* atom = std::get_if<Atom>(&e.value)) {
      out += pretty_atom(*atom);
    } else {
      const auto& list = std::get<std::vector<Atom>>(e.value);
      out += "[";
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ", ";
        out += pretty_atom(list[i]);
      }
      out += "]";
    }
    out += ";\n";
  }
  out += "}\n";
  return out;
}

std::string pretty(const SpecDocument& document) {
  std::string out;
  for (std::size_t i = 0; i < document.systems.size(); ++i) {
    if (i) out += "\n";
    out += pretty(document.systems[i]);
  }
  return out;
}

}  // namespace symdyn
