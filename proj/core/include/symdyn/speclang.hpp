#pragma once

// Parser for .shift system specifications.
//
//   spec  := kind '{' (entry ';')* '}'
//   entry := ident '=' (atom | list)
//   list  := '[' atom (',' atom)* ']'
//   atom  := string | number | ident
//
// A file holds one or more blocks; the last block is the system the file
// describes. Blocks may carry `name = "..."` so that product blocks can refer
// to them. Comments run from '#' to end of line. Numbers are exact
// rationals: 3, -2, 0.125, 377/610, 1/2^5.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace symdyn {

struct SourcePos {
  int line = 1;
  int column = 1;
};

struct Diagnostic {
  SourcePos pos;
  std::string message;
  std::vector<std::string> expected;  // empty for semantic errors

  std::string to_string() const;
};

class SpecError : public std::runtime_error {
 public:
  explicit SpecError(Diagnostic diagnostic);
  const Diagnostic& diagnostic() const { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

/// Reduced fraction with positive denominator.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }
  std::string to_string() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct Identifier {
  std::string name;
  friend bool operator==(const Identifier&, const Identifier&) = default;
};

using Atom = std::variant<std::string, Rational, Identifier>;
using Value = std::variant<Atom, std::vector<Atom>>;

struct Entry {
  std::string key;
  Value value;
  SourcePos pos;
};

enum class SystemKind { full, periodic, sft, substitution, sturmian, noninv, product };

std::string_view to_string(SystemKind kind);

struct SystemSpec {
  SystemKind kind = SystemKind::full;
  std::vector<Entry> entries;
  SourcePos pos;

  const Entry* find(std::string_view key) const;
  std::optional<std::string> get_string(std::string_view key) const;
  std::optional<Rational> get_number(std::string_view key) const;
  std::optional<std::string> get_ident(std::string_view key) const;
  std::optional<std::vector<std::string>> get_strings(std::string_view key) const;
  std::optional<std::vector<Rational>> get_numbers(std::string_view key) const;
  std::optional<std::string> name() const { return get_string("name"); }
};

/// Positions are ignored: equality is on the abstract form.
bool operator==(const SystemSpec& a, const SystemSpec& b);

struct SpecDocument {
  std::vector<SystemSpec> systems;

  const SystemSpec& main() const { return systems.back(); }
  const SystemSpec* find(std::string_view name) const;
  friend bool operator==(const SpecDocument&, const SpecDocument&) = default;
};

/// Parses and validates. Throws SpecError (and nothing else) on bad input.
SpecDocument parse_spec(std::string_view text);

/// Canonical text form; parse_spec(pretty(d)) == d.
std::string pretty(const SpecDocument& document);
std::string pretty(const SystemSpec& spec);

}  // namespace symdyn
