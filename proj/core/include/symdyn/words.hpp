#pragma once

// Word arithmetic shared by every other module: exact dyadic symbols, the
// weighted metric on [0,1]^N, quantization onto an epsilon grid and
// pull-based symbol streams.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace symdyn {

/// Exact dyadic rational mantissa / 2^exponent, kept normalized (odd
/// mantissa or zero with exponent 0).
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long value);  // NOLINT(google-explicit-constructor)

  static Dyadic from_parts(mpz_class mantissa, std::uint64_t exponent);
  /// Every finite double is a dyadic rational; the conversion is exact.
  static Dyadic from_double(double value);
  /// Accepts "p", "p/2^q", "p/q" with q a power of two, and terminating
  /// decimals whose value is dyadic ("0.5", "0.375").
  static std::optional<Dyadic> parse(std::string_view text);

  const mpz_class& mantissa() const { return mantissa_; }
  std::uint64_t exponent() const { return exponent_; }

  double to_double() const;
  std::string to_string() const;
  int sign() const { return sgn(mantissa_); }
  bool is_zero() const { return mantissa_ == 0; }

  /// Multiply by 2^power (power may be negative).
  Dyadic scaled(std::int64_t power) const;
  Dyadic abs() const;

  Dyadic& operator+=(const Dyadic& other);
  Dyadic& operator-=(const Dyadic& other);
  Dyadic& operator*=(long factor);

  friend Dyadic operator+(Dyadic a, const Dyadic& b) { return a += b; }
  friend Dyadic operator-(Dyadic a, const Dyadic& b) { return a -= b; }
  friend Dyadic operator*(Dyadic a, long factor) { return a *= factor; }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a);

  friend bool operator==(const Dyadic& a, const Dyadic& b);
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

  /// Exact rational view, for inequality checks that leave the dyadics.
  mpq_class to_rational() const;

 private:
  void normalize();

  mpz_class mantissa_ = 0;
  std::uint64_t exponent_ = 0;
};

/// Discrete symbol: index into an alphabet.
using Label = std::uint8_t;

/// Word over a finite alphabet; each char holds a Label (not a display glyph).
using DiscreteWord = std::string;
/// Word over [0,1] with exact dyadic symbols.
using RealWord = std::vector<Dyadic>;
/// Word over [0,1] in double precision (streaming mode).
using FloatWord = std::vector<double>;

/// A symbol as it appears in word files: either a discrete token or a real.
using Symbol = std::variant<std::string, Dyadic>;
/// A parsed word-file line. Mixed discrete/real lines are rejected.
using Word = std::variant<std::vector<std::string>, RealWord>;

class WordError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Removes the first n symbols; saturates to the empty word.
template <class Sequence>
Sequence shift(const Sequence& x, std::size_t n) {
  if (n >= x.size()) return Sequence{};
  return Sequence(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
}

/// sum_i |x(i)| 2^-i with i starting at 1.
Dyadic weighted_norm(std::span<const Dyadic> x);
double weighted_norm(std::span<const double> x);
inline Dyadic weighted_norm(const RealWord& x) { return weighted_norm(std::span<const Dyadic>(x)); }
/// Rejects discrete words, which carry no norm.
Dyadic weighted_norm(const Word& x);

/// d(x, y) = sum_i |x(i) - y(i)| 2^-i over the common length.
Dyadic weighted_distance(std::span<const Dyadic> x, std::span<const Dyadic> y);
double weighted_distance(std::span<const double> x, std::span<const double> y);

/// floor(a(i)/eps) per coordinate. Exact for dyadic input (eps is itself a
/// dyadic rational as a double).
std::vector<std::int64_t> quantize_indices(std::span<const Dyadic> a, double eps);
std::vector<std::int64_t> quantize_indices(std::span<const double> a, double eps);

/// [a]_eps: coordinatewise floor onto the grid {0, eps, 2 eps, ...}.
FloatWord quantize(std::span<const double> a, double eps);
FloatWord quantize(std::span<const Dyadic> a, double eps);

/// sup_i |a(i) - b(i)|; lengths must agree.
double sup_distance(std::span<const double> a, std::span<const double> b);
Dyadic sup_distance(std::span<const Dyadic> a, std::span<const Dyadic> b);

FloatWord to_float(std::span<const Dyadic> a);

/// Pull-based producer of real symbols x(1), x(2), ...
///
/// Streams are single-consumer. clone() returns an independent stream
/// positioned at the start.
class SymbolStream {
 public:
  virtual ~SymbolStream() = default;
  /// Next symbol, or nullopt once a finite stream is exhausted.
  virtual std::optional<Dyadic> next() = 0;
  virtual std::unique_ptr<SymbolStream> clone() const = 0;
};

/// Extracts up to n symbols from the current position.
RealWord take(SymbolStream& stream, std::size_t n);
/// First n symbols of a fresh clone; repeated calls agree.
RealWord prefix(const SymbolStream& stream, std::size_t n);

/// Finite word as a stream.
class WordStream final : public SymbolStream {
 public:
  explicit WordStream(RealWord word) : word_(std::make_shared<const RealWord>(std::move(word))) {}
  std::optional<Dyadic> next() override;
  std::unique_ptr<SymbolStream> clone() const override;

 private:
  std::shared_ptr<const RealWord> word_;
  std::size_t position_ = 0;
};

/// period period period ...
class PeriodicStream final : public SymbolStream {
 public:
  explicit PeriodicStream(RealWord period);
  std::optional<Dyadic> next() override;
  std::unique_ptr<SymbolStream> clone() const override;

 private:
  std::shared_ptr<const RealWord> period_;
  std::size_t position_ = 0;
};

// Word file format: one word per line, space-separated symbols. Discrete
// symbols are bare tokens; real symbols are decimals or p/2^q literals.
// Blank lines and lines starting with '#' are skipped by read_words.

/// How bare numeric tokens such as "0" are read. Under automatic, a line
/// of numeric tokens is real-valued; pass discrete when the alphabet itself
/// uses digit glyphs.
enum class SymbolKind { automatic, discrete, real };

Word parse_word_line(std::string_view line, SymbolKind kind = SymbolKind::automatic);
std::vector<Word> read_words(std::string_view text, SymbolKind kind = SymbolKind::automatic);
std::string format_word(const Word& word);

}  // namespace symdyn
