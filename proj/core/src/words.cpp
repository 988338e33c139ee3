#include "symdyn/words.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace symdyn {

Dyadic::Dyadic(long value) : mantissa_(value) {}

Dyadic Dyadic::from_parts(mpz_class mantissa, std::uint64_t exponent) {
  Dyadic d;
  d.mantissa_ = std::move(mantissa);
  d.exponent_ = exponent;
  d.normalize();
  return d;
}

Dyadic Dyadic::from_double(double value) {
  if (!std::isfinite(value)) throw WordError("non-finite value has no dyadic form");
  int exp = 0;
  double frac = std::frexp(value, &exp);  // value = frac * 2^exp, |frac| in [0.5, 1)
  // 53 significant bits fit exactly after scaling by 2^53.
  auto scaled = static_cast<std::int64_t>(std::ldexp(frac, 53));
  mpz_class mantissa(static_cast<long>(scaled));
  std::int64_t power = static_cast<std::int64_t>(exp) - 53;
  Dyadic d;
  if (power >= 0) {
    mantissa <<= static_cast<mp_bitcnt_t>(power);
    d.mantissa_ = mantissa;
  } else {
    d.mantissa_ = mantissa;
    d.exponent_ = static_cast<std::uint64_t>(-power);
  }
  d.normalize();
  return d;
}

namespace {

bool is_power_of_two(const mpz_class& v) { return v > 0 && mpz_popcount(v.get_mpz_t()) == 1; }

std::optional<mpq_class> parse_decimal(std::string_view text) {
  std::string s(text);
  bool negative = false;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
    negative = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  std::size_t fraction_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++fraction_digits;
    } else {
      return std::nullopt;
    }
  }
  if (!any_digit) return std::nullopt;
  mpz_class numerator(digits, 10);
  mpz_class denominator;
  mpz_ui_pow_ui(denominator.get_mpz_t(), 10, fraction_digits);
  mpq_class q(numerator, denominator);
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

std::optional<mpz_class> parse_integer(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) return std::nullopt;
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') return std::nullopt;
  }
  std::string s(text.substr(text[0] == '+' ? 1 : 0));
  return mpz_class(s, 10);
}

std::optional<Dyadic> dyadic_from_rational(const mpq_class& q) {
  if (!is_power_of_two(q.get_den())) return std::nullopt;
  auto exponent = static_cast<std::uint64_t>(mpz_sizeinbase(q.get_den().get_mpz_t(), 2) - 1);
  return Dyadic::from_parts(q.get_num(), exponent);
}

}  // namespace

std::optional<Dyadic> Dyadic::parse(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    auto q = parse_decimal(text);
    if (!q) return std::nullopt;
    return dyadic_from_rational(*q);
  }
  auto numerator = parse_integer(text.substr(0, slash));
  if (!numerator) return std::nullopt;
  std::string_view rest = text.substr(slash + 1);
  if (rest.size() > 2 && rest[0] == '2' && rest[1] == '^') {
    auto power = parse_integer(rest.substr(2));
    if (!power || *power < 0 || *power > 1'000'000) return std::nullopt;
    return Dyadic::from_parts(*numerator, power->get_ui());
  }
  auto denominator = parse_integer(rest);
  if (!denominator || *denominator <= 0) return std::nullopt;
  mpq_class q(*numerator, *denominator);
  q.canonicalize();
  return dyadic_from_rational(q);
}

void Dyadic::normalize() {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  auto zeros = static_cast<std::uint64_t>(mpz_scan1(mantissa_.get_mpz_t(), 0));
  auto drop = std::min(zeros, exponent_);
  if (drop > 0) {
    mantissa_ >>= static_cast<mp_bitcnt_t>(drop);
    exponent_ -= drop;
  }
}

double Dyadic::to_double() const {
  if (mantissa_ == 0) return 0.0;
  long exp = 0;
  double d = mpz_get_d_2exp(&exp, mantissa_.get_mpz_t());
  auto total = static_cast<std::int64_t>(exp) - static_cast<std::int64_t>(exponent_);
  if (total < -2000) return 0.0;
  return std::ldexp(d, static_cast<int>(total));
}

std::string Dyadic::to_string() const {
  if (exponent_ == 0) return mantissa_.get_str();
  return mantissa_.get_str() + "/2^" + std::to_string(exponent_);
}

Dyadic Dyadic::scaled(std::int64_t power) const {
  Dyadic d = *this;
  if (power >= 0) {
    auto up = static_cast<std::uint64_t>(power);
    auto from_exponent = std::min(up, d.exponent_);
    d.exponent_ -= from_exponent;
    if (up > from_exponent) d.mantissa_ <<= static_cast<mp_bitcnt_t>(up - from_exponent);
  } else {
    d.exponent_ += static_cast<std::uint64_t>(-power);
  }
  d.normalize();
  return d;
}

Dyadic Dyadic::abs() const {
  Dyadic d = *this;
  d.mantissa_ = ::abs(d.mantissa_);
  return d;
}

namespace {

// Brings both mantissas to the larger exponent.
void align(const Dyadic& a, const Dyadic& b, mpz_class& ma, mpz_class& mb, std::uint64_t& exponent) {
  exponent = std::max(a.exponent(), b.exponent());
  ma = a.mantissa();
  mb = b.mantissa();
  if (exponent > a.exponent()) ma <<= static_cast<mp_bitcnt_t>(exponent - a.exponent());
  if (exponent > b.exponent()) mb <<= static_cast<mp_bitcnt_t>(exponent - b.exponent());
}

}  // namespace

Dyadic& Dyadic::operator+=(const Dyadic& other) {
  mpz_class ma, mb;
  std::uint64_t exponent = 0;
  align(*this, other, ma, mb, exponent);
  mantissa_ = ma + mb;
  exponent_ = exponent;
  normalize();
  return *this;
}

Dyadic& Dyadic::operator-=(const Dyadic& other) {
  mpz_class ma, mb;
  std::uint64_t exponent = 0;
  align(*this, other, ma, mb, exponent);
  mantissa_ = ma - mb;
  exponent_ = exponent;
  normalize();
  return *this;
}

Dyadic& Dyadic::operator*=(long factor) {
  mantissa_ *= factor;
  normalize();
  return *this;
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return Dyadic::from_parts(a.mantissa_ * b.mantissa_, a.exponent_ + b.exponent_);
}

Dyadic operator-(const Dyadic& a) {
  Dyadic d = a;
  d.mantissa_ = -d.mantissa_;
  return d;
}

bool operator==(const Dyadic& a, const Dyadic& b) {
  return a.exponent_ == b.exponent_ && a.mantissa_ == b.mantissa_;
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  mpz_class ma, mb;
  std::uint64_t exponent = 0;
  align(a, b, ma, mb, exponent);
  int c = cmp(ma, mb);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

mpq_class Dyadic::to_rational() const {
  mpz_class denominator = 1;
  denominator <<= static_cast<mp_bitcnt_t>(exponent_);
  mpq_class q(mantissa_, denominator);
  q.canonicalize();
  return q;
}

Dyadic weighted_norm(std::span<const Dyadic> x) {
  // Horner from the back: ||x|| = (|x1| + (|x2| + (...)/2)/2)/2.
  Dyadic acc;
  for (auto it = x.rbegin(); it != x.rend(); ++it) {
    acc += it->abs();
    acc = acc.scaled(-1);
  }
  return acc;
}

double weighted_norm(std::span<const double> x) {
  double acc = 0.0;
  for (auto it = x.rbegin(); it != x.rend(); ++it) acc = (std::fabs(*it) + acc) * 0.5;
  return acc;
}

Dyadic weighted_norm(const Word& x) {
  if (const auto* real = std::get_if<RealWord>(&x)) return weighted_norm(std::span<const Dyadic>(*real));
  throw WordError("weighted norm is defined for real-valued words only");
}

Dyadic weighted_distance(std::span<const Dyadic> x, std::span<const Dyadic> y) {
  std::size_t n = std::min(x.size(), y.size());
  Dyadic acc;
  for (std::size_t i = n; i-- > 0;) {
    acc += (x[i] - y[i]).abs();
    acc = acc.scaled(-1);
  }
  return acc;
}

double weighted_distance(std::span<const double> x, std::span<const double> y) {
  std::size_t n = std::min(x.size(), y.size());
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) acc = (std::fabs(x[i] - y[i]) + acc) * 0.5;
  return acc;
}

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0) || eps > 1.0) throw WordError("quantization step must lie in (0, 1]");
}

std::int64_t floor_ratio(const Dyadic& a, const Dyadic& eps) {
  // a/eps = (ma 2^-ea) / (me 2^-ee) = ma 2^ee / (me 2^ea)
  mpz_class numerator = a.mantissa();
  numerator <<= static_cast<mp_bitcnt_t>(eps.exponent());
  mpz_class denominator = eps.mantissa();
  denominator <<= static_cast<mp_bitcnt_t>(a.exponent());
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), numerator.get_mpz_t(), denominator.get_mpz_t());
  return q.get_si();
}

}  // namespace

std::vector<std::int64_t> quantize_indices(std::span<const Dyadic> a, double eps) {
  check_eps(eps);
  Dyadic step = Dyadic::from_double(eps);
  std::vector<std::int64_t> out;
  out.reserve(a.size());
  for (const auto& v : a) out.push_back(floor_ratio(v, step));
  return out;
}

std::vector<std::int64_t> quantize_indices(std::span<const double> a, double eps) {
  check_eps(eps);
  Dyadic step = Dyadic::from_double(eps);
  std::vector<std::int64_t> out;
  out.reserve(a.size());
  for (double v : a) out.push_back(floor_ratio(Dyadic::from_double(v), step));
  return out;
}

FloatWord quantize(std::span<const double> a, double eps) {
  auto idx = quantize_indices(a, eps);
  FloatWord out(idx.size());
  std::transform(idx.begin(), idx.end(), out.begin(), [eps](std::int64_t i) { return static_cast<double>(i) * eps; });
  return out;
}

FloatWord quantize(std::span<const Dyadic> a, double eps) {
  auto idx = quantize_indices(a, eps);
  FloatWord out(idx.size());
  std::transform(idx.begin(), idx.end(), out.begin(), [eps](std::int64_t i) { return static_cast<double>(i) * eps; });
  return out;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw WordError("sup distance needs words of equal length");
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::fabs(a[i] - b[i]));
  return best;
}

Dyadic sup_distance(std::span<const Dyadic> a, std::span<const Dyadic> b) {
  if (a.size() != b.size()) throw WordError("sup distance needs words of equal length");
  Dyadic best;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, (a[i] - b[i]).abs());
  return best;
}

FloatWord to_float(std::span<const Dyadic> a) {
  FloatWord out;
  out.reserve(a.size());
  for (const auto& v : a) out.push_back(v.to_double());
  return out;
}

RealWord take(SymbolStream& stream, std::size_t n) {
  RealWord out;
  out.reserve(n);
  while (out.size() < n) {
    auto s = stream.next();
    if (!s) break;
    out.push_back(std::move(*s));
  }
  return out;
}

RealWord prefix(const SymbolStream& stream, std::size_t n) {
  auto fresh = stream.clone();
  return take(*fresh, n);
}

std::optional<Dyadic> WordStream::next() {
  if (position_ >= word_->size()) return std::nullopt;
  return (*word_)[position_++];
}

std::unique_ptr<SymbolStream> WordStream::clone() const {
  auto copy = std::make_unique<WordStream>(*this);
  copy->position_ = 0;
  return copy;
}

PeriodicStream::PeriodicStream(RealWord period)
    : period_(std::make_shared<const RealWord>(std::move(period))) {
  if (period_->empty()) throw WordError("periodic stream needs a nonempty period");
}

std::optional<Dyadic> PeriodicStream::next() {
  const Dyadic& s = (*period_)[position_];
  position_ = (position_ + 1) % period_->size();
  return s;
}

std::unique_ptr<SymbolStream> PeriodicStream::clone() const {
  auto copy = std::make_unique<PeriodicStream>(*this);
  copy->position_ = 0;
  return copy;
}

namespace {

bool looks_numeric(std::string_view token) {
  if (token.empty()) return false;
  char c = token.front();
  return (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+';
}

}  // namespace

Word parse_word_line(std::string_view line, SymbolKind kind) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(line)};
  std::string token;
  while (in >> token) tokens.push_back(token);

  bool any_numeric = std::any_of(tokens.begin(), tokens.end(), [](const auto& t) { return looks_numeric(t); });
  bool all_numeric = std::all_of(tokens.begin(), tokens.end(), [](const auto& t) { return looks_numeric(t); });
  if (kind == SymbolKind::discrete || (kind == SymbolKind::automatic && !any_numeric)) return tokens;
  if (!all_numeric) throw WordError("word mixes discrete tokens and real symbols: " + std::string(line));

  RealWord word;
  word.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto d = Dyadic::parse(t);
    if (!d) throw WordError("not a dyadic literal: " + t);
    if (d->sign() < 0 || *d > Dyadic(1)) throw WordError("real symbol outside [0,1]: " + t);
    word.push_back(std::move(*d));
  }
  return word;
}

std::vector<Word> read_words(std::string_view text, SymbolKind kind) {
  std::vector<Word> words;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') words.push_back(parse_word_line(line, kind));
    if (end == text.size()) break;
    start = end + 1;
  }
  return words;
}

std::string format_word(const Word& word) {
  std::string out;
  if (const auto* tokens = std::get_if<std::vector<std::string>>(&word)) {
    for (std::size_t i = 0; i < tokens->size(); ++i) {
      if (i) out.push_back(' ');
      out += (*tokens)[i];
    }
    return out;
  }
  const auto& real = std::get<RealWord>(word);
  for (std::size_t i = 0; i < real.size(); ++i) {
    if (i) out.push_back(' ');
    out += real[i].to_string();
  }
  return out;
}

}  // namespace symdyn
