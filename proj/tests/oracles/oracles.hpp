#pragma once

// Reference implementations used only by tests. They are written from the
// definitions, share no code with the library beyond the plain data types,
// and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace oracle {

// Words here are glyph strings such as "0110".

inline std::vector<std::string> all_words(const std::string& glyphs, std::size_t n) {
  std::vector<std::string> out{""};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> next;
    for (const auto& w : out)
      for (char c : glyphs) next.push_back(w + c);
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> avoiding(const std::string& glyphs, std::size_t n,
                                         const std::vector<std::string>& forbidden) {
  std::vector<std::string> out;
  for (const auto& w : all_words(glyphs, n)) {
    bool ok = true;
    for (const auto& f : forbidden) ok = ok && w.find(f) == std::string::npos;
    if (ok) out.push_back(w);
  }
  return out;
}

inline std::set<std::string> factor_set(const std::string& text, std::size_t n) {
  std::set<std::string> out;
  for (std::size_t i = 0; i + n <= text.size(); ++i) out.insert(text.substr(i, n));
  return out;
}

/// s_i = floor((i+1) a + r) - floor(i a + r), in long double.
inline std::string mechanical_word(long double alpha, long double rho, std::size_t length) {
  std::string out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    long double a = std::floor(static_cast<long double>(i + 1) * alpha + rho);
    long double b = std::floor(static_cast<long double>(i) * alpha + rho);
    out.push_back(a - b > 0.5L ? '1' : '0');
  }
  return out;
}

/// Fixed point of 0 -> 01, 1 -> 0.
inline std::string fibonacci_word(std::size_t length) {
  std::string w = "0";
  while (w.size() < length) {
    std::string next;
    for (char c : w) next += c == '0' ? "01" : "0";
    w = next;
  }
  return w.substr(0, length);
}

inline std::set<std::string> cyclic_factor_set(const std::string& period, std::size_t n) {
  std::string text;
  while (text.size() < period.size() + n) text += period;
  std::set<std::string> out;
  for (std::size_t i = 0; i < period.size(); ++i) out.insert(text.substr(i, n));
  return out;
}

// Partitions -----------------------------------------------------------------

inline long double entropy(const std::vector<long double>& masses, const std::vector<int>& atoms) {
  std::map<int, long double> m;
  for (std::size_t i = 0; i < masses.size(); ++i) m[atoms[i]] += masses[i];
  long double h = 0;
  for (auto [a, v] : m)
    if (v > 0) h -= v * std::log(v);
  return h;
}

inline std::vector<int> join(const std::vector<int>& p, const std::vector<int>& q) {
  std::map<std::pair<int, int>, int> ids;
  std::vector<int> out;
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back(ids.emplace(std::pair(p[i], q[i]), ids.size()).first->second);
  return out;
}

inline long double rohlin(const std::vector<long double>& masses, const std::vector<int>& p, const std::vector<int>& q) {
  long double j = entropy(masses, join(p, q));
  return (j - entropy(masses, q)) + (j - entropy(masses, p));
}

// Markers --------------------------------------------------------------------

/// Straight triple loop over the three conditions.
inline bool marker_family_ok(const std::vector<std::set<unsigned>>& family, unsigned T, unsigned gap,
                             unsigned shift_bound, std::size_t required) {
  std::set<std::set<unsigned>> distinct(family.begin(), family.end());
  if (distinct.size() < required) return false;
  for (const auto& s : distinct)
    for (unsigned u : s)
      for (unsigned v : s)
        if (u != v && (u > v ? u - v : v - u) < gap) return false;
  for (unsigned k = 0; k <= shift_bound; ++k)
    for (const auto& a : distinct)
      for (const auto& b : distinct) {
        bool hit = false;
        for (unsigned v : b) hit = hit || a.count(v + k);
        if (!hit) return false;
      }
  (void)T;
  return true;
}

// The non-invertible construction -----------------------------------------------

using Q = mpq_class;
using RWord = std::vector<Q>;

inline Q norm(const RWord& x) {
  Q s = 0, w = 1;
  for (const auto& v : x) {
    w /= 2;
    s += abs(v) * w;
  }
  return s;
}

/// Prepends theta_bit(x): |x|/8 for 0, |x|/4 for 1.
inline RWord prepend_theta(int bit, const RWord& x) {
  Q t = norm(x) / (bit ? 4 : 8);
  RWord out{t};
  out.insert(out.end(), x.begin(), x.end());
  return out;
}

/// tau_b for b given as "b_M ... b_1"; b_1 goes on first.
inline RWord tau(const std::string& bits, const RWord& x) {
  RWord out = x;
  for (auto it = bits.rbegin(); it != bits.rend(); ++it) out = prepend_theta(*it == '1', out);
  return out;
}

inline std::string bits_of(std::uint64_t value, std::uint64_t width) {
  std::string s(width, '0');
  for (std::uint64_t i = 0; i < width; ++i)
    if (value >> (width - 1 - i) & 1) s[i] = '1';
  return s;
}

/// x_{n+1} = x_n^M y_n with y_n = tau_b(x_n[k..]) for k = 0..L-1, b in {0,1}^D.
inline RWord next_stage(const RWord& x, std::uint64_t depth, std::uint64_t multiplicity) {
  RWord out;
  for (std::uint64_t i = 0; i < multiplicity; ++i) out.insert(out.end(), x.begin(), x.end());
  for (std::size_t k = 0; k < x.size(); ++k) {
    RWord back(x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << depth); ++b) {
      RWord piece = tau(bits_of(b, depth), back);
      out.insert(out.end(), piece.begin(), piece.end());
    }
  }
  return out;
}

/// Offset of tau_b(x[k..]) inside y for a stage of length L and depth D.
inline std::uint64_t y_offset(std::uint64_t L, std::uint64_t D, std::uint64_t k, std::uint64_t b) {
  std::uint64_t off = 0;
  for (std::uint64_t j = 0; j < k; ++j) off += (std::uint64_t{1} << D) * (L - j + D);
  return off + b * (L - k + D);
}

inline std::uint64_t smallest_power_of_two_at_least(const Q& v) {
  std::uint64_t p = 1;
  while (Q(static_cast<unsigned long>(p)) < v) p *= 2;
  return p;
}

}  // namespace oracle
