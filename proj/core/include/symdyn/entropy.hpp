#pragma once

// Word complexity, entropy estimates, spectral entropy of SFT graphs,
// epsilon-separated counts on real-valued samples and preimage trees.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "symdyn/subshifts.hpp"
#include "symdyn/words.hpp"

namespace symdyn {

struct ComplexityRow {
  std::size_t n = 0;
  std::uint64_t count = 0;
  double slope = 0.0;  // log(count) / n
};

struct ComplexityTable {
  std::string source;
  bool sample_based = false;
  /// Set when enumeration stopped early; rows hold what was computed.
  bool truncated = false;
  std::string note;
  std::vector<ComplexityRow> rows;
};

/// |L_n(X)| for n = 1..n_max. Stops at the first level over the cap and
/// marks the table truncated instead of throwing.
ComplexityTable complexity(const LanguageOracle& oracle, std::size_t n_max,
                           std::size_t cap = default_enumeration_cap());
ComplexityTable complexity_from_counts(std::span<const std::uint64_t> counts, std::string source,
                                       bool sample_based = false);

struct EntropyEstimate {
  double final_slope = 0.0;  // log p(n_max) / n_max
  double fit_slope = 0.0;    // least squares slope of log p(n) over the last half
  std::size_t fit_from = 0;
  std::size_t fit_to = 0;
  std::string note;
};

/// Needs at least four rows.
EntropyEstimate entropy_estimate(const ComplexityTable& table);

struct SpectralEntropy {
  double entropy = 0.0;  // natural log of the spectral radius
  double radius = 0.0;
  double radius_lower = 0.0;  // Collatz-Wielandt bracket for the dominant component
  double radius_upper = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t components = 0;  // nontrivial strongly connected components
  double path_growth = 0.0;    // log(N_{n+1} / N_n) at the last counted n
};

inline constexpr std::size_t kPowerIterationCap = 100000;

/// log of the spectral radius of the essential adjacency matrix. Each
/// strongly connected component is handled separately (power iteration on
/// A + I from the all-ones vector, stopped when the Collatz-Wielandt
/// bracket is narrower than tolerance); the result is the largest.
/// Throws EmptySubshift.
SpectralEntropy sft_entropy_exact(const TransferGraph& graph, double tolerance = 1e-12);

/// Distinct [w]_{eps/2} over the n-subwords w of x(1..horizon+n-1); this
/// bounds every eps-separated family of n-words in the sample.
std::size_t separated_count(std::span<const Dyadic> prefix, std::size_t n, double eps);
std::size_t separated_count(std::span<const double> prefix, std::size_t n, double eps);
/// Reads horizon + n - 1 symbols; throws std::invalid_argument when the
/// stream ends early or horizon is 0.
std::size_t separated_count(const SymbolStream& stream, std::size_t n, double eps, std::size_t horizon);

// Preimage trees ----------------------------------------------------------

/// A selector broke its contract at the node reached by `code`.
class SelectorViolation : public std::runtime_error {
 public:
  SelectorViolation(const std::string& what, std::string code) : std::runtime_error(what), code_(std::move(code)) {}
  /// Branch bits a_n ... a_1 as '0'/'1' characters.
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

template <class Point>
struct SeparatedFamily {
  Point base;
  std::size_t depth = 0;
  double delta = 0.0;
  /// points[i] = tau_a(base) where the bits of i, most significant first,
  /// spell a_n ... a_1.
  std::vector<Point> points;
  bool distinct = false;
  /// Pairwise (n, delta)-separation, checked directly on the orbit segments
  /// (only when depth <= kPairCheckDepth; otherwise it follows from the
  /// per-node contract).
  bool pairs_checked = false;
  bool separated = false;
  /// Smallest d(tau_0(y), tau_1(y)) over the nodes y at each depth 0..n-1.
  std::vector<double> branch_separation;
  double min_separation() const {
    double m = std::numeric_limits<double>::infinity();
    for (double s : branch_separation) m = std::min(m, s);
    return m;
  }

  static constexpr std::size_t kPairCheckDepth = 12;
};

inline std::string branch_code(std::size_t index, std::size_t length) {
  std::string code(length, '0');
  for (std::size_t i = 0; i < length; ++i) {
    if ((index >> (length - 1 - i)) & 1U) code[i] = '1';
  }
  return code;
}

/// Builds {tau_a(x) : a in {0,1}^n} with tau_a = tau_{a_n} o ... o tau_{a_1}.
/// At every node y the contract forward(tau_i(y)) == y and
/// distance(tau_0(y), tau_1(y)) >= delta is checked; a violation throws
/// SelectorViolation carrying the code of the offending child.
template <class Point, class Forward, class Tau0, class Tau1, class Distance>
SeparatedFamily<Point> preimage_tree(const Point& x, Forward forward, Tau0 tau0, Tau1 tau1, Distance distance,
                                     double delta, std::size_t n) {
  SeparatedFamily<Point> family;
  family.base = x;
  family.depth = n;
  family.delta = delta;

  // levels[l][c]: tau_c(x) for the l-bit code c (a_l ... a_1, a_l as the top bit).
  std::vector<std::vector<Point>> levels(1, std::vector<Point>{x});
  for (std::size_t l = 0; l < n; ++l) {
    const auto& parents = levels.back();
    std::vector<Point> children(parents.size() * 2);
    double level_min = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < parents.size(); ++c) {
      Point zero = tau0(parents[c]);
      Point one = tau1(parents[c]);
      std::size_t low = c;
      std::size_t high = c | (std::size_t{1} << l);
      if (!(forward(zero) == parents[c]))
        throw SelectorViolation("tau_0 is not a preimage at a = " + branch_code(low, l + 1), branch_code(low, l + 1));
      if (!(forward(one) == parents[c]))
        throw SelectorViolation("tau_1 is not a preimage at a = " + branch_code(high, l + 1),
                                branch_code(high, l + 1));
      double d = distance(zero, one);
      level_min = std::min(level_min, d);
      if (d < delta)
        throw SelectorViolation("preimages closer than delta at a = " + branch_code(high, l + 1),
                                branch_code(high, l + 1));
      children[low] = std::move(zero);
      children[high] = std::move(one);
    }
    family.branch_separation.push_back(level_min);
    levels.push_back(std::move(children));
  }

  // Bit l of a code is a_{l+1}, so indices already read a_n ... a_1 from the top.
  family.points = levels.back();

  std::vector<Point> sorted = family.points;
  std::sort(sorted.begin(), sorted.end());
  family.distinct = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();

  if (n <= SeparatedFamily<Point>::kPairCheckDepth) {
    // separated[l][c * 2^l + c']: codes c, c' of length l have orbit
    // segments that are delta apart at some time. Applying forward to
    // tau_c(x) strips the top bit of c, so time j reaches level l - j.
    std::vector<char> previous(1, 0);
    for (std::size_t l = 1; l <= n; ++l) {
      std::size_t size = std::size_t{1} << l;
      std::size_t mask = (size >> 1) - 1;
      std::vector<char> current(size * size, 0);
      const auto& nodes = levels[l];
      for (std::size_t c = 0; c < size; ++c) {
        for (std::size_t d = c + 1; d < size; ++d) {
          bool sep = previous[(c & mask) * (size >> 1) + (d & mask)] || distance(nodes[c], nodes[d]) >= delta;
          current[c * size + d] = current[d * size + c] = sep;
        }
      }
      previous = std::move(current);
    }
    std::size_t size = std::size_t{1} << n;
    bool all = true;
    for (std::size_t c = 0; c < size && all; ++c) {
      for (std::size_t d = c + 1; d < size; ++d) {
        if (!previous[c * size + d]) {
          all = false;
          break;
        }
      }
    }
    family.pairs_checked = true;
    family.separated = all;
  } else {
    family.separated = true;
  }
  return family;
}

}  // namespace symdyn
