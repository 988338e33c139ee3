#pragma once

// Finite checks for marker families: families I of subsets of {0..T-1} with
//   (1) |I| >= 2^(delta T),
//   (2) |u - v| >= gap for distinct u, v in the same set,
//   (3) A n (B + k) nonempty for all A, B in I and 0 <= k <= shift_bound.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symdyn/words.hpp"

namespace symdyn {

using IndexSet = std::vector<unsigned>;
using MarkerFamily = std::vector<IndexSet>;

struct MarkerParams {
  unsigned T = 0;
  unsigned gap = 1;
  unsigned shift_bound = 0;
  double delta = 0;

  void validate() const;
  /// Smallest family size meeting condition 1.
  std::size_t required_size() const;
};

/// Default shift bound floor(9T/10).
unsigned default_shift_bound(unsigned T);

struct MarkerViolation {
  int condition = 0;
  std::optional<IndexSet> a, b;
  std::optional<unsigned> k;
  std::optional<std::pair<unsigned, unsigned>> pair;
  std::string describe() const;
};

struct MarkerDecision {
  bool holds = false;
  std::optional<MarkerViolation> violation;
};

/// Sets are normalized (sorted, deduplicated) and duplicate sets collapse.
/// Throws std::invalid_argument on indices outside {0..T-1}.
MarkerDecision verify_marker_family(MarkerFamily family, const MarkerParams& params);

struct MarkerSearchResult {
  bool found = false;
  MarkerFamily family;
  std::size_t required = 0;
  std::size_t candidates = 0;
  std::uint64_t nodes = 0;
  bool exhaustive = false;
  std::string note;
};

constexpr unsigned kMarkerSearchMaxT = 24;

/// Candidate sets are all spacing-valid subsets that satisfy condition 3
/// against themselves; a family is a clique of mutually compatible
/// candidates. Returns the largest family seen. Throws BudgetExceeded when
/// the node budget runs out before a family of the required size is found.
MarkerSearchResult search_marker_family(const MarkerParams& params, std::uint64_t budget = 1'000'000);

class HypothesisViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct JointOccurrence {
  DiscreteWord a, b;
  std::optional<std::size_t> u;
};

/// For each pair (a, b), the first u where a occurs in z1 and b occurs in z2.
/// First checks that `anchor` occurs in z1 at every index of A and in z2 at
/// every index of B + k.
std::vector<JointOccurrence> joint_occurrence_check(const DiscreteWord& z1, const DiscreteWord& z2,
                                                    const IndexSet& A, const IndexSet& B, unsigned k,
                                                    const DiscreteWord& anchor,
                                                    const std::vector<std::pair<DiscreteWord, DiscreteWord>>& pairs);

}  // namespace symdyn
