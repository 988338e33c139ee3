#pragma once

// Past -> future analysis over language oracles.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symdyn/subshifts.hpp"

namespace symdyn {

/// The past is not a word of the subshift (as opposed to having no futures).
class NotInLanguage : public std::invalid_argument {
 public:
  explicit NotInLanguage(const std::string& what) : std::invalid_argument(what) {}
};

/// Futures u of length k with wu in the language, sorted.
std::vector<DiscreteWord> extensions(const LanguageOracle& oracle, const DiscreteWord& past, std::size_t k,
                                     std::size_t cap = default_enumeration_cap());

struct BranchingProfile {
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t max_extensions = 0;
  DiscreteWord argmax_past;  // lexicographically first past attaining the max
  std::map<std::size_t, std::size_t> histogram;  // extension count -> number of pasts
  bool sample_based = false;
};

BranchingProfile past_branching(const LanguageOracle& oracle, std::size_t m, std::size_t k,
                                std::size_t cap = default_enumeration_cap());

struct PeriodicityDecision {
  bool periodic_union = false;
  /// On a negative answer: a vertex block with two or more one-symbol futures.
  std::optional<DiscreteWord> witness;
  std::vector<DiscreteWord> witness_extensions;
  /// Number of essential vertices; on a positive answer this is the total
  /// length of the cycles and bounds |L_n| for every n.
  std::size_t cycle_length_total = 0;
};

/// Decides whether the SFT of the graph is a finite union of periodic
/// orbits: true iff every essential vertex has exactly one essential
/// out-edge. Throws EmptySubshift on an empty essential part.
PeriodicityDecision is_periodic_union(const TransferGraph& graph);

/// Outcome of a bounded predictor or forcing-word search. A word found is
/// certified on L_horizon of the oracle; for exact oracles that is a proof,
/// for sample-based ones it is only as good as the sample.
struct WordSearchResult {
  std::optional<DiscreteWord> word;
  DiscreteWord forced;       // the continuation the word forces
  std::size_t horizon = 0;   // length of the language level used to certify
  bool sample_based = false;
  std::size_t candidates = 0;
  std::string note;
};

/// Shortest, then lexicographically first, b with ba in the language and a
/// single length-k continuation of ba. Searches |b| = 0..max_length.
WordSearchResult find_predictor_word(const LanguageOracle& oracle, const DiscreteWord& a, std::size_t k,
                                     std::size_t max_length, std::size_t cap = default_enumeration_cap());

/// Shortest v every occurrence of which is followed by u.
WordSearchResult find_forcing_word(const LanguageOracle& oracle, const DiscreteWord& u, std::size_t max_length,
                                   std::size_t cap = default_enumeration_cap());

}  // namespace symdyn
