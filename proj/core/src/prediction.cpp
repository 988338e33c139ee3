#include "symdyn/prediction.hpp"

#include <algorithm>

namespace symdyn {

namespace {

bool starts_with(const DiscreteWord& word, const DiscreteWord& front) {
  return word.size() >= front.size() && word.compare(0, front.size(), front) == 0;
}

// Groups a sorted level L_n by the first `front` symbols and calls
// visit(front_word, tails) for each group in order; stops when visit
// returns true.
template <class Visit>
void for_each_group(const std::vector<DiscreteWord>& level, std::size_t front, Visit visit) {
  std::size_t i = 0;
  std::vector<DiscreteWord> tails;
  while (i < level.size()) {
    DiscreteWord head = level[i].substr(0, front);
    tails.clear();
    while (i < level.size() && level[i].compare(0, front, head) == 0) {
      tails.push_back(level[i].substr(front));
      ++i;
    }
    tails.erase(std::unique(tails.begin(), tails.end()), tails.end());
    if (visit(head, tails)) return;
  }
}

}  // namespace

std::vector<DiscreteWord> extensions(const LanguageOracle& oracle, const DiscreteWord& past, std::size_t k,
                                     std::size_t cap) {
  if (!oracle.contains(past)) throw NotInLanguage("'" + oracle.alphabet().render(past) + "' is not in the language");
  auto level = oracle.words(past.size() + k, cap);
  std::vector<DiscreteWord> out;
  for (auto it = std::lower_bound(level.begin(), level.end(), past); it != level.end() && starts_with(*it, past); ++it)
    out.push_back(it->substr(past.size()));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BranchingProfile past_branching(const LanguageOracle& oracle, std::size_t m, std::size_t k, std::size_t cap) {
  BranchingProfile profile;
  profile.m = m;
  profile.k = k;
  profile.sample_based = oracle.sample_based();
  auto pasts = oracle.words(m, cap);
  auto level = oracle.words(m + k, cap);
  std::map<DiscreteWord, std::size_t> counts;
  for (const auto& p : pasts) counts[p] = 0;
  for_each_group(level, m, [&](const DiscreteWord& head, const std::vector<DiscreteWord>& tails) {
    counts[head] = tails.size();
    return false;
  });
  for (const auto& [past, count] : counts) {
    ++profile.histogram[count];
    if (count > profile.max_extensions) {
      profile.max_extensions = count;
      profile.argmax_past = past;
    }
  }
  return profile;
}

PeriodicityDecision is_periodic_union(const TransferGraph& graph) {
  if (graph.empty()) throw EmptySubshift();
  PeriodicityDecision decision;
  auto essential = graph.essential_vertices();
  decision.cycle_length_total = essential.size();
  for (auto v : essential) {
    auto outs = graph.out_edges(v);
    if (outs.size() >= 2) {
      decision.witness = graph.vertices()[v];
      for (auto e : outs) decision.witness_extensions.push_back(DiscreteWord(1, graph.edges()[e].block.back()));
      return decision;
    }
  }
  decision.periodic_union = true;
  return decision;
}

namespace {

// Shared driver: looks for the first b (by length, then lexicographically)
// such that all words of length |b| + |a| + k beginning with ba share one
// tail, optionally required to equal `wanted`.
WordSearchResult search_front(const LanguageOracle& oracle, const DiscreteWord& a, std::size_t k,
                              const std::optional<DiscreteWord>& wanted, std::size_t max_length, std::size_t cap) {
  WordSearchResult result;
  result.sample_based = oracle.sample_based();
  for (std::size_t length = 0; length <= max_length; ++length) {
    std::vector<DiscreteWord> level;
    try {
      level = oracle.words(length + a.size() + k, cap);
    } catch (const BudgetExceeded& e) {
      result.note = std::string("stopped: ") + e.what();
      return result;
    }
    bool found = false;
    for_each_group(level, length + a.size(), [&](const DiscreteWord& head, const std::vector<DiscreteWord>& tails) {
      if (head.compare(length, a.size(), a) != 0) return false;
      ++result.candidates;
      if (tails.size() != 1) return false;
      if (wanted && tails.front() != *wanted) return false;
      result.word = head.substr(0, length);
      result.forced = tails.front();
      result.horizon = length + a.size() + k;
      found = true;
      return true;
    });
    if (found) {
      result.note = result.sample_based ? "certified on the sample only" : "certified on the full language level";
      return result;
    }
  }
  result.note = "not found with length <= " + std::to_string(max_length);
  return result;
}

}  // namespace

WordSearchResult find_predictor_word(const LanguageOracle& oracle, const DiscreteWord& a, std::size_t k,
                                     std::size_t max_length, std::size_t cap) {
  if (!oracle.contains(a)) throw NotInLanguage("'" + oracle.alphabet().render(a) + "' is not in the language");
  return search_front(oracle, a, k, std::nullopt, max_length, cap);
}

WordSearchResult find_forcing_word(const LanguageOracle& oracle, const DiscreteWord& u, std::size_t max_length,
                                   std::size_t cap) {
  if (!oracle.contains(u)) throw NotInLanguage("'" + oracle.alphabet().render(u) + "' is not in the language");
  return search_front(oracle, DiscreteWord{}, u.size(), u, max_length, cap);
}

}  // namespace symdyn
