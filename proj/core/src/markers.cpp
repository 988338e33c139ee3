#include "symdyn/markers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <sstream>

#include "symdyn/subshifts.hpp"

namespace symdyn {

namespace {

std::string set_string(const IndexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

bool meets(const IndexSet& a, const IndexSet& b, unsigned k) {
  // a n (b + k), both sorted
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    unsigned bk = b[j] + k;
    if (a[i] == bk) return true;
    if (a[i] < bk) ++i;
    else ++j;
  }
  return false;
}

}  // namespace

void MarkerParams::validate() const {
  if (T == 0) throw std::invalid_argument("T must be positive");
  if (gap == 0) throw std::invalid_argument("gap must be positive");
  if (shift_bound >= T) throw std::invalid_argument("shift bound must be below T");
  if (!(delta >= 0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be finite and nonnegative");
}

std::size_t MarkerParams::required_size() const {
  double target = std::exp2(delta * T);
  if (target <= 1 + 1e-9) return 1;
  return static_cast<std::size_t>(std::ceil(target - 1e-9));
}

unsigned default_shift_bound(unsigned T) { return 9 * T / 10; }

std::string MarkerViolation::describe() const {
  std::ostringstream out;
  out << "condition " << condition;
  if (condition == 1) {
    out << ": family too small";
  } else if (condition == 2) {
    out << ": set " << set_string(*a) << " has " << pair->first << " and " << pair->second << " closer than the gap";
  } else if (condition == 3) {
    out << ": A=" << set_string(*a) << " B=" << set_string(*b) << " k=" << *k << " gives an empty intersection";
  }
  return out.str();
}

MarkerDecision verify_marker_family(MarkerFamily family, const MarkerParams& params) {
  params.validate();
  for (auto& s : family) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (!s.empty() && s.back() >= params.T)
      throw std::invalid_argument("index " + std::to_string(s.back()) + " outside {0.." + std::to_string(params.T - 1) +
                                  "}");
  }
  {
    MarkerFamily seen;
    for (auto& s : family) {
      if (std::find(seen.begin(), seen.end(), s) == seen.end()) seen.push_back(s);
    }
    family = std::move(seen);
  }

  MarkerDecision d;
  if (family.size() < params.required_size()) {
    d.violation = MarkerViolation{1, {}, {}, {}, {}};
    return d;
  }
  for (const auto& s : family) {
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] - s[i - 1] < params.gap) {
        d.violation = MarkerViolation{2, s, {}, {}, std::pair(s[i - 1], s[i])};
        return d;
      }
    }
  }
  for (unsigned k = 0; k <= params.shift_bound; ++k) {
    for (const auto& a : family) {
      for (const auto& b : family) {
        if (!meets(a, b, k)) {
          d.violation = MarkerViolation{3, a, b, k, {}};
          return d;
        }
      }
    }
  }
  d.holds = true;
  return d;
}

MarkerSearchResult search_marker_family(const MarkerParams& params, std::uint64_t budget) {
  params.validate();
  if (params.T > kMarkerSearchMaxT)
    throw std::invalid_argument("search supports T up to " + std::to_string(kMarkerSearchMaxT));
  const unsigned T = params.T;
  const std::uint64_t full = (std::uint64_t{1} << T) - 1;
  auto compatible = [&](std::uint64_t a, std::uint64_t b) {
    for (unsigned k = 0; k <= params.shift_bound; ++k) {
      if ((a & (b << k) & full) == 0) return false;
    }
    return true;
  };

  MarkerSearchResult res;
  res.required = params.required_size();

  std::vector<std::uint64_t> cand;
  std::function<void(std::uint64_t, unsigned)> grow = [&](std::uint64_t mask, unsigned next) {
    if (mask && compatible(mask, mask)) cand.push_back(mask);
    for (unsigned u = next; u < T; ++u) grow(mask | (std::uint64_t{1} << u), u + params.gap);
  };
  grow(0, 0);
  std::sort(cand.begin(), cand.end(), [](std::uint64_t x, std::uint64_t y) {
    int px = std::popcount(x), py = std::popcount(y);
    return px != py ? px > py : x < y;
  });
  res.candidates = cand.size();

  auto to_family = [&](const std::vector<std::size_t>& clique) {
    MarkerFamily f;
    for (std::size_t v : clique) {
      IndexSet s;
      for (unsigned u = 0; u < T; ++u) {
        if (cand[v] >> u & 1) s.push_back(u);
      }
      f.push_back(std::move(s));
    }
    return f;
  };

  if (cand.empty()) {
    res.exhaustive = true;
    res.note = params.gap > T ? "spacing infeasible for multi-element sets; no singleton passes condition 3"
                              : "no subset satisfies spacing and condition 3 against itself";
    return res;
  }

  std::vector<std::size_t> best;
  // Greedy pass in candidate order.
  for (std::size_t v = 0; v < cand.size() && res.nodes < budget; ++v) {
    ++res.nodes;
    bool ok = true;
    for (std::size_t w : best) ok = ok && compatible(cand[v], cand[w]) && compatible(cand[w], cand[v]);
    if (ok) best.push_back(v);
  }

  constexpr std::size_t kExactLimit = 4096;
  if (cand.size() <= kExactLimit) {
    std::size_t n = cand.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) adj[i][j] = adj[j][i] = compatible(cand[i], cand[j]) && compatible(cand[j], cand[i]);

    bool out_of_budget = false;
    std::vector<std::size_t> current;
    std::function<void(const std::vector<std::size_t>&)> expand = [&](const std::vector<std::size_t>& pool) {
      if (current.size() > best.size()) best = current;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (current.size() + (pool.size() - i) <= best.size()) return;
        if (++res.nodes > budget) {
          out_of_budget = true;
          return;
        }
        std::size_t v = pool[i];
        std::vector<std::size_t> next;
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
          if (adj[v][pool[j]]) next.push_back(pool[j]);
        }
        current.push_back(v);
        expand(next);
        current.pop_back();
        if (out_of_budget) return;
      }
    };
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    expand(all);
    res.exhaustive = !out_of_budget;
  } else {
    res.note = "candidate set too large for exhaustive clique search; greedy family";
  }

  std::sort(best.begin(), best.end());
  if (best.size() >= res.required) {
    res.found = true;
    res.family = to_family(best);
    if (!res.exhaustive && res.note.empty()) res.note = "budget reached; family may not be maximal";
    return res;
  }
  if (!res.exhaustive)
    throw BudgetExceeded("marker search budget of " + std::to_string(budget) + " nodes exhausted; best family size " +
                             std::to_string(best.size()) + " < required " + std::to_string(res.required),
                         budget);
  res.note = "largest family has " + std::to_string(best.size()) + " sets; " + std::to_string(res.required) +
             " required";
  return res;
}

std::vector<JointOccurrence> joint_occurrence_check(const DiscreteWord& z1, const DiscreteWord& z2,
                                                    const IndexSet& A, const IndexSet& B, unsigned k,
                                                    const DiscreteWord& anchor,
                                                    const std::vector<std::pair<DiscreteWord, DiscreteWord>>& pairs) {
  auto occurs = [](const DiscreteWord& z, const DiscreteWord& w, std::size_t at) {
    return at + w.size() <= z.size() && z.compare(at, w.size(), w) == 0;
  };
  for (unsigned i : A) {
    if (!occurs(z1, anchor, i)) throw HypothesisViolation("anchor missing from z' at index " + std::to_string(i));
  }
  for (unsigned i : B) {
    if (!occurs(z2, anchor, std::size_t{i} + k))
      throw HypothesisViolation("anchor missing from z'' at index " + std::to_string(std::size_t{i} + k));
  }
  std::vector<JointOccurrence> out;
  for (const auto& [a, b] : pairs) {
    JointOccurrence j{a, b, std::nullopt};
    std::size_t limit = std::min(z1.size(), z2.size());
    for (std::size_t u = 0; u < limit; ++u) {
      if (occurs(z1, a, u) && occurs(z2, b, u)) {
        j.u = u;
        break;
      }
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace symdyn
