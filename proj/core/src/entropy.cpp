#include "symdyn/entropy.hpp"

#include <cmath>
#include <functional>
#include <string_view>
#include <unordered_set>

namespace symdyn {

ComplexityTable complexity(const LanguageOracle& oracle, std::size_t n_max, std::size_t cap) {
  ComplexityTable table;
  table.source = oracle.description();
  table.sample_based = oracle.sample_based();
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::uint64_t count = 0;
    try {
      count = oracle.words(n, cap).size();
    } catch (const BudgetExceeded& e) {
      table.truncated = true;
      table.note = e.what();
      break;
    }
    table.rows.push_back({n, count, count ? std::log(static_cast<double>(count)) / static_cast<double>(n) : 0.0});
  }
  return table;
}

ComplexityTable complexity_from_counts(std::span<const std::uint64_t> counts, std::string source, bool sample_based) {
  ComplexityTable table;
  table.source = std::move(source);
  table.sample_based = sample_based;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::size_t n = i + 1;
    table.rows.push_back(
        {n, counts[i], counts[i] ? std::log(static_cast<double>(counts[i])) / static_cast<double>(n) : 0.0});
  }
  return table;
}

EntropyEstimate entropy_estimate(const ComplexityTable& table) {
  if (table.rows.size() < 4) throw std::invalid_argument("entropy estimate needs at least four table rows");
  EntropyEstimate est;
  est.final_slope = table.rows.back().slope;
  std::size_t first = table.rows.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double count = 0;
  for (std::size_t i = first; i < table.rows.size(); ++i) {
    double x = static_cast<double>(table.rows[i].n);
    double y = std::log(static_cast<double>(std::max<std::uint64_t>(table.rows[i].count, 1)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    count += 1;
  }
  est.fit_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  est.fit_from = table.rows[first].n;
  est.fit_to = table.rows.back().n;
  if (table.sample_based) est.note = "sample-based: lower approximation of the language";
  if (table.truncated) est.note += (est.note.empty() ? "" : "; ") + std::string("table truncated at the enumeration cap");
  return est;
}

namespace {

// Tarjan's algorithm over a dense adjacency matrix.
std::vector<std::vector<std::size_t>> strongly_connected(const std::vector<std::vector<double>>& a) {
  std::size_t n = a.size();
  std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w = 0; w < n; ++w) {
      if (a[v][w] == 0) continue;
      if (index[w] == SIZE_MAX) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> component;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component.push_back(w);
      } while (w != v);
      components.push_back(std::move(component));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] == SIZE_MAX) visit(v);
  }
  return components;
}

struct Radius {
  double lower = 0, upper = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration on B = A + I restricted to one irreducible block. B is
// primitive, so the Collatz-Wielandt quotients bracket rho(B) and close in.
Radius block_radius(const std::vector<std::vector<double>>& a, const std::vector<std::size_t>& block,
                    double tolerance) {
  std::size_t n = block.size();
  std::vector<double> v(n, 1.0), w(n);
  Radius r;
  for (std::size_t it = 1; it <= kPowerIterationCap; ++it) {
    double lo = INFINITY, hi = 0, norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = v[i];
      for (std::size_t j = 0; j < n; ++j) s += a[block[i]][block[j]] * v[j];
      w[i] = s;
      lo = std::min(lo, s / v[i]);
      hi = std::max(hi, s / v[i]);
      norm = std::max(norm, s);
    }
    r.lower = lo - 1.0;
    r.upper = hi - 1.0;
    r.iterations = it;
    if (hi - lo <= tolerance * hi) {
      r.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  return r;
}

}  // namespace

SpectralEntropy sft_entropy_exact(const TransferGraph& graph, double tolerance) {
  if (graph.empty()) throw EmptySubshift();
  auto a = graph.adjacency();
  SpectralEntropy out;
  out.converged = true;
  double best = 0;
  for (const auto& block : strongly_connected(a)) {
    bool cyclic = block.size() > 1 || a[block[0]][block[0]] > 0;
    if (!cyclic) continue;
    ++out.components;
    Radius r = block_radius(a, block, tolerance);
    double mid = 0.5 * (r.lower + r.upper);
    out.converged = out.converged && r.converged;
    if (mid > best) {
      best = mid;
      out.radius_lower = r.lower;
      out.radius_upper = r.upper;
      out.iterations = r.iterations;
    }
  }
  out.radius = best;
  out.entropy = std::log(out.radius);

  // Independent route: growth of the number of paths of length n.
  std::size_t n = a.size();
  std::vector<double> count(n, 1.0), next(n);
  double previous_total = static_cast<double>(n), growth = 0;
  for (int step = 0; step < 400; ++step) {
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += a[i][j] * count[j];
      next[i] = s;
      total += s;
    }
    growth = std::log(total / previous_total);
    for (std::size_t i = 0; i < n; ++i) count[i] = next[i] / total;
    previous_total = 1.0;
  }
  out.path_growth = growth;
  return out;
}

namespace {

std::size_t count_windows(const std::vector<std::int64_t>& grid, std::size_t n) {
  if (n == 0) return grid.empty() ? 0 : 1;
  if (grid.size() < n) return 0;
  std::u32string cells(grid.size(), U'\0');
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0 || grid[i] > 0x10FFFF) throw std::invalid_argument("quantization grid too fine");
    cells[i] = static_cast<char32_t>(grid[i]);
  }
  std::unordered_set<std::u32string_view> seen;
  std::u32string_view view(cells);
  for (std::size_t i = 0; i + n <= cells.size(); ++i) seen.insert(view.substr(i, n));
  return seen.size();
}

}  // namespace

std::size_t separated_count(std::span<const Dyadic> prefix, std::size_t n, double eps) {
  return count_windows(quantize_indices(prefix, eps / 2), n);
}

std::size_t separated_count(std::span<const double> prefix, std::size_t n, double eps) {
  return count_windows(quantize_indices(prefix, eps / 2), n);
}

std::size_t separated_count(const SymbolStream& stream, std::size_t n, double eps, std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  std::size_t need = horizon + n - 1;
  RealWord sample = prefix(stream, need);
  if (sample.size() < need)
    throw std::invalid_argument("stream ended after " + std::to_string(sample.size()) + " symbols; need " +
                                std::to_string(need));
  return separated_count(std::span<const Dyadic>(sample), n, eps);
}

}  // namespace symdyn
