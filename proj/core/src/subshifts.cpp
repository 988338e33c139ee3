#include "symdyn/subshifts.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

namespace symdyn {

std::size_t default_enumeration_cap() {
  if (const char* env = std::getenv("SYMDYN_ENUM_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultEnumerationCap;
}

namespace {

__extension__ using Wide = unsigned __int128;

[[noreturn]] void over_budget(std::size_t n, std::size_t cap) {
  throw BudgetExceeded("enumeration of L_" + std::to_string(n) + " exceeds the cap of " + std::to_string(cap) + " words",
                       cap);
}


// Compares as unsigned so label order is alphabet order.
bool label_less(const DiscreteWord& a, const DiscreteWord& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
    return static_cast<unsigned char>(x) < static_cast<unsigned char>(y);
  });
}

void sort_labels(std::vector<DiscreteWord>& words) {
  std::sort(words.begin(), words.end(), label_less);
  words.erase(std::unique(words.begin(), words.end()), words.end());
}

}  // namespace

// ---------------------------------------------------------------------------

Alphabet::Alphabet(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() > 256) throw std::invalid_argument("alphabets are limited to 256 symbols");
  std::set<std::string> seen;
  for (const auto& t : tokens_) {
    if (t.empty()) throw std::invalid_argument("empty alphabet token");
    if (!seen.insert(t).second) throw std::invalid_argument("duplicate alphabet token '" + t + "'");
    if (t.size() != 1) single_char_ = false;
  }
}

Alphabet Alphabet::from_chars(std::string_view glyphs) {
  std::vector<std::string> tokens;
  for (char c : glyphs) tokens.emplace_back(1, c);
  return Alphabet(std::move(tokens));
}

Alphabet Alphabet::product(const Alphabet& left, const Alphabet& right) {
  if (left.size() * right.size() > 256) throw std::invalid_argument("product alphabet exceeds 256 symbols");
  std::vector<std::string> tokens;
  for (const auto& a : left.tokens_) {
    for (const auto& b : right.tokens_) tokens.push_back("(" + a + "," + b + ")");
  }
  return Alphabet(std::move(tokens));
}

std::optional<Label> Alphabet::find(std::string_view token) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i] == token) return static_cast<Label>(i);
  }
  return std::nullopt;
}

DiscreteWord Alphabet::encode(std::string_view glyphs) const {
  DiscreteWord out;
  out.reserve(glyphs.size());
  for (char c : glyphs) {
    auto label = find(std::string_view(&c, 1));
    if (!label) throw std::invalid_argument(std::string("symbol '") + c + "' is not in the alphabet");
    out.push_back(static_cast<char>(*label));
  }
  return out;
}

DiscreteWord Alphabet::encode(const std::vector<std::string>& tokens) const {
  DiscreteWord out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto label = find(t);
    if (!label) throw std::invalid_argument("symbol '" + t + "' is not in the alphabet");
    out.push_back(static_cast<char>(*label));
  }
  return out;
}

std::string Alphabet::render(const DiscreteWord& word) const {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i && !single_char_) out.push_back(' ');
    out += token(static_cast<Label>(word[i]));
  }
  return out;
}

std::vector<std::string> Alphabet::tokens_of(const DiscreteWord& word) const {
  std::vector<std::string> out;
  out.reserve(word.size());
  for (char c : word) out.push_back(token(static_cast<Label>(c)));
  return out;
}

Language language(const LanguageOracle& oracle, std::size_t n, std::size_t cap) {
  return Language{n, oracle.words(n, cap), oracle.sample_based()};
}

std::vector<DiscreteWord> factors(const DiscreteWord& word, std::size_t n) {
  std::vector<DiscreteWord> out;
  if (n > word.size()) return out;
  out.reserve(word.size() - n + 1);
  for (std::size_t i = 0; i + n <= word.size(); ++i) out.push_back(word.substr(i, n));
  sort_labels(out);
  return out;
}

std::vector<DiscreteWord> cyclic_factors(const DiscreteWord& period, std::size_t n) {
  if (period.empty()) return {};
  DiscreteWord unrolled;
  unrolled.reserve(period.size() + n);
  while (unrolled.size() < period.size() + n) unrolled += period;
  std::vector<DiscreteWord> out;
  out.reserve(period.size());
  for (std::size_t i = 0; i < period.size(); ++i) out.push_back(unrolled.substr(i, n));
  sort_labels(out);
  return out;
}

// ---------------------------------------------------------------------------
// TransferGraph

TransferGraph::TransferGraph(Alphabet alphabet, std::size_t order, std::vector<DiscreteWord> vertices,
                             std::vector<DiscreteWord> blocks)
    : alphabet_(std::move(alphabet)), order_(order), vertices_(std::move(vertices)) {
  if (order_ == 0) throw std::invalid_argument("transfer graphs need order at least 1");
  sort_labels(vertices_);
  sort_labels(blocks);
  for (const auto& v : vertices_) {
    if (v.size() != order_) throw std::invalid_argument("vertex block of wrong length");
  }
  for (auto& b : blocks) {
    if (b.size() != order_ + 1) throw std::invalid_argument("edge block of wrong length");
    auto from = vertex_index(b.substr(0, order_));
    auto to = vertex_index(b.substr(1));
    if (!from || !to) continue;
    edges_.push_back(Edge{*from, *to, std::move(b)});
  }
  out_.assign(vertices_.size(), {});
  in_.assign(vertices_.size(), {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    out_[edges_[i].from].push_back(i);
    in_[edges_[i].to].push_back(i);
  }
  trim();
}

std::optional<std::size_t> TransferGraph::vertex_index(const DiscreteWord& block) const {
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), block, label_less);
  if (it == vertices_.end() || *it != block) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

void TransferGraph::trim() {
  essential_.assign(vertices_.size(), true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
      if (!essential_[v]) continue;
      auto alive = [&](std::size_t e) { return essential_[edges_[e].from] && essential_[edges_[e].to]; };
      bool has_out = std::any_of(out_[v].begin(), out_[v].end(), alive);
      bool has_in = std::any_of(in_[v].begin(), in_[v].end(), alive);
      if (!has_out || !has_in) {
        essential_[v] = false;
        changed = true;
      }
    }
  }
  essential_blocks_.clear();
  for (const auto& e : edges_) {
    if (edge_essential(e)) essential_blocks_.insert(e.block);
  }
}

std::vector<std::size_t> TransferGraph::essential_vertices() const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (essential_[v]) out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> TransferGraph::out_edges(std::size_t vertex) const {
  std::vector<std::size_t> out;
  if (!essential_.at(vertex)) return out;
  for (auto e : out_[vertex]) {
    if (edge_essential(edges_[e])) out.push_back(e);
  }
  return out;
}

std::vector<std::size_t> TransferGraph::in_edges(std::size_t vertex) const {
  std::vector<std::size_t> out;
  if (!essential_.at(vertex)) return out;
  for (auto e : in_[vertex]) {
    if (edge_essential(edges_[e])) out.push_back(e);
  }
  return out;
}

bool TransferGraph::empty() const { return std::none_of(essential_.begin(), essential_.end(), [](bool b) { return b; }); }

std::vector<DiscreteWord> TransferGraph::language(std::size_t n, std::size_t cap) const {
  std::vector<DiscreteWord> out;
  if (empty()) return out;
  if (n == 0) return {DiscreteWord{}};
  if (n <= order_) {
    for (auto v : essential_vertices()) out.push_back(vertices_[v].substr(0, n));
    sort_labels(out);
    if (out.size() > cap) over_budget(n, cap);
    return out;
  }
  // Depth-first over walks of n - order edges; vertices are visited in
  // sorted order and out-edges by target, so output is already sorted.
  std::size_t steps = n - order_;
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // (vertex, next out-edge slot)
  DiscreteWord current;
  std::vector<std::vector<std::size_t>> outs(vertices_.size());
  for (std::size_t v = 0; v < vertices_.size(); ++v) outs[v] = out_edges(v);
  for (auto start : essential_vertices()) {
    current = vertices_[start];
    stack.assign(1, {start, 0});
    while (!stack.empty()) {
      auto& [v, slot] = stack.back();
      if (stack.size() - 1 == steps) {
        out.push_back(current);
        if (out.size() > cap) over_budget(n, cap);
        stack.pop_back();
        current.pop_back();
        continue;
      }
      if (slot == outs[v].size()) {
        stack.pop_back();
        if (!stack.empty()) current.pop_back();
        continue;
      }
      const Edge& e = edges_[outs[v][slot++]];
      current.push_back(e.block.back());
      stack.emplace_back(e.to, 0);
    }
  }
  sort_labels(out);
  return out;
}

bool TransferGraph::contains(const DiscreteWord& word) const {
  if (empty()) return false;
  if (word.size() <= order_) {
    for (auto v : essential_vertices()) {
      if (vertices_[v].compare(0, word.size(), word) == 0) return true;
    }
    return false;
  }
  for (std::size_t i = 0; i + order_ + 1 <= word.size(); ++i) {
    if (!essential_blocks_.count(word.substr(i, order_ + 1))) return false;
  }
  return true;
}

std::vector<std::vector<double>> TransferGraph::adjacency() const {
  auto ess = essential_vertices();
  std::vector<std::size_t> index(vertices_.size(), 0);
  for (std::size_t i = 0; i < ess.size(); ++i) index[ess[i]] = i;
  std::vector<std::vector<double>> a(ess.size(), std::vector<double>(ess.size(), 0.0));
  for (const auto& e : edges_) {
    if (edge_essential(e)) a[index[e.from]][index[e.to]] += 1.0;
  }
  return a;
}

TransferGraph sft_approximation(const LanguageOracle& oracle, std::size_t m, std::size_t cap) {
  if (m == 0) throw std::invalid_argument("approximation order must be at least 1");
  return TransferGraph(oracle.alphabet(), m, oracle.words(m, cap), oracle.words(m + 1, cap));
}

// ---------------------------------------------------------------------------
// Oracles

std::vector<DiscreteWord> FullShift::words(std::size_t n, std::size_t cap) const {
  std::size_t k = alphabet_.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / std::max<std::size_t>(k, 1)) over_budget(n, cap);
    total *= k;
  }
  if (total > cap) over_budget(n, cap);
  std::vector<DiscreteWord> out;
  out.reserve(total);
  DiscreteWord w(n, '\0');
  for (std::size_t index = 0; index < total; ++index) {
    std::size_t rest = index;
    for (std::size_t i = n; i-- > 0;) {
      w[i] = static_cast<char>(rest % k);
      rest /= k;
    }
    out.push_back(w);
  }
  return out;
}

bool FullShift::contains(const DiscreteWord& word) const {
  return std::all_of(word.begin(), word.end(),
                     [&](char c) { return static_cast<unsigned char>(c) < alphabet_.size(); });
}

std::string FullShift::description() const { return "full shift on " + std::to_string(alphabet_.size()) + " symbols"; }

PeriodicUnion::PeriodicUnion(Alphabet alphabet, std::vector<DiscreteWord> periods)
    : alphabet_(std::move(alphabet)), periods_(std::move(periods)) {
  if (periods_.empty()) throw std::invalid_argument("periodic union needs at least one orbit");
  for (const auto& p : periods_) {
    if (p.empty()) throw std::invalid_argument("orbit words must be nonempty");
  }
}

std::vector<DiscreteWord> PeriodicUnion::words(std::size_t n, std::size_t cap) const {
  std::vector<DiscreteWord> out;
  for (const auto& p : periods_) {
    auto f = cyclic_factors(p, n);
    out.insert(out.end(), f.begin(), f.end());
  }
  sort_labels(out);
  if (out.size() > cap) over_budget(n, cap);
  return out;
}

bool PeriodicUnion::contains(const DiscreteWord& word) const {
  for (const auto& p : periods_) {
    DiscreteWord unrolled;
    while (unrolled.size() < p.size() + word.size()) unrolled += p;
    if (unrolled.find(word) != DiscreteWord::npos) return true;
  }
  return false;
}

std::string PeriodicUnion::description() const {
  std::string out = "periodic orbits of";
  for (const auto& p : periods_) out += " " + alphabet_.render(p);
  return out;
}

ForbiddenWordShift::ForbiddenWordShift(Alphabet alphabet, std::vector<DiscreteWord> forbidden)
    : forbidden_(std::move(forbidden)), graph_(build(alphabet, forbidden_)) {}

TransferGraph ForbiddenWordShift::build(const Alphabet& alphabet, const std::vector<DiscreteWord>& forbidden) {
  std::size_t longest = 0;
  for (const auto& f : forbidden) longest = std::max(longest, f.size());
  std::size_t order = std::max<std::size_t>(1, longest == 0 ? 1 : longest - 1);
  FullShift full(alphabet);
  auto allowed = [&](const DiscreteWord& w) {
    return std::none_of(forbidden.begin(), forbidden.end(),
                        [&](const DiscreteWord& f) { return w.find(f) != DiscreteWord::npos; });
  };
  std::vector<DiscreteWord> vertices, blocks;
  for (auto& w : full.words(order, kDefaultEnumerationCap)) {
    if (allowed(w)) vertices.push_back(std::move(w));
  }
  for (auto& w : full.words(order + 1, kDefaultEnumerationCap)) {
    if (allowed(w)) blocks.push_back(std::move(w));
  }
  return TransferGraph(alphabet, order, std::move(vertices), std::move(blocks));
}

std::vector<DiscreteWord> ForbiddenWordShift::words(std::size_t n, std::size_t cap) const {
  return graph_.language(n, cap);
}

bool ForbiddenWordShift::contains(const DiscreteWord& word) const { return graph_.contains(word); }

std::string ForbiddenWordShift::description() const {
  std::string out = "SFT forbidding";
  if (forbidden_.empty()) out += " nothing";
  for (const auto& f : forbidden_) out += " " + graph_.alphabet().render(f);
  return out;
}

std::string GraphShift::description() const {
  return "SFT of order-" + std::to_string(graph_.order()) + " transfer graph";
}

SturmianShift::SturmianShift(Rational alpha) : alphabet_(Alphabet::from_chars("01")), alpha_(alpha) {
  if (alpha_.num <= 0 || alpha_.num >= alpha_.den) throw std::invalid_argument("rotation parameter must lie in (0,1)");
  auto q = static_cast<std::size_t>(alpha_.den);
  auto p = static_cast<std::size_t>(alpha_.num);
  period_.resize(q);
  // Orbit point i sits at (j + 1/2)/q with j = i p mod q; it codes 1 exactly
  // when it lies in [1 - p/q, 1), i.e. j >= q - p.
  for (std::size_t i = 0; i < q; ++i) {
    std::size_t j = static_cast<std::size_t>((static_cast<Wide>(i) * p) % q);
    period_[i] = j >= q - p ? '\1' : '\0';
  }
}

std::vector<DiscreteWord> SturmianShift::words(std::size_t n, std::size_t cap) const {
  auto out = cyclic_factors(period_, n);
  if (out.size() > cap) over_budget(n, cap);
  return out;
}

bool SturmianShift::contains(const DiscreteWord& word) const {
  DiscreteWord unrolled;
  while (unrolled.size() < period_.size() + word.size()) unrolled += period_;
  return unrolled.find(word) != DiscreteWord::npos;
}

std::string SturmianShift::description() const { return "Sturmian rotation coding, alpha = " + alpha_.to_string(); }

SubstitutionShift::SubstitutionShift(Alphabet alphabet, std::vector<DiscreteWord> images, Label start)
    : alphabet_(std::move(alphabet)), images_(std::move(images)), start_(start) {
  if (images_.size() != alphabet_.size()) throw std::invalid_argument("one image per alphabet symbol required");
  for (const auto& img : images_) {
    if (img.empty()) throw std::invalid_argument("substitution images must be nonempty");
  }
  if (start_ >= alphabet_.size()) throw std::invalid_argument("start symbol outside the alphabet");
}

std::vector<DiscreteWord> SubstitutionShift::words(std::size_t n, std::size_t cap) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(n); it != cache_.end()) return it->second;
  }
  constexpr std::size_t kMaxLength = std::size_t{1} << 24;
  DiscreteWord current(1, static_cast<char>(start_));
  std::vector<DiscreteWord> previous;
  int stable_rounds = 0;
  while (true) {
    DiscreteWord next;
    for (char c : current) next += images_[static_cast<unsigned char>(c)];
    if (next.size() > kMaxLength) break;
    bool grew = next.size() > current.size();
    current = std::move(next);
    auto f = factors(current, n);
    if (f.size() > cap) over_budget(n, cap);
    if (f == previous && current.size() >= 4 * n) {
      if (++stable_rounds >= 2) break;
    } else {
      stable_rounds = 0;
    }
    previous = std::move(f);
    if (!grew && current.size() < n) break;
  }
  std::lock_guard lock(mutex_);
  cache_[n] = previous;
  return previous;
}

bool SubstitutionShift::contains(const DiscreteWord& word) const {
  auto l = words(word.size(), default_enumeration_cap());
  return std::binary_search(l.begin(), l.end(), word, label_less);
}

std::string SubstitutionShift::description() const {
  std::string out = "substitution";
  for (std::size_t i = 0; i < images_.size(); ++i)
    out += " " + alphabet_.token(static_cast<Label>(i)) + "->" + alphabet_.render(images_[i]);
  return out;
}

SampleShift::SampleShift(Alphabet alphabet, DiscreteWord sample, std::string origin)
    : alphabet_(std::move(alphabet)), sample_(std::move(sample)), origin_(std::move(origin)) {}

std::vector<DiscreteWord> SampleShift::words(std::size_t n, std::size_t cap) const {
  auto out = factors(sample_, n);
  if (out.size() > cap) over_budget(n, cap);
  return out;
}

bool SampleShift::contains(const DiscreteWord& word) const { return sample_.find(word) != DiscreteWord::npos; }

std::string SampleShift::description() const {
  return "sample of " + std::to_string(sample_.size()) + " symbols from " + origin_;
}

ProductShift::ProductShift(OraclePtr left, OraclePtr right)
    : left_(std::move(left)), right_(std::move(right)),
      alphabet_(Alphabet::product(left_->alphabet(), right_->alphabet())) {}

std::pair<DiscreteWord, DiscreteWord> ProductShift::split(const DiscreteWord& word) const {
  std::size_t k = right_->alphabet().size();
  DiscreteWord a, b;
  for (char c : word) {
    auto v = static_cast<unsigned char>(c);
    a.push_back(static_cast<char>(v / k));
    b.push_back(static_cast<char>(v % k));
  }
  return {a, b};
}

DiscreteWord ProductShift::pair(const DiscreteWord& left, const DiscreteWord& right) const {
  std::size_t k = right_->alphabet().size();
  DiscreteWord out(left.size(), '\0');
  for (std::size_t i = 0; i < left.size(); ++i)
    out[i] = static_cast<char>(static_cast<unsigned char>(left[i]) * k + static_cast<unsigned char>(right[i]));
  return out;
}

std::vector<DiscreteWord> ProductShift::words(std::size_t n, std::size_t cap) const {
  auto a = left_->words(n, cap);
  auto b = right_->words(n, cap);
  if (!a.empty() && b.size() > cap / a.size()) over_budget(n, cap);
  std::vector<DiscreteWord> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back(pair(x, y));
  }
  sort_labels(out);
  return out;
}

bool ProductShift::contains(const DiscreteWord& word) const {
  auto [a, b] = split(word);
  return left_->contains(a) && right_->contains(b);
}

std::string ProductShift::description() const {
  return "product of (" + left_->description() + ") and (" + right_->description() + ")";
}

OraclePtr product_oracle(OraclePtr left, OraclePtr right) {
  return std::make_shared<ProductShift>(std::move(left), std::move(right));
}

}  // namespace symdyn
