#pragma once

// Subshifts presented by their languages. Every analysis in the library
// consumes a LanguageOracle: something that can list L_n(X) and test
// membership of a single word.

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <map>
#include <vector>

#include "symdyn/speclang.hpp"
#include "symdyn/words.hpp"

namespace symdyn {

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 22;

/// kDefaultEnumerationCap unless SYMDYN_ENUM_CAP overrides it.
std::size_t default_enumeration_cap();

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::size_t limit) : std::runtime_error(what), limit_(limit) {}
  std::size_t limit() const { return limit_; }

 private:
  std::size_t limit_;
};

class EmptySubshift : public std::invalid_argument {
 public:
  EmptySubshift() : std::invalid_argument("the essential part of the graph is empty") {}
};

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> tokens);
  static Alphabet from_chars(std::string_view glyphs);
  /// Pairs (a, b) labelled a * |right| + b, shown as "(a,b)".
  static Alphabet product(const Alphabet& left, const Alphabet& right);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(Label label) const { return tokens_.at(label); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<Label> find(std::string_view token) const;
  bool single_char() const { return single_char_; }

  /// Glyph string for single-character alphabets ("0110").
  DiscreteWord encode(std::string_view glyphs) const;
  DiscreteWord encode(const std::vector<std::string>& tokens) const;
  /// Glyphs run together for single-character alphabets, else space-separated.
  std::string render(const DiscreteWord& word) const;
  std::vector<std::string> tokens_of(const DiscreteWord& word) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<std::string> tokens_;
  bool single_char_ = true;
};

class LanguageOracle {
 public:
  virtual ~LanguageOracle() = default;
  virtual const Alphabet& alphabet() const = 0;
  /// L_n(X) in ascending order; throws BudgetExceeded when |L_n| > cap.
  virtual std::vector<DiscreteWord> words(std::size_t n, std::size_t cap) const = 0;
  virtual bool contains(const DiscreteWord& word) const = 0;
  /// True when answers come from a finite sample and are lower approximations.
  virtual bool sample_based() const { return false; }
  virtual std::string description() const = 0;
};

using OraclePtr = std::shared_ptr<const LanguageOracle>;

struct Language {
  std::size_t n = 0;
  std::vector<DiscreteWord> words;
  bool sample_based = false;
};

Language language(const LanguageOracle& oracle, std::size_t n, std::size_t cap = default_enumeration_cap());

/// De Bruijn-style graph of order m: vertices are m-blocks, edges are
/// (m+1)-blocks joining their front and back m-blocks. Vertices that cannot
/// lie on a bi-infinite path are flagged non-essential.
class TransferGraph {
 public:
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    DiscreteWord block;
  };

  /// Vertices are the given m-blocks; edges whose end blocks are not
  /// vertices are dropped. Trims to the essential part.
  TransferGraph(Alphabet alphabet, std::size_t order, std::vector<DiscreteWord> vertices,
                std::vector<DiscreteWord> blocks);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t order() const { return order_; }
  const std::vector<DiscreteWord>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool essential(std::size_t vertex) const { return essential_.at(vertex); }
  std::vector<std::size_t> essential_vertices() const;
  /// Essential edges leaving the vertex, ordered by target block.
  std::vector<std::size_t> out_edges(std::size_t vertex) const;
  std::vector<std::size_t> in_edges(std::size_t vertex) const;
  bool edge_essential(const Edge& e) const { return essential_[e.from] && essential_[e.to]; }
  bool empty() const;
  std::optional<std::size_t> vertex_index(const DiscreteWord& block) const;

  /// Language of the SFT given by the essential part.
  std::vector<DiscreteWord> language(std::size_t n, std::size_t cap = default_enumeration_cap()) const;
  bool contains(const DiscreteWord& word) const;

  /// Dense adjacency of the essential part (rows/cols follow essential_vertices()).
  std::vector<std::vector<double>> adjacency() const;

 private:
  void trim();

  Alphabet alphabet_;
  std::size_t order_;
  std::vector<DiscreteWord> vertices_;
  std::vector<Edge> edges_;
  std::vector<bool> essential_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::unordered_set<DiscreteWord> essential_blocks_;
};

/// Y_m: the SFT whose allowed (m+1)-blocks are those of X.
TransferGraph sft_approximation(const LanguageOracle& oracle, std::size_t m,
                                std::size_t cap = default_enumeration_cap());

// Built-in oracles ----------------------------------------------------------

class FullShift final : public LanguageOracle {
 public:
  explicit FullShift(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}
  const Alphabet& alphabet() const override { return alphabet_; }
  std::vector<DiscreteWord> words(std::size_t n, std::size_t cap) const override;
  bool contains(const DiscreteWord& word) const override;
  std::string description() const override;

 private:
  Alphabet alphabet_;
};

/// Union of the periodic orbits of the given words.
class PeriodicUnion final : public LanguageOracle {
 public:
  PeriodicUnion(Alphabet alphabet, std::vector<DiscreteWord> periods);
  const Alphabet& alphabet() const override { return alphabet_; }
  std::vector<DiscreteWord> words(std::size_t n, std::size_t cap) const override;
  bool contains(const DiscreteWord& word) const override;
  std::string description() const override;
  const std::vector<DiscreteWord>& periods() const { return periods_; }

 private:
  Alphabet alphabet_;
  std::vector<DiscreteWord> periods_;
};

/// Shift of finite type given by forbidden words.
class ForbiddenWordShift final : public LanguageOracle {
 public:
  ForbiddenWordShift(Alphabet alphabet, std::vector<DiscreteWord> forbidden);
  const Alphabet& alphabet() const override { return graph_.alphabet(); }
  std::vector<DiscreteWord> words(std::size_t n, std::size_t cap) const override;
  bool contains(const DiscreteWord& word) const override;
  std::string description() const override;
  const TransferGraph& graph() const { return graph_; }

 private:
  static TransferGraph build(const Alphabet& alphabet, const std::vector<DiscreteWord>& forbidden);
  std::vector<DiscreteWord> forbidden_;
  TransferGraph graph_;
};

/// The SFT carried by a transfer graph.
class GraphShift final : public LanguageOracle {
 public:
  explicit GraphShift(TransferGraph graph) : graph_(std::move(graph)) {}
  const Alphabet& alphabet() const override { return graph_.alphabet(); }
  std::vector<DiscreteWord> words(std::size_t n, std::size_t cap) const override { return graph_.language(n, cap); }
  bool contains(const DiscreteWord& word) const override { return graph_.contains(word); }
  std::string description() const override;
  const TransferGraph& graph() const { return graph_; }

 private:
  TransferGraph graph_;
};

/// Coding of the rotation by a rational approximant p/q over the partition
/// [0, 1-alpha) -> 0, [1-alpha, 1) -> 1. The orbit of the generic point
/// 1/(2q) is periodic with period q, so L_n is read off the cyclic coding
/// exactly. It agrees with the Sturmian language of the limiting irrational
/// for n < q.
class SturmianShift final : public LanguageOracle {
 public:
  explicit SturmianShift(Rational alpha);
  const Alphabet& alphabet() const override { return alphabet_; }
  std::vector<DiscreteWord> words(std::size_t n, std::size_t cap) const override;
  bool contains(const DiscreteWord& word) const override;
  std::string description() const override;
  Rational alpha() const { return alpha_; }
  /// Longest n for which L_n matches the irrational rotation (q - 1).
  std::size_t faithful_length() const { return static_cast<std::size_t>(alpha_.den) - 1; }
  /// One period of the coding, starting at the generic point.
  const DiscreteWord& period() const { return period_; }

 private:
  Alphabet alphabet_;
  Rational alpha_;
  DiscreteWord period_;
};

/// Factors of iterates sigma^k(start) of a substitution, iterated until the
/// length-n factor set stops changing.
class SubstitutionShift final : public LanguageOracle {
 public:
  SubstitutionShift(Alphabet alphabet, std::vector<DiscreteWord> images, Label start);
  const Alphabet& alphabet() const override { return alphabet_; }
  std::vector<DiscreteWord> words(std::size_t n, std::size_t cap) const override;
  bool contains(const DiscreteWord& word) const override;
  std::string description() const override;

 private:
  Alphabet alphabet_;
  std::vector<DiscreteWord> images_;
  Label start_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::vector<DiscreteWord>> cache_;
};

/// Language read off a finite sample of one orbit: a lower approximation.
class SampleShift final : public LanguageOracle {
 public:
  SampleShift(Alphabet alphabet, DiscreteWord sample, std::string origin);
  const Alphabet& alphabet() const override { return alphabet_; }
  std::vector<DiscreteWord> words(std::size_t n, std::size_t cap) const override;
  bool contains(const DiscreteWord& word) const override;
  bool sample_based() const override { return true; }
  std::string description() const override;
  const DiscreteWord& sample() const { return sample_; }

 private:
  Alphabet alphabet_;
  DiscreteWord sample_;
  std::string origin_;
};

class ProductShift final : public LanguageOracle {
 public:
  ProductShift(OraclePtr left, OraclePtr right);
  const Alphabet& alphabet() const override { return alphabet_; }
  std::vector<DiscreteWord> words(std::size_t n, std::size_t cap) const override;
  bool contains(const DiscreteWord& word) const override;
  bool sample_based() const override { return left_->sample_based() || right_->sample_based(); }
  std::string description() const override;

  /// Splits a paired word into its coordinates.
  std::pair<DiscreteWord, DiscreteWord> split(const DiscreteWord& word) const;
  DiscreteWord pair(const DiscreteWord& left, const DiscreteWord& right) const;

 private:
  OraclePtr left_;
  OraclePtr right_;
  Alphabet alphabet_;
};

/// L_n(X x Y) = L_n(X) x L_n(Y).
OraclePtr product_oracle(OraclePtr left, OraclePtr right);

/// Sorted, de-duplicated length-n factors of a word.
std::vector<DiscreteWord> factors(const DiscreteWord& word, std::size_t n);
/// Length-n factors of the bi-infinite periodic word ...ppp...
std::vector<DiscreteWord> cyclic_factors(const DiscreteWord& period, std::size_t n);

}  // namespace symdyn
