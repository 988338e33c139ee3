#pragma once

// Generator and analyzer for the stage-by-stage construction of a point
// x_* in [0,1]^N whose orbit closure is extremely non-invertible.
//
//   x_{n+1} = x_n x_n ... x_n y_n          (M_n copies of x_n)
//   y_n     = tau_b(w_k) for 0 <= k < L_n, b in {0,1}^D(n)   (k major, b minor)
//   w_k     = x_n[k..L_n)                  (0-based, length L_n - k)
//
// tau_b prepends theta symbols: theta_0(x) = |x|/8, theta_1(x) = |x|/4 with
// |x| the weighted norm. Positions in x_* are 0-based throughout.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "symdyn/speclang.hpp"
#include "symdyn/words.hpp"

namespace symdyn {

inline constexpr std::size_t kDefaultExactCap = 65536;
/// kDefaultExactCap unless SYMDYN_EXACT_CAP overrides it.
std::size_t default_exact_cap();

/// Lengths that do not fit in 64 bits saturate to this value.
inline constexpr std::uint64_t kSaturated = UINT64_MAX;

enum class DepthPolicy { scaled, unbounded };
enum class PrecisionMode { exact, floating };

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ConstructionSchedule {
  RealWord x0 = {Dyadic::from_parts(1, 1), Dyadic(1)};
  std::uint64_t dmax = 8;
  DepthPolicy depth = DepthPolicy::scaled;
  /// Explicit M_0, M_1, ...; later stages follow the default policy.
  std::vector<std::uint64_t> multiplicities;
  PrecisionMode precision = PrecisionMode::exact;
  std::size_t exact_cap = default_exact_cap();

  /// Throws ScheduleError unless x0 is nonempty with entries in (0, 1]
  /// and every explicit M_n is at least 2^n.
  void validate() const;

  /// D(n): 3^{L_n} when unbounded, min(3^{L_n}, dmax) when scaled.
  std::uint64_t depth_at(std::uint64_t length) const;
  /// M_n: explicit value, or the smallest power of two that is at least
  /// max(2^n, n^2 * l(y_n) / L_n).
  std::uint64_t multiplicity_at(std::size_t n, std::uint64_t length, std::uint64_t y_length) const;
};

/// l(y_n) = 2^D (L(L+1)/2 + D L), saturating.
std::uint64_t y_length(std::uint64_t length, std::uint64_t depth);

struct StageRecord {
  std::size_t stage = 0;
  std::uint64_t length = 0;       // L_n
  std::uint64_t depth = 0;        // D(n)
  std::uint64_t multiplicity = 0; // M_n
  std::uint64_t y_length = 0;     // l(y_n)
  std::uint64_t next_length = 0;  // L_{n+1} = M_n L_n + l(y_n)
  bool saturated = false;         // some length above did not fit in 64 bits
  bool exact = true;              // stage word kept in exact arithmetic
};

// theta / tau ---------------------------------------------------------------

Dyadic theta(int bit, std::span<const Dyadic> x);
double theta(int bit, std::span<const double> x);

/// tau_b(x) for b written b_M ... b_1 as '0'/'1' characters; b_1 is applied
/// first. Throws WordError on other characters, or when the result would be
/// longer than exact_cap.
RealWord tau(std::string_view bits, const RealWord& x, std::size_t exact_cap = default_exact_cap());
FloatWord tau(std::string_view bits, const FloatWord& x);

/// Eager construction of x_{n+1} from x_n. Throws ScheduleError when the
/// stage would exceed the schedule's exact cap; the message states the
/// number of symbols required.
std::pair<RealWord, StageRecord> build_stage(const RealWord& x, const ConstructionSchedule& schedule, std::size_t n);

// Lazy generator --------------------------------------------------------------

/// Random access into x_* without materializing large stages. Stages of
/// length at most exact_cap are materialized exactly; theta symbols of
/// larger stages are evaluated in double precision from the first 64
/// symbols of the relevant back segment (error below 1e-9).
class NoninvGenerator {
 public:
  explicit NoninvGenerator(ConstructionSchedule schedule);

  const ConstructionSchedule& schedule() const { return schedule_; }
  /// Record for stage n (lengths are cheap; nothing is materialized).
  StageRecord stage(std::size_t n) const;
  /// Smallest n with L_n >= count.
  std::size_t stage_covering(std::uint64_t count) const;

  /// x_*(i), 0-based.
  Dyadic symbol_at(std::uint64_t i) const;
  /// x_n(i), 0-based, i < L_n.
  Dyadic symbol_at(std::size_t n, std::uint64_t i) const;
  RealWord prefix(std::uint64_t count) const;
  /// The full stage word; throws ScheduleError above exact_cap.
  const RealWord& stage_word(std::size_t n) const;
  /// |x_n[k..L_n)|, i.e. the norm of w_k at stage n.
  Dyadic back_norm(std::size_t n, std::uint64_t k) const;

  /// Offset inside y_n of the word tau_b(w_k), b given by its integer value
  /// (b_D is the most significant bit).
  std::uint64_t word_offset(std::size_t n, std::uint64_t k, std::uint64_t b) const;

  /// Where position i of x_n sits at the next level down.
  struct Location {
    enum Kind { copy, theta, tail } kind = copy;
    std::uint64_t index = 0;  // copy: index in x_{n-1}; tail: index in x_{n-1}
    std::uint64_t k = 0;      // theta/tail: back-segment start
    std::uint64_t b = 0;      // theta/tail: branch word value
    std::uint64_t offset = 0; // theta: position within the theta run
  };
  Location locate(std::size_t n, std::uint64_t i) const;

 private:
  Dyadic theta_symbol(std::size_t s, std::uint64_t k, std::uint64_t b, std::uint64_t j) const;
  bool exact_stage(std::size_t n) const;
  const std::vector<Dyadic>& back_norms(std::size_t n) const;

  ConstructionSchedule schedule_;
  mutable std::recursive_mutex mutex_;
  mutable std::vector<StageRecord> records_;
  mutable std::map<std::size_t, std::shared_ptr<RealWord>> words_;
  mutable std::map<std::size_t, std::shared_ptr<std::vector<Dyadic>>> norms_;
};

inline constexpr std::uint64_t kLazyBudget = std::uint64_t{1} << 34;

/// The first count symbols of x_* as a finite stream. Throws
/// std::length_error when count exceeds kLazyBudget.
std::unique_ptr<SymbolStream> prefix_stream(const ConstructionSchedule& schedule, std::uint64_t count);
std::unique_ptr<SymbolStream> prefix_stream(std::shared_ptr<const NoninvGenerator> generator, std::uint64_t count);

// Structure -----------------------------------------------------------------

enum class SegmentKind { copy, decaying };

struct Segment {
  std::uint64_t start = 0;   // absolute position in x_*
  std::uint64_t length = 0;
  SegmentKind kind = SegmentKind::copy;
  std::uint64_t theta_length = 0;  // leading theta symbols of a decaying segment
  bool clipped = false;            // cut by the window boundary
};

struct DecompositionCheck {
  std::uint64_t segments = 0;
  std::uint64_t copies = 0;
  std::uint64_t decaying = 0;
  /// The one-step ratio a(j) <= (7/8) a(j+1) on 1 <= j <= l(a) - L_n.
  std::uint64_t one_step_checked = 0;
  std::uint64_t one_step_violations = 0;
  std::optional<std::uint64_t> first_one_step_violation;  // absolute position
  /// The two-step ratio a(j) <= (45/64) a(j+2) inside theta runs.
  std::uint64_t two_step_checked = 0;
  std::uint64_t two_step_violations = 0;
  /// Largest coordinate of a decaying segment outside its last 2 L_n.
  double head_max = 0.0;
  std::uint64_t min_segment_length = 0;
  std::uint64_t min_length_required = 0;  // 3^{L_n}, saturating
};

struct Decomposition {
  std::size_t stage = 0;
  std::uint64_t start = 0;
  std::uint64_t length = 0;
  std::vector<Segment> segments;
  DecompositionCheck check;
};

/// Splits x_*[start, start + length) into copies of x_n and decaying
/// segments (a theta run followed by a partial back segment of x_n), and
/// checks the growth inequalities exactly. Throws std::invalid_argument
/// when the window is shorter than L_n.
Decomposition decompose(const NoninvGenerator& generator, std::size_t n, std::uint64_t start, std::uint64_t length);
/// Same, for a prefix that must agree with x_*; throws on mismatch.
Decomposition decompose(const RealWord& prefix, const ConstructionSchedule& schedule, std::size_t n);

/// Fraction of the window covered by copies of x_n.
double mixture_statistic(const NoninvGenerator& generator, std::uint64_t start, std::uint64_t length,
                         std::size_t n);

// Preimage witnesses ----------------------------------------------------------

struct WitnessPair {
  Dyadic r;
  Dyadic r_prime;
  std::uint64_t position = 0;        // occurrence of a preceded by r
  std::uint64_t position_prime = 0;  // occurrence preceded by r_prime
  Dyadic difference;                 // |r - r'|
  Dyadic bound;                      // |a| / 16
  bool holds = false;                // difference >= bound, exactly
};

/// Two occurrences of a in the prefix, at positions > 0, whose preceding
/// symbols differ the most. nullopt when no pair reaches |a|/16 (the prefix
/// may just be too short). Throws std::invalid_argument when a does not
/// occur at all.
std::optional<WitnessPair> preimage_witness(const RealWord& prefix, const RealWord& a);

/// For a = x_n[i, i + length): the occurrences of a inside tau_b(w_i) in
/// y_n for b = 0...00 and b = 0...01, preceded by theta_0(w_i) and
/// theta_1(w_i). Every symbol is read back from the generator.
WitnessPair located_preimage_witness(const NoninvGenerator& generator, std::size_t n, std::uint64_t i,
                                     std::uint64_t length);

struct ZeroPreimageWitness {
  std::uint64_t position = 0;  // first symbol of the near-zero run
  Dyadic epsilon;              // the symbol before it: last letter of x_0
  std::uint64_t run_length = 0;
  double run_max = 0.0;
};

/// The theta run opening y_n, preceded by the last symbol of x_n.
ZeroPreimageWitness zero_preimage_witness(const NoninvGenerator& generator, std::size_t n);

// Cylinder statistics ---------------------------------------------------------

struct Interval {
  Dyadic lo;
  Dyadic hi;
  bool lo_closed = true;
  bool hi_closed = false;

  bool contains(const Dyadic& v) const;
  bool covers_unit() const;
  /// "[a,b)", "(a,b]", ...; endpoints as decimals or p/2^q.
  static Interval parse(std::string_view text);
  std::string to_string() const;
};

/// [U] = U_1 x ... x U_k x [0,1]^N.
struct CylinderSet {
  std::vector<Interval> intervals;
  std::size_t dimension() const { return intervals.size(); }
  /// The finite word a is in [U] when every extension is.
  bool contains_word(std::span<const Dyadic> a) const;
};

struct FrequencyPoint {
  std::uint64_t m = 0;
  std::uint64_t hits = 0;  // #{0 <= i < m : sigma^i x in [U]}
  double p = 0.0;
};

/// p(m) = hits / m at each checkpoint. Needs max(checkpoints) + k - 1
/// symbols; throws std::invalid_argument otherwise.
std::vector<FrequencyPoint> cylinder_frequency(const SymbolStream& stream, const CylinderSet& cylinder,
                                               std::vector<std::uint64_t> checkpoints);

struct RatioCheck {
  std::size_t stage = 0;
  std::uint64_t hits_in_stage = 0;  // I(x_s)
  FrequencyPoint at_stage;          // p(L_s)
  FrequencyPoint at_next;           // p(L_{s+1})
  bool skipped = false;             // I(x_s) = 0
  mpq_class alpha;
  mpq_class beta;
  mpq_class ratio;
  bool holds = false;
};

/// I(a): positions 0 <= i < l(a) with sigma^i a in [U] as a finite word.
std::uint64_t cylinder_hits(std::span<const Dyadic> word, const CylinderSet& cylinder);

/// alpha_s <= p(L_{s+1}) / p(L_s) <= beta_s for s in the given stages,
/// evaluated exactly from stage records and counts.
std::vector<RatioCheck> ratio_report(const NoninvGenerator& generator, const CylinderSet& cylinder,
                                     const std::vector<std::size_t>& stages);

/// Reads x0, dmax, depth, multiplicity, precision and exact_cap from a
/// noninv block.
ConstructionSchedule schedule_from_spec(const SystemSpec& spec);

}  // namespace symdyn
