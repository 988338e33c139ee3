#include "symdyn/noninv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace symdyn {

std::size_t default_exact_cap() {
  if (const char* env = std::getenv("SYMDYN_EXACT_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultExactCap;
}

namespace {

__extension__ using Wide = unsigned __int128;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_add_overflow(a, b, &r) ? kSaturated : r;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_mul_overflow(a, b, &r) ? kSaturated : r;
}

std::uint64_t pow3(std::uint64_t exponent) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    r = sat_mul(r, 3);
    if (r == kSaturated) break;
  }
  return r;
}

std::uint64_t pow2(std::uint64_t exponent) { return exponent >= 64 ? kSaturated : std::uint64_t{1} << exponent; }

// Cumulative length of the blocks k' < k of y: 2^D (k(L+D) - k(k-1)/2).
std::uint64_t block_offset(std::uint64_t length, std::uint64_t depth, std::uint64_t k) {
  if (depth >= 64) return kSaturated;
  Wide inner = static_cast<Wide>(k) * (length + depth) - static_cast<Wide>(k) * (k - 1) / 2;
  if (inner >> (127 - depth)) return kSaturated;
  Wide total = inner << depth;
  return total > kSaturated ? kSaturated : static_cast<std::uint64_t>(total);
}

Dyadic from_rational(const Rational& r) {
  if (r.den <= 0 || (r.den & (r.den - 1)) != 0) throw ScheduleError("value " + r.to_string() + " is not dyadic");
  std::uint64_t exponent = 0;
  for (auto d = r.den; d > 1; d >>= 1) ++exponent;
  return Dyadic::from_parts(mpz_class(static_cast<long>(r.num)), exponent);
}

}  // namespace

// Schedule ------------------------------------------------------------------

void ConstructionSchedule::validate() const {
  if (x0.empty()) throw ScheduleError("seed word must be nonempty");
  for (const auto& v : x0) {
    if (v.sign() <= 0) throw ScheduleError("seed must be strictly positive");
    if (v > Dyadic(1)) throw ScheduleError("seed symbols must lie in (0, 1]");
  }
  if (dmax == 0) throw ScheduleError("dmax must be at least 1");
  if (exact_cap == 0) throw ScheduleError("exact_cap must be positive");
  for (std::size_t n = 0; n < multiplicities.size(); ++n) {
    if (multiplicities[n] < pow2(n))
      throw ScheduleError("M_" + std::to_string(n) + " = " + std::to_string(multiplicities[n]) +
                          " is below 2^" + std::to_string(n));
  }
}

std::uint64_t ConstructionSchedule::depth_at(std::uint64_t length) const {
  std::uint64_t full = pow3(length);
  return depth == DepthPolicy::unbounded ? full : std::min(full, dmax);
}

std::uint64_t ConstructionSchedule::multiplicity_at(std::size_t n, std::uint64_t length,
                                                    std::uint64_t y_len) const {
  if (n < multiplicities.size()) return multiplicities[n];
  if (y_len == kSaturated || length == kSaturated || n >= 63) return kSaturated;
  mpz_class target = mpz_class(static_cast<unsigned long>(n)) * n * mpz_class(std::to_string(y_len));
  mpz_class len(std::to_string(length));
  mpz_class need;
  mpz_cdiv_q(need.get_mpz_t(), target.get_mpz_t(), len.get_mpz_t());
  mpz_class m(std::to_string(pow2(n)));
  if (need > m) m = need;
  // Round up to a power of two.
  std::size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
  mpz_class power = 1;
  power <<= static_cast<mp_bitcnt_t>(bits - 1);
  if (power < m) power <<= 1;
  if (mpz_sizeinbase(power.get_mpz_t(), 2) > 63) return kSaturated;
  return std::stoull(power.get_str());
}

std::uint64_t y_length(std::uint64_t length, std::uint64_t depth) {
  if (length == kSaturated || depth >= 64) return kSaturated;
  Wide inner = static_cast<Wide>(length) * (length + 1) / 2 + static_cast<Wide>(depth) * length;
  if (inner > kSaturated) return kSaturated;
  return sat_mul(static_cast<std::uint64_t>(inner), pow2(depth));
}

// theta / tau ---------------------------------------------------------------

Dyadic theta(int bit, std::span<const Dyadic> x) { return weighted_norm(x).scaled(bit ? -2 : -3); }

double theta(int bit, std::span<const double> x) { return weighted_norm(x) / (bit ? 4.0 : 8.0); }

namespace {

void check_bits(std::string_view bits) {
  for (char c : bits) {
    if (c != '0' && c != '1') throw WordError("branch words are made of '0' and '1'");
  }
}

}  // namespace

RealWord tau(std::string_view bits, const RealWord& x, std::size_t exact_cap) {
  check_bits(bits);
  if (x.size() + bits.size() > exact_cap)
    throw WordError("tau result of length " + std::to_string(x.size() + bits.size()) + " exceeds the exact cap");
  // Build back to front: out[M - i] receives theta_{b_i}.
  std::size_t m = bits.size();
  RealWord out(m);
  out.insert(out.end(), x.begin(), x.end());
  Dyadic norm = weighted_norm(std::span<const Dyadic>(x));
  for (std::size_t i = m; i-- > 0;) {
    int bit = bits[i] == '1';
    out[i] = norm.scaled(bit ? -2 : -3);
    norm = (out[i] + norm).scaled(-1);
  }
  return out;
}

FloatWord tau(std::string_view bits, const FloatWord& x) {
  check_bits(bits);
  std::size_t m = bits.size();
  FloatWord out(m);
  out.insert(out.end(), x.begin(), x.end());
  double norm = weighted_norm(std::span<const double>(x));
  for (std::size_t i = m; i-- > 0;) {
    out[i] = norm / (bits[i] == '1' ? 4.0 : 8.0);
    norm = (out[i] + norm) / 2.0;
  }
  return out;
}

std::pair<RealWord, StageRecord> build_stage(const RealWord& x, const ConstructionSchedule& schedule, std::size_t n) {
  schedule.validate();
  StageRecord rec;
  rec.stage = n;
  rec.length = x.size();
  rec.depth = schedule.depth_at(rec.length);
  rec.y_length = y_length(rec.length, rec.depth);
  rec.multiplicity = schedule.multiplicity_at(n, rec.length, rec.y_length);
  rec.next_length = sat_add(sat_mul(rec.multiplicity, rec.length), rec.y_length);
  rec.saturated = rec.next_length == kSaturated;
  if (rec.saturated || rec.next_length > schedule.exact_cap)
    throw ScheduleError("stage " + std::to_string(n + 1) + " needs " +
                        (rec.saturated ? std::string("more than 2^64") : std::to_string(rec.next_length)) +
                        " symbols, above the exact cap of " + std::to_string(schedule.exact_cap));
  RealWord next;
  next.reserve(rec.next_length);
  for (std::uint64_t c = 0; c < rec.multiplicity; ++c) next.insert(next.end(), x.begin(), x.end());
  std::string bits(rec.depth, '0');
  std::uint64_t words = pow2(rec.depth);
  for (std::uint64_t k = 0; k < rec.length; ++k) {
    RealWord w(x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
    for (std::uint64_t b = 0; b < words; ++b) {
      for (std::uint64_t i = 0; i < rec.depth; ++i) bits[i] = ((b >> (rec.depth - 1 - i)) & 1U) ? '1' : '0';
      RealWord piece = tau(bits, w, schedule.exact_cap);
      next.insert(next.end(), piece.begin(), piece.end());
    }
  }
  return {std::move(next), rec};
}

// Generator -------------------------------------------------------------------

NoninvGenerator::NoninvGenerator(ConstructionSchedule schedule) : schedule_(std::move(schedule)) {
  schedule_.validate();
}

StageRecord NoninvGenerator::stage(std::size_t n) const {
  std::lock_guard lock(mutex_);
  while (records_.size() <= n) {
    StageRecord rec;
    rec.stage = records_.size();
    if (records_.empty()) {
      rec.length = schedule_.x0.size();
    } else {
      rec.length = records_.back().next_length;
      rec.saturated = records_.back().saturated;
    }
    rec.depth = schedule_.depth_at(rec.length);
    rec.y_length = y_length(rec.length, rec.depth);
    rec.multiplicity = schedule_.multiplicity_at(rec.stage, rec.length, rec.y_length);
    rec.next_length = sat_add(sat_mul(rec.multiplicity, rec.length), rec.y_length);
    rec.saturated = rec.saturated || rec.length == kSaturated || rec.next_length == kSaturated;
    rec.exact = rec.stage == 0 || (schedule_.precision == PrecisionMode::exact && rec.length <= schedule_.exact_cap);
    records_.push_back(rec);
  }
  return records_[n];
}

std::size_t NoninvGenerator::stage_covering(std::uint64_t count) const {
  std::size_t n = 0;
  while (stage(n).length < count) ++n;
  return n;
}

bool NoninvGenerator::exact_stage(std::size_t n) const { return stage(n).exact; }

NoninvGenerator::Location NoninvGenerator::locate(std::size_t n, std::uint64_t i) const {
  if (n == 0) throw std::invalid_argument("stage 0 has no structure below it");
  StageRecord rec = stage(n - 1);
  Location loc;
  std::uint64_t region = sat_mul(rec.multiplicity, rec.length);
  if (i < region) {
    loc.kind = Location::copy;
    loc.index = i % rec.length;
    return loc;
  }
  std::uint64_t p = i - region;
  // Largest k with block_offset(k) <= p.
  std::uint64_t lo = 0, hi = rec.length - 1;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (block_offset(rec.length, rec.depth, mid) <= p)
      lo = mid;
    else
      hi = mid - 1;
  }
  loc.k = lo;
  std::uint64_t q = p - block_offset(rec.length, rec.depth, lo);
  std::uint64_t len = rec.length - lo + rec.depth;
  loc.b = q / len;
  std::uint64_t j = q % len;
  if (j < rec.depth) {
    loc.kind = Location::theta;
    loc.offset = j;
  } else {
    loc.kind = Location::tail;
    loc.index = lo + j - rec.depth;
  }
  return loc;
}

std::uint64_t NoninvGenerator::word_offset(std::size_t n, std::uint64_t k, std::uint64_t b) const {
  StageRecord rec = stage(n);
  return sat_add(block_offset(rec.length, rec.depth, k), sat_mul(b, rec.length - k + rec.depth));
}

const std::vector<Dyadic>& NoninvGenerator::back_norms(std::size_t n) const {
  std::lock_guard lock(mutex_);
  if (auto it = norms_.find(n); it != norms_.end()) return *it->second;
  const RealWord& word = stage_word(n);
  auto norms = std::make_shared<std::vector<Dyadic>>(word.size() + 1);
  for (std::size_t k = word.size(); k-- > 0;) (*norms)[k] = (word[k] + (*norms)[k + 1]).scaled(-1);
  return *norms_.emplace(n, std::move(norms)).first->second;
}

Dyadic NoninvGenerator::back_norm(std::size_t n, std::uint64_t k) const {
  if (exact_stage(n)) return back_norms(n).at(k);
  StageRecord rec = stage(n);
  double norm = 0, weight = 0.5;
  for (std::uint64_t i = 0; i < 64 && k + i < rec.length; ++i, weight /= 2)
    norm += symbol_at(n, k + i).to_double() * weight;
  return Dyadic::from_double(norm);
}

Dyadic NoninvGenerator::theta_symbol(std::size_t s, std::uint64_t k, std::uint64_t b, std::uint64_t j) const {
  StageRecord rec = stage(s);
  Dyadic value = back_norm(s, k);
  // Norm factors of the inner prepends b_1 .. b_{D-j-1}: 9/16 for 0, 5/8 for 1.
  for (std::uint64_t i = 1; i + j < rec.depth; ++i) {
    bool bit = (b >> (i - 1)) & 1U;
    value = (value * (bit ? 5L : 9L)).scaled(bit ? -3 : -4);
  }
  bool top = (b >> (rec.depth - j - 1)) & 1U;
  return value.scaled(top ? -2 : -3);
}

const RealWord& NoninvGenerator::stage_word(std::size_t n) const {
  std::lock_guard lock(mutex_);
  if (auto it = words_.find(n); it != words_.end()) return *it->second;
  StageRecord rec = stage(n);
  if (!rec.exact)
    throw ScheduleError("stage " + std::to_string(n) + " has " +
                        (rec.length == kSaturated ? std::string("more than 2^64") : std::to_string(rec.length)) +
                        " symbols, above the exact cap of " + std::to_string(schedule_.exact_cap));
  auto word = std::make_shared<RealWord>();
  if (n == 0) {
    *word = schedule_.x0;
  } else {
    const RealWord& previous = stage_word(n - 1);
    StageRecord below = stage(n - 1);
    word->reserve(rec.length);
    for (std::uint64_t c = 0; c < below.multiplicity; ++c) word->insert(word->end(), previous.begin(), previous.end());
    std::uint64_t words = pow2(below.depth);
    for (std::uint64_t k = 0; k < below.length; ++k) {
      for (std::uint64_t b = 0; b < words; ++b) {
        for (std::uint64_t j = 0; j < below.depth; ++j) word->push_back(theta_symbol(n - 1, k, b, j));
        word->insert(word->end(), previous.begin() + static_cast<std::ptrdiff_t>(k), previous.end());
      }
    }
  }
  return *words_.emplace(n, std::move(word)).first->second;
}

Dyadic NoninvGenerator::symbol_at(std::size_t n, std::uint64_t i) const {
  while (true) {
    StageRecord rec = stage(n);
    if (i >= rec.length) throw std::out_of_range("position beyond the stage word");
    if (rec.exact) return stage_word(n)[i];
    Location loc = locate(n, i);
    if (loc.kind == Location::theta) return theta_symbol(n - 1, loc.k, loc.b, loc.offset);
    i = loc.index;
    --n;
  }
}

Dyadic NoninvGenerator::symbol_at(std::uint64_t i) const { return symbol_at(stage_covering(i + 1), i); }

RealWord NoninvGenerator::prefix(std::uint64_t count) const {
  RealWord out;
  out.reserve(count);
  std::size_t n = stage_covering(count);
  if (exact_stage(n)) {
    const RealWord& word = stage_word(n);
    return RealWord(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(count));
  }
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(symbol_at(n, i));
  return out;
}

namespace {

class PrefixStream final : public SymbolStream {
 public:
  PrefixStream(std::shared_ptr<const NoninvGenerator> generator, std::uint64_t count)
      : generator_(std::move(generator)), count_(count), stage_(generator_->stage_covering(count)) {}

  std::optional<Dyadic> next() override {
    if (position_ >= count_) return std::nullopt;
    return generator_->symbol_at(stage_, position_++);
  }
  std::unique_ptr<SymbolStream> clone() const override { return std::make_unique<PrefixStream>(generator_, count_); }

 private:
  std::shared_ptr<const NoninvGenerator> generator_;
  std::uint64_t count_;
  std::size_t stage_;
  std::uint64_t position_ = 0;
};

}  // namespace

std::unique_ptr<SymbolStream> prefix_stream(std::shared_ptr<const NoninvGenerator> generator, std::uint64_t count) {
  if (count > kLazyBudget)
    throw std::length_error("prefix of " + std::to_string(count) + " symbols exceeds the lazy generation budget");
  return std::make_unique<PrefixStream>(std::move(generator), count);
}

std::unique_ptr<SymbolStream> prefix_stream(const ConstructionSchedule& schedule, std::uint64_t count) {
  return prefix_stream(std::make_shared<const NoninvGenerator>(schedule), count);
}

// Decomposition -------------------------------------------------------------

namespace {

enum class PieceKind { copy, theta, partial };

struct Piece {
  PieceKind kind;
  std::uint64_t start;
  std::uint64_t length;
};

class PieceCollector {
 public:
  PieceCollector(const NoninvGenerator& gen, std::size_t stage, std::uint64_t lo, std::uint64_t hi)
      : gen_(gen), stage_(stage), window_lo_(lo), window_hi_(hi) {}

  // Emits the pieces of x_t[from, to), where x_t begins at absolute position `base`.
  void emit(std::size_t t, std::uint64_t from, std::uint64_t to, std::uint64_t base) {
    if (base + to <= window_lo_ || base + from >= window_hi_) return;
    if (t == stage_) {
      StageRecord rec = gen_.stage(t);
      push(from == 0 && to == rec.length ? PieceKind::copy : PieceKind::partial, base + from, to - from);
      return;
    }
    StageRecord rec = gen_.stage(t - 1);
    std::uint64_t len = rec.length;
    std::uint64_t region = sat_mul(rec.multiplicity, len);
    // Copies of x_{t-1}.
    std::uint64_t first = std::max(from, window_lo_ > base ? window_lo_ - base : 0);
    if (first < std::min(to, region)) {
      for (std::uint64_t c = first / len; c * len < std::min(to, region); ++c) {
        if (base + c * len >= window_hi_) return;
        emit(t - 1, std::max(from, c * len) - c * len, std::min(to, (c + 1) * len) - c * len, base + c * len);
      }
    }
    if (to <= region) return;
    // Words tau_b(w_k) of y_{t-1}.
    std::uint64_t p = std::max({from, region, window_lo_ > base ? window_lo_ - base : 0});
    if (p >= to) return;
    auto loc = gen_.locate(t, p);
    std::uint64_t k = loc.k, b = loc.b;
    std::uint64_t words = pow2(rec.depth);
    while (k < len) {
      std::uint64_t ws = region + gen_.word_offset(t - 1, k, b);
      if (ws >= to || base + ws >= window_hi_) return;
      std::uint64_t theta_end = ws + rec.depth;
      std::uint64_t lo = std::max(from, ws);
      if (lo < theta_end) push(PieceKind::theta, base + lo, theta_end - lo);
      std::uint64_t tail_from = k + (lo > theta_end ? lo - theta_end : 0);
      emit(t - 1, tail_from, len, base + theta_end - k);
      if (++b == words) {
        b = 0;
        ++k;
      }
    }
  }

  std::vector<Piece> take() { return std::move(pieces_); }

 private:
  void push(PieceKind kind, std::uint64_t start, std::uint64_t length) {
    if (!pieces_.empty() && kind == PieceKind::theta && pieces_.back().kind == PieceKind::theta &&
        pieces_.back().start + pieces_.back().length == start) {
      pieces_.back().length += length;
      return;
    }
    pieces_.push_back({kind, start, length});
  }

  const NoninvGenerator& gen_;
  std::size_t stage_;
  std::uint64_t window_lo_, window_hi_;
  std::vector<Piece> pieces_;
};

}  // namespace

Decomposition decompose(const NoninvGenerator& generator, std::size_t n, std::uint64_t start, std::uint64_t length) {
  StageRecord rec_n = generator.stage(n);
  if (length < rec_n.length)
    throw std::invalid_argument("window of " + std::to_string(length) + " symbols is shorter than L_" +
                                std::to_string(n) + " = " + std::to_string(rec_n.length));
  std::uint64_t end = start + length;
  std::size_t top = std::max(n, generator.stage_covering(end));
  PieceCollector collector(generator, n, start, end);
  collector.emit(top, 0, generator.stage(top).length, 0);
  auto pieces = collector.take();

  Decomposition out;
  out.stage = n;
  out.start = start;
  out.length = length;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    Segment seg;
    seg.start = pieces[i].start;
    if (pieces[i].kind == PieceKind::copy) {
      seg.kind = SegmentKind::copy;
      seg.length = pieces[i].length;
    } else {
      seg.kind = SegmentKind::decaying;
      seg.length = pieces[i].length;
      if (pieces[i].kind == PieceKind::theta) {
        seg.theta_length = pieces[i].length;
        if (i + 1 < pieces.size() && pieces[i + 1].kind == PieceKind::partial &&
            pieces[i + 1].start == pieces[i].start + pieces[i].length) {
          seg.length += pieces[i + 1].length;
          ++i;
        }
      }
    }
    // Clip to the window.
    std::uint64_t s = std::max(seg.start, start), e = std::min(seg.start + seg.length, end);
    if (s >= e) continue;
    if (s != seg.start || e != seg.start + seg.length) {
      seg.clipped = true;
      std::uint64_t cut = s - seg.start;
      seg.theta_length = seg.theta_length > cut ? seg.theta_length - cut : 0;
      seg.start = s;
      seg.length = e - s;
    }
    out.segments.push_back(seg);
  }

  // Checks.
  DecompositionCheck& check = out.check;
  check.min_length_required = pow3(rec_n.length);
  check.min_segment_length = kSaturated;
  const std::uint64_t big_l = rec_n.length;
  for (const auto& seg : out.segments) {
    ++check.segments;
    if (!seg.clipped) check.min_segment_length = std::min(check.min_segment_length, seg.length);
    if (seg.kind == SegmentKind::copy) {
      ++check.copies;
      continue;
    }
    ++check.decaying;
    RealWord a;
    a.reserve(seg.length);
    for (std::uint64_t i = 0; i < seg.length; ++i) a.push_back(generator.symbol_at(seg.start + i));
    // 1-based j in [1, l(a) - L_n]: 8 a(j) <= 7 a(j+1).
    for (std::uint64_t j = 1; j + big_l <= a.size() && j < a.size(); ++j) {
      ++check.one_step_checked;
      if (a[j - 1] * 8 > a[j] * 7) {
        ++check.one_step_violations;
        if (!check.first_one_step_violation) check.first_one_step_violation = seg.start + j - 1;
      }
    }
    for (std::uint64_t j = 0; j + 2 < seg.theta_length; ++j) {
      ++check.two_step_checked;
      if (a[j] * 64 > a[j + 2] * 45) ++check.two_step_violations;
    }
    for (std::uint64_t j = 0; j + 2 * big_l < a.size(); ++j) check.head_max = std::max(check.head_max, a[j].to_double());
  }
  if (check.min_segment_length == kSaturated) check.min_segment_length = 0;
  return out;
}

Decomposition decompose(const RealWord& prefix, const ConstructionSchedule& schedule, std::size_t n) {
  NoninvGenerator generator(schedule);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!(generator.symbol_at(i) == prefix[i]))
      throw std::invalid_argument("prefix differs from the schedule's x_* at position " + std::to_string(i));
  }
  return decompose(generator, n, 0, prefix.size());
}

double mixture_statistic(const NoninvGenerator& generator, std::uint64_t start, std::uint64_t length, std::size_t n) {
  auto d = decompose(generator, n, start, length);
  std::uint64_t covered = 0;
  for (const auto& seg : d.segments) {
    if (seg.kind == SegmentKind::copy) covered += seg.length;
  }
  return static_cast<double>(covered) / static_cast<double>(length);
}

// Witnesses -------------------------------------------------------------------

std::optional<WitnessPair> preimage_witness(const RealWord& prefix, const RealWord& a) {
  std::optional<std::size_t> low, high;
  bool occurs = false;
  if (a.size() <= prefix.size()) {
    for (std::size_t i = 0; i + a.size() <= prefix.size(); ++i) {
      if (!std::equal(a.begin(), a.end(), prefix.begin() + static_cast<std::ptrdiff_t>(i))) continue;
      occurs = true;
      if (i == 0) continue;
      if (!low || prefix[i - 1] < prefix[*low - 1]) low = i;
      if (!high || prefix[i - 1] > prefix[*high - 1]) high = i;
    }
  }
  if (!occurs) throw std::invalid_argument("the word does not occur in the prefix");
  if (!low) return std::nullopt;
  WitnessPair w;
  w.r = prefix[*low - 1];
  w.r_prime = prefix[*high - 1];
  w.position = *low;
  w.position_prime = *high;
  w.difference = (w.r_prime - w.r).abs();
  w.bound = weighted_norm(std::span<const Dyadic>(a)).scaled(-4);
  w.holds = w.difference >= w.bound;
  if (!w.holds) return std::nullopt;
  return w;
}

WitnessPair located_preimage_witness(const NoninvGenerator& generator, std::size_t n, std::uint64_t i,
                                     std::uint64_t length) {
  StageRecord rec = generator.stage(n);
  if (i + length > rec.length) throw std::out_of_range("subword runs past the end of x_n");
  RealWord a;
  for (std::uint64_t j = 0; j < length; ++j) a.push_back(generator.symbol_at(n, i + j));
  std::uint64_t y_start = sat_mul(rec.multiplicity, rec.length);
  auto position = [&](std::uint64_t b) {
    return sat_add(sat_add(y_start, generator.word_offset(n, i, b)), rec.depth);
  };
  WitnessPair w;
  w.position = position(0);
  w.position_prime = position(1);
  if (w.position_prime == kSaturated) throw std::out_of_range("witness lies beyond 64-bit positions");
  for (std::uint64_t j = 0; j < length; ++j) {
    if (!(generator.symbol_at(w.position + j) == a[j]) || !(generator.symbol_at(w.position_prime + j) == a[j]))
      throw std::logic_error("located occurrence does not match the subword");
  }
  w.r = generator.symbol_at(w.position - 1);
  w.r_prime = generator.symbol_at(w.position_prime - 1);
  w.difference = (w.r_prime - w.r).abs();
  w.bound = weighted_norm(std::span<const Dyadic>(a)).scaled(-4);
  w.holds = w.difference >= w.bound;
  return w;
}

ZeroPreimageWitness zero_preimage_witness(const NoninvGenerator& generator, std::size_t n) {
  StageRecord rec = generator.stage(n);
  ZeroPreimageWitness z;
  z.position = sat_mul(rec.multiplicity, rec.length);
  if (z.position == kSaturated) throw std::out_of_range("y_n starts beyond 64-bit positions");
  z.epsilon = generator.symbol_at(z.position - 1);
  z.run_length = rec.depth;
  for (std::uint64_t j = 0; j < rec.depth; ++j)
    z.run_max = std::max(z.run_max, generator.symbol_at(z.position + j).to_double());
  return z;
}

// Cylinders -----------------------------------------------------------------

bool Interval::contains(const Dyadic& v) const {
  bool above = lo_closed ? v >= lo : v > lo;
  bool below = hi_closed ? v <= hi : v < hi;
  return above && below;
}

bool Interval::covers_unit() const { return contains(Dyadic(0)) && contains(Dyadic(1)); }

Interval Interval::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.size() < 5) throw std::invalid_argument("malformed interval '" + std::string(text) + "'");
  Interval out;
  char open = text.front(), close = text.back();
  if ((open != '[' && open != '(') || (close != ']' && close != ')'))
    throw std::invalid_argument("interval must be written like [a,b) or (a,b]");
  auto comma = text.find(',');
  if (comma == std::string_view::npos) throw std::invalid_argument("interval needs a comma");
  auto lo = Dyadic::parse(trim(text.substr(1, comma - 1)));
  auto hi = Dyadic::parse(trim(text.substr(comma + 1, text.size() - comma - 2)));
  if (!lo || !hi) throw std::invalid_argument("interval endpoints must be dyadic numbers");
  out.lo = *lo;
  out.hi = *hi;
  out.lo_closed = open == '[';
  out.hi_closed = close == ']';
  if (out.hi < out.lo) throw std::invalid_argument("interval endpoints out of order");
  return out;
}

std::string Interval::to_string() const {
  return std::string(lo_closed ? "[" : "(") + lo.to_string() + "," + hi.to_string() + (hi_closed ? "]" : ")");
}

bool CylinderSet::contains_word(std::span<const Dyadic> a) const {
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    if (j < a.size() ? !intervals[j].contains(a[j]) : !intervals[j].covers_unit()) return false;
  }
  return true;
}

std::uint64_t cylinder_hits(std::span<const Dyadic> word, const CylinderSet& cylinder) {
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < word.size(); ++i) hits += cylinder.contains_word(word.subspan(i));
  return hits;
}

namespace {

// Hits of sigma^i x for i < m at each sorted checkpoint m, from an explicit prefix.
std::vector<FrequencyPoint> frequencies(std::span<const Dyadic> x, const CylinderSet& cylinder,
                                        const std::vector<std::uint64_t>& sorted) {
  std::vector<FrequencyPoint> out;
  std::uint64_t hits = 0, i = 0;
  std::size_t k = cylinder.dimension();
  for (auto m : sorted) {
    for (; i < m; ++i) hits += cylinder.contains_word(x.subspan(i, std::min<std::size_t>(k, x.size() - i)));
    out.push_back({m, hits, m ? static_cast<double>(hits) / static_cast<double>(m) : 0.0});
  }
  return out;
}

}  // namespace

std::vector<FrequencyPoint> cylinder_frequency(const SymbolStream& stream, const CylinderSet& cylinder,
                                               std::vector<std::uint64_t> checkpoints) {
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.empty()) return {};
  std::size_t k = cylinder.dimension();
  std::uint64_t need = checkpoints.back() + (k ? k - 1 : 0);
  RealWord x = prefix(stream, need);
  if (x.size() < need)
    throw std::invalid_argument("prefix of " + std::to_string(x.size()) + " symbols is too short; need " +
                                std::to_string(need));
  return frequencies(x, cylinder, checkpoints);
}

std::vector<RatioCheck> ratio_report(const NoninvGenerator& generator, const CylinderSet& cylinder,
                                     const std::vector<std::size_t>& stages) {
  std::vector<RatioCheck> out;
  std::size_t k = cylinder.dimension();
  for (auto s : stages) {
    StageRecord rec = generator.stage(s);
    StageRecord next = generator.stage(s + 1);
    RatioCheck check;
    check.stage = s;
    check.hits_in_stage = cylinder_hits(generator.stage_word(s), cylinder);
    RealWord x = generator.prefix(next.length + (k ? k - 1 : 0));
    auto points = frequencies(x, cylinder, {rec.length, next.length});
    check.at_stage = points[0];
    check.at_next = points[1];
    if (check.hits_in_stage == 0 || check.at_stage.hits == 0) {
      check.skipped = true;
      out.push_back(std::move(check));
      continue;
    }
    auto q = [](std::uint64_t v) { return mpq_class(mpz_class(std::to_string(v))); };
    mpq_class big_i = q(check.hits_in_stage), kk = q(k), m = q(rec.multiplicity), l = q(rec.length),
              ly = q(rec.y_length);
    mpq_class spread = 1 + ly / (m * l);
    check.alpha = 1 / ((1 + kk / big_i) * spread);
    check.beta = (1 + kk / big_i + (ly + kk) / (m * big_i)) / spread;
    check.ratio = (q(check.at_next.hits) / q(next.length)) / (q(check.at_stage.hits) / q(rec.length));
    check.alpha.canonicalize();
    check.beta.canonicalize();
    check.ratio.canonicalize();
    check.holds = check.alpha <= check.ratio && check.ratio <= check.beta;
    out.push_back(std::move(check));
  }
  return out;
}

ConstructionSchedule schedule_from_spec(const SystemSpec& spec) {
  if (spec.kind != SystemKind::noninv) throw ScheduleError("not a noninv block");
  ConstructionSchedule schedule;
  if (auto x0 = spec.get_numbers("x0")) {
    schedule.x0.clear();
    for (const auto& r : *x0) schedule.x0.push_back(from_rational(r));
  }
  if (auto d = spec.get_number("dmax")) schedule.dmax = static_cast<std::uint64_t>(d->num);
  if (auto depth = spec.get_ident("depth")) schedule.depth = *depth == "unbounded" ? DepthPolicy::unbounded : DepthPolicy::scaled;
  if (auto ms = spec.get_numbers("multiplicity")) {
    for (const auto& r : *ms) schedule.multiplicities.push_back(static_cast<std::uint64_t>(r.num));
  }
  if (auto p = spec.get_ident("precision")) schedule.precision = *p == "float" ? PrecisionMode::floating : PrecisionMode::exact;
  if (auto cap = spec.get_number("exact_cap")) schedule.exact_cap = static_cast<std::size_t>(cap->num);
  schedule.validate();
  return schedule;
}

}  // namespace symdyn
