#include "symdyn/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace symdyn {

namespace {

double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0;
  for (double x : v) s += x;
  return s;
}

double entropy_of(std::vector<double> masses) {
  std::vector<double> terms;
  terms.reserve(masses.size());
  for (double m : masses) {
    if (m > 0) terms.push_back(-m * std::log(m));
  }
  return sorted_sum(std::move(terms));
}

void same_sample(const Partition& p, const Partition& q) {
  if (p.sample_ptr() != q.sample_ptr() && !(p.sample() == q.sample())) throw SampleMismatch();
}

}  // namespace

WeightedSample::WeightedSample(std::vector<double> masses) : masses_(std::move(masses)) {
  for (double m : masses_) {
    if (!(m >= 0) || !std::isfinite(m)) throw std::invalid_argument("masses must be finite and nonnegative");
  }
  if (std::abs(sorted_sum(masses_) - 1.0) > 1e-12) throw std::invalid_argument("masses must sum to 1");
}

WeightedSample WeightedSample::from_rationals(const std::vector<mpq_class>& masses) {
  mpq_class total = 0;
  WeightedSample out;
  for (const auto& m : masses) {
    if (sgn(m) < 0) throw std::invalid_argument("masses must be nonnegative");
    total += m;
    out.masses_.push_back(m.get_d());
  }
  if (total != 1) throw std::invalid_argument("masses must sum to exactly 1");
  out.exact_ = true;
  return out;
}

WeightedSample WeightedSample::uniform(std::size_t points) {
  if (points == 0) throw std::invalid_argument("empty sample");
  std::vector<mpq_class> masses(points, mpq_class(1, static_cast<unsigned long>(points)));
  return from_rationals(masses);
}

Partition::Partition(std::shared_ptr<const WeightedSample> sample, std::vector<std::size_t> atoms)
    : sample_(std::move(sample)), atoms_(std::move(atoms)) {
  if (!sample_) throw std::invalid_argument("partition needs a sample");
  if (atoms_.size() != sample_->size()) throw std::invalid_argument("one atom label per sample point required");
}

Partition Partition::trivial(std::shared_ptr<const WeightedSample> sample) {
  std::size_t n = sample->size();
  return Partition(std::move(sample), std::vector<std::size_t>(n, 0));
}

std::vector<std::size_t> Partition::labels() const {
  std::vector<std::size_t> out = atoms_;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> Partition::atom_masses() const {
  std::map<std::size_t, std::vector<double>> grouped;
  for (std::size_t i = 0; i < atoms_.size(); ++i) grouped[atoms_[i]].push_back(sample_->mass(i));
  std::vector<double> out;
  out.reserve(grouped.size());
  for (auto& [label, masses] : grouped) out.push_back(sorted_sum(std::move(masses)));
  return out;
}

Partition join(const Partition& p, const Partition& q) {
  same_sample(p, q);
  std::vector<std::size_t> atoms(p.atoms().size());
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> ordered;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto [it, inserted] = ordered.emplace(std::pair(p.atom(i), q.atom(i)), ordered.size());
    atoms[i] = it->second;
  }
  return Partition(p.sample_ptr(), std::move(atoms));
}

double shannon_entropy(const Partition& p) { return entropy_of(p.atom_masses()); }

double conditional_entropy(const Partition& p, const Partition& q) {
  return shannon_entropy(join(p, q)) - shannon_entropy(q);
}

double rohlin_distance(const Partition& p, const Partition& q) {
  same_sample(p, q);
  // join(p, q) and join(q, p) have the same atom masses; sorted sums agree.
  double joint = shannon_entropy(join(p, q));
  double a = joint - shannon_entropy(q);
  double b = joint - shannon_entropy(p);
  return std::max(0.0, a + b);
}

Partition truncate(const Partition& p, std::size_t n) {
  auto labels = p.labels();
  if (labels.size() <= n) return p;
  std::size_t merged = labels[n];
  std::vector<std::size_t> atoms = p.atoms();
  for (auto& a : atoms) {
    if (a > merged) a = merged;
  }
  return Partition(p.sample_ptr(), std::move(atoms));
}

bool same_up_to_null(const Partition& p, const Partition& q) {
  same_sample(p, q);
  std::map<std::size_t, std::size_t> forward, backward;
  for (std::size_t i = 0; i < p.atoms().size(); ++i) {
    if (p.sample().mass(i) == 0) continue;
    auto [f, f_new] = forward.emplace(p.atom(i), q.atom(i));
    auto [b, b_new] = backward.emplace(q.atom(i), p.atom(i));
    if (f->second != q.atom(i) || b->second != p.atom(i)) return false;
  }
  return true;
}

}  // namespace symdyn
