#pragma once

// Entropy calculus for partitions of a finite weighted sample space.
// Logarithms are natural.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace symdyn {

class SampleMismatch : public std::invalid_argument {
 public:
  SampleMismatch() : std::invalid_argument("partitions live on different samples") {}
};

/// Nonnegative point masses summing to one.
class WeightedSample {
 public:
  /// Total must be 1 within 1e-12.
  explicit WeightedSample(std::vector<double> masses);
  /// Total must be exactly 1.
  static WeightedSample from_rationals(const std::vector<mpq_class>& masses);
  static WeightedSample uniform(std::size_t points);

  std::size_t size() const { return masses_.size(); }
  double mass(std::size_t point) const { return masses_.at(point); }
  const std::vector<double>& masses() const { return masses_; }
  bool exact() const { return exact_; }

  friend bool operator==(const WeightedSample& a, const WeightedSample& b) { return a.masses_ == b.masses_; }

 private:
  WeightedSample() = default;
  std::vector<double> masses_;
  bool exact_ = false;
};

/// Atom label per sample point. Labels are arbitrary nonnegative integers;
/// their numeric order is the atom order used by truncate.
class Partition {
 public:
  Partition(std::shared_ptr<const WeightedSample> sample, std::vector<std::size_t> atoms);
  static Partition trivial(std::shared_ptr<const WeightedSample> sample);

  const WeightedSample& sample() const { return *sample_; }
  const std::shared_ptr<const WeightedSample>& sample_ptr() const { return sample_; }
  const std::vector<std::size_t>& atoms() const { return atoms_; }
  std::size_t atom(std::size_t point) const { return atoms_.at(point); }
  /// Distinct labels, ascending.
  std::vector<std::size_t> labels() const;
  /// Mass per distinct label, in labels() order.
  std::vector<double> atom_masses() const;

 private:
  std::shared_ptr<const WeightedSample> sample_;
  std::vector<std::size_t> atoms_;
};

/// P v Q: atoms are the nonempty intersections.
Partition join(const Partition& p, const Partition& q);

double shannon_entropy(const Partition& p);
/// H(P|Q) = H(P v Q) - H(Q).
double conditional_entropy(const Partition& p, const Partition& q);
/// d(P,Q) = H(P|Q) + H(Q|P); exactly symmetric in its arguments.
double rohlin_distance(const Partition& p, const Partition& q);

/// Keeps the first n atoms (by label) and merges the rest into one atom.
Partition truncate(const Partition& p, std::size_t n);

/// True when the partitions agree on every point of positive mass, up to a
/// relabelling of atoms.
bool same_up_to_null(const Partition& p, const Partition& q);

}  // namespace symdyn
