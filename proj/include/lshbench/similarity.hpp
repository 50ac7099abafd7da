#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lshbench {

using Index = std::uint32_t;

/// A point stored as its sorted nonzero coordinates.
///
/// Binary vectors carry only indices (the point is the set of nonzero
/// locations). Weighted vectors additionally carry one nonzero weight per
/// index. Construction validates: indices strictly increasing and below
/// `dim`, weights parallel to indices and free of zeros.
class SparseVector {
 public:
  SparseVector() = default;

  static SparseVector binary(std::vector<Index> indices, std::size_t dim);
  static SparseVector weighted(std::vector<Index> indices, std::vector<double> weights,
                               std::size_t dim);

  std::span<const Index> indices() const { return indices_; }
  /// Empty span in binary mode.
  std::span<const double> weights() const;
  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool is_weighted() const { return weights_.has_value(); }

  /// Drops the weights (any stored coordinate is nonzero by invariant).
  SparseVector binarized() const;
  /// Same coordinates, declared over a larger universe.
  SparseVector with_dim(std::size_t dim) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Index> indices_;
  std::optional<std::vector<double>> weights_;
  std::size_t dim_ = 0;
};

/// The full symbol set describing one binary pair.
struct PairStats {
  std::size_t f1 = 0;
  std::size_t f2 = 0;
  std::size_t a = 0;  // intersection size
  double cosine = 0.0;
  double resemblance = 0.0;
  double z = 0.0;  // sqrt(f2/f1) + sqrt(f1/f2)
};

struct ResemblanceBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Tolerance applied by every bound check on double arithmetic.
inline constexpr double kBoundTolerance = 1e-12;

std::size_t intersection_size(const SparseVector& x, const SparseVector& y);

/// Binary: a/sqrt(f1 f2). Weighted (either side): normalized inner product.
double cosine(const SparseVector& x, const SparseVector& y);
double resemblance(const SparseVector& x, const SparseVector& y);

PairStats pair_stats(const SparseVector& x, const SparseVector& y);
/// Same quantities straight from the counts; requires 0 <= a <= min(f1, f2), f1, f2 > 0.
PairStats pair_stats_from_counts(std::size_t f1, std::size_t f2, std::size_t a);

/// z depends only on the two cardinalities.
double z_statistic(std::size_t f1, std::size_t f2);

/// (S^2, S/(2-S)).
ResemblanceBounds resemblance_bounds(double cosine);

/// S/(z* - S): the lower bound on R when the data satisfy z <= z*.
double restricted_lower_bound(double cosine, double z_star);

/// True iff S^2 - tol <= R <= S/(2-S) + tol.
bool within_bounds(const PairStats& stats, double tol = kBoundTolerance);

enum class WitnessKind { lower, upper };

struct CountTriple {
  std::size_t f1 = 0;
  std::size_t f2 = 0;
  std::size_t a = 0;
  friend bool operator==(const CountTriple&, const CountTriple&) = default;
};

/// Integer configurations that sit exactly on a bound.
///
/// upper: f1 = f2 = q, a = p gives S = p/q and R = S/(2-S).
/// lower: f1 = q, f2 = a = p gives S = sqrt(p/q) and R = S^2.
CountTriple tightness_witness(WitnessKind kind, std::size_t p, std::size_t q);

}  // namespace lshbench
