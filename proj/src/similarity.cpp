#include "lshbench/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lshbench {

namespace {

void check_indices(const std::vector<Index>& indices, std::size_t dim) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= dim) {
      throw std::invalid_argument("coordinate " + std::to_string(indices[i]) +
                                  " out of range for dim " + std::to_string(dim));
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw std::invalid_argument("indices must be strictly increasing");
    }
  }
}

void check_same_dim(const SparseVector& x, const SparseVector& y) {
  if (x.dim() != y.dim()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(x.dim()) + " vs " +
                                std::to_string(y.dim()));
  }
}

void check_binary(const SparseVector& x, const char* op) {
  if (x.is_weighted()) {
    throw std::invalid_argument(std::string(op) + " requires binary vectors");
  }
}

double weight_at(const SparseVector& x, std::size_t pos) {
  return x.is_weighted() ? x.weights()[pos] : 1.0;
}

double norm(const SparseVector& x) {
  if (!x.is_weighted()) return std::sqrt(static_cast<double>(x.nnz()));
  double sum = 0.0;
  for (double w : x.weights()) sum += w * w;
  return std::sqrt(sum);
}

}  // namespace

SparseVector SparseVector::binary(std::vector<Index> indices, std::size_t dim) {
  check_indices(indices, dim);
  SparseVector v;
  v.indices_ = std::move(indices);
  v.dim_ = dim;
  return v;
}

SparseVector SparseVector::weighted(std::vector<Index> indices, std::vector<double> weights,
                                    std::size_t dim) {
  check_indices(indices, dim);
  if (weights.size() != indices.size()) {
    throw std::invalid_argument("weights and indices differ in length");
  }
  if (std::any_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    throw std::invalid_argument("weighted vector contains an explicit zero");
  }
  SparseVector v;
  v.indices_ = std::move(indices);
  v.weights_ = std::move(weights);
  v.dim_ = dim;
  return v;
}

std::span<const double> SparseVector::weights() const {
  if (!weights_) return {};
  return *weights_;
}

SparseVector SparseVector::binarized() const {
  SparseVector v;
  v.indices_ = indices_;
  v.dim_ = dim_;
  return v;
}

SparseVector SparseVector::with_dim(std::size_t dim) const {
  if (!indices_.empty() && indices_.back() >= dim) {
    throw std::invalid_argument("cannot shrink dim below the largest coordinate");
  }
  SparseVector v = *this;
  v.dim_ = dim;
  return v;
}

std::size_t intersection_size(const SparseVector& x, const SparseVector& y) {
  auto xi = x.indices();
  auto yi = y.indices();
  std::size_t i = 0, j = 0, a = 0;
  while (i < xi.size() && j < yi.size()) {
    if (xi[i] < yi[j]) {
      ++i;
    } else if (yi[j] < xi[i]) {
      ++j;
    } else {
      ++a;
      ++i;
      ++j;
    }
  }
  return a;
}

double cosine(const SparseVector& x, const SparseVector& y) {
  check_same_dim(x, y);
  if (x.empty() || y.empty()) {
    throw std::invalid_argument("cosine is undefined for an empty vector");
  }
  if (!x.is_weighted() && !y.is_weighted()) {
    const auto a = static_cast<double>(intersection_size(x, y));
    return a / std::sqrt(static_cast<double>(x.nnz()) * static_cast<double>(y.nnz()));
  }
  auto xi = x.indices();
  auto yi = y.indices();
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < xi.size() && j < yi.size()) {
    if (xi[i] < yi[j]) {
      ++i;
    } else if (yi[j] < xi[i]) {
      ++j;
    } else {
      dot += weight_at(x, i) * weight_at(y, j);
      ++i;
      ++j;
    }
  }
  const double denom = norm(x) * norm(y);
  if (denom == 0.0) throw std::invalid_argument("cosine is undefined for a zero-norm vector");
  return dot / denom;
}

double resemblance(const SparseVector& x, const SparseVector& y) {
  check_binary(x, "resemblance");
  check_binary(y, "resemblance");
  check_same_dim(x, y);
  if (x.empty() && y.empty()) {
    throw std::invalid_argument("resemblance is undefined for two empty sets");
  }
  const std::size_t a = intersection_size(x, y);
  return static_cast<double>(a) / static_cast<double>(x.nnz() + y.nnz() - a);
}

double z_statistic(std::size_t f1, std::size_t f2) {
  if (f1 == 0 || f2 == 0) throw std::invalid_argument("z is undefined for an empty vector");
  // (f1 + f2)/sqrt(f1 f2) == sqrt(f2/f1) + sqrt(f1/f2), exact at f1 == f2.
  const auto d1 = static_cast<double>(f1);
  const auto d2 = static_cast<double>(f2);
  return (d1 + d2) / std::sqrt(d1 * d2);
}

PairStats pair_stats_from_counts(std::size_t f1, std::size_t f2, std::size_t a) {
  if (f1 == 0 || f2 == 0) throw std::invalid_argument("pair_stats requires nonempty vectors");
  if (a > std::min(f1, f2)) throw std::invalid_argument("intersection exceeds a cardinality");
  PairStats s;
  s.f1 = f1;
  s.f2 = f2;
  s.a = a;
  const auto da = static_cast<double>(a);
  s.cosine = da / std::sqrt(static_cast<double>(f1) * static_cast<double>(f2));
  s.resemblance = da / static_cast<double>(f1 + f2 - a);
  s.z = z_statistic(f1, f2);
  return s;
}

PairStats pair_stats(const SparseVector& x, const SparseVector& y) {
  check_binary(x, "pair_stats");
  check_binary(y, "pair_stats");
  check_same_dim(x, y);
  return pair_stats_from_counts(x.nnz(), y.nnz(), intersection_size(x, y));
}

ResemblanceBounds resemblance_bounds(double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("cosine must lie in [0, 1]");
  return {s * s, s / (2.0 - s)};
}

double restricted_lower_bound(double s, double z_star) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("cosine must lie in [0, 1]");
  if (!(z_star >= 2.0)) throw std::invalid_argument("z* must be at least 2");
  if (!(z_star > s)) throw std::invalid_argument("z* must exceed the cosine");
  return s / (z_star - s);
}

bool within_bounds(const PairStats& stats, double tol) {
  const auto b = resemblance_bounds(stats.cosine);
  return stats.resemblance >= b.lower - tol && stats.resemblance <= b.upper + tol;
}

CountTriple tightness_witness(WitnessKind kind, std::size_t p, std::size_t q) {
  if (p == 0) throw std::invalid_argument("witness requires p >= 1");
  if (p > q) throw std::invalid_argument("witness requires p <= q");
  if (kind == WitnessKind::upper) return {q, q, p};
  return {q, p, p};
}

}  // namespace lshbench
