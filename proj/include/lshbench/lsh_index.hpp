#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "lshbench/hash_families.hpp"
#include "lshbench/similarity.hpp"

namespace lshbench {

using PointId = std::uint32_t;
using BucketKey = std::uint64_t;

/// (K, L) bucketing parameters.
///
/// Table t concatenates the hash functions with seed indices
/// t * stride .. t * stride + K - 1. The stride defaults to K (tables use
/// consecutive disjoint blocks). A sweep sets stride to the largest K so that
/// every smaller K reads a prefix of the same block.
struct IndexConfig {
  std::size_t K = 1;
  std::size_t L = 1;
  HashFamilyConfig family;
  std::size_t stride = 0;  // 0 means K

  std::size_t table_stride() const { return stride == 0 ? K : stride; }
  std::uint64_t seed_index(std::size_t table, std::size_t position) const {
    return static_cast<std::uint64_t>(table) * table_stride() + position;
  }
  void validate() const;

  friend bool operator==(const IndexConfig&, const IndexConfig&) = default;
};

inline constexpr std::size_t kMaxK = 30;
inline constexpr std::size_t kMaxL = 200;

/// Sequential keyed mix of the hash values of one table.
BucketKey bucket_key(std::span<const HashValue> values);
/// Same, rejecting a sequence whose length is not K.
BucketKey bucket_key(std::span<const HashValue> values, std::size_t K);

/// Raised by LshIndex::build with the offending point id.
class InvalidPointError : public std::invalid_argument {
 public:
  InvalidPointError(PointId id, const std::string& what);
  PointId id() const { return id_; }

 private:
  PointId id_;
};

/// L hash tables mapping bucket keys to point ids. Stores ids only; the
/// vectors stay with the caller. Immutable after build.
class LshIndex {
 public:
  using Table = std::unordered_map<BucketKey, std::vector<PointId>>;

  static LshIndex build(std::span<const SparseVector> points, const IndexConfig& config,
                        unsigned workers = 1);

  /// One key per table.
  std::vector<BucketKey> keys_for(const SparseVector& x) const;

  /// Union of the matching buckets over all tables, ascending ids.
  std::vector<PointId> query(const SparseVector& q) const;

  const IndexConfig& config() const { return config_; }
  std::size_t num_points() const { return num_points_; }
  const Table& table(std::size_t t) const { return tables_.at(t); }
  /// Total bucket entries across tables (L * num_points).
  std::size_t num_entries() const;

  /// Little-endian binary snapshot, see README for the layout.
  void save(std::ostream& out) const;
  static LshIndex load(std::istream& in);

  friend bool operator==(const LshIndex&, const LshIndex&) = default;

 private:
  IndexConfig config_;
  std::size_t num_points_ = 0;
  std::vector<Table> tables_;
};

}  // namespace lshbench
