#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lshbench/dataset.hpp"
#include "lshbench/hash_families.hpp"
#include "lshbench/lsh_index.hpp"

namespace lshbench {

struct Neighbor {
  PointId id = 0;
  double similarity = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact top-k train neighbors by cosine for every query. Similarities are
/// nonincreasing; ties go to the smaller train id.
struct GoldStandard {
  std::size_t k = 0;
  std::vector<std::vector<Neighbor>> neighbors;
};

GoldStandard gold_topk(const Dataset& dataset, std::size_t k, unsigned workers = 1);

/// Counts of z over every query-train pair, binned from z = 2 upward.
struct ZHistogram {
  double bin_width = 0.01;
  std::vector<std::uint64_t> counts;  // bin i covers [2 + i w, 2 + (i + 1) w)
  std::uint64_t skipped = 0;          // pairs with an empty side, when skipping

  double bin_lo(std::size_t i) const { return 2.0 + static_cast<double>(i) * bin_width; }
  double bin_hi(std::size_t i) const { return 2.0 + static_cast<double>(i + 1) * bin_width; }
  std::uint64_t total() const;
};

ZHistogram z_histogram(const Dataset& dataset, double bin_width, bool skip_empty = false);

struct ProfileRow {
  std::size_t rank = 0;  // 1-based
  double median_cosine = 0.0;
  double median_resemblance = 0.0;
  double lower = 0.0;  // median_cosine^2
  double upper = 0.0;  // median_cosine / (2 - median_cosine)
};

/// Per-rank medians of independently sorted cosine and resemblance columns.
///
/// The envelope columns are evaluated on the median cosine. The per-pair
/// check (R within [S^2, S/(2-S)] for the same pair) is reported separately
/// as `pair_violations`; the column-wise upper curve can sit slightly below
/// the median resemblance when the query count is even, because the median
/// then averages two values and S/(2-S) is convex.
struct LocationProfile {
  std::vector<ProfileRow> rows;
  std::uint64_t pairs_checked = 0;
  std::uint64_t pair_violations = 0;
};

/// Median of an even-length sample is the mean of the two middle values.
double median(std::vector<double> values);

LocationProfile top_location_profile(const Dataset& dataset, std::size_t T, unsigned workers = 1);

/// overlap[T - 1] is the mean over queries of the resemblance between the
/// cosine-ranked and resemblance-ranked top-T id sets.
std::vector<double> ranklist_overlap(const Dataset& dataset, std::size_t T_max, unsigned workers = 1);

/// Train ids ordered by the given per-id scores, descending, ties by id.
std::vector<PointId> rank_by(const std::vector<double>& scores);

struct SweepConfig {
  HashFamilyConfig family;
  std::vector<std::size_t> K_values;
  std::vector<std::size_t> L_values;
  std::size_t k = 10;
  std::vector<double> recall_levels;
  /// Weighted data: SimHash hashes the weights, minwise families hash the
  /// binarized vectors, and the gold standard uses weighted cosine.
  bool real_valued = false;
  unsigned workers = 1;

  static std::vector<std::size_t> desk_K();
  static std::vector<std::size_t> desk_L();
  static std::vector<std::size_t> full_K();
  static std::vector<std::size_t> full_L();
};

struct SweepCell {
  std::size_t K = 0;
  std::size_t L = 0;
  double recall = 0.0;    // mean over queries of |candidates ∩ top-k| / k
  double fraction = 0.0;  // mean over queries of |candidates| / |train|
};

struct RecallLevelResult {
  double level = 0.0;
  std::optional<double> min_fraction;  // empty when no (K, L) reaches the level
  std::size_t best_K = 0;
  std::size_t best_L = 0;
};

struct BenchmarkReport {
  std::string family;
  std::size_t k = 0;
  std::vector<SweepCell> cells;  // K-major, then L, in the configured order
  std::vector<RecallLevelResult> levels;

  bool all_attained() const;
  const SweepCell& cell(std::size_t K, std::size_t L) const;
};

/// Runs every (K, L) combination. Table t of a combination uses seed
/// indices t * max(K) .. t * max(K) + K - 1, i.e. the same buckets as
/// LshIndex with IndexConfig{K, L, family, stride = max(K)}.
BenchmarkReport sweep(const Dataset& dataset, const GoldStandard& gold, const SweepConfig& config);
BenchmarkReport sweep(const Dataset& dataset, const SweepConfig& config);

/// Minimum fraction over cells with recall >= level; ties prefer smaller K then L.
std::vector<RecallLevelResult> min_fraction_curve(const std::vector<SweepCell>& cells,
                                                  const std::vector<double>& levels);

}  // namespace lshbench
