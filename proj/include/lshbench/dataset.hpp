#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lshbench/similarity.hpp"

namespace lshbench {

/// Malformed input, with the offending line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Partition {
  std::vector<SparseVector> points;
  std::size_t dim = 0;
};

/// Query/train split sharing one universe size.
struct Dataset {
  std::string name;
  std::vector<SparseVector> query;
  std::vector<SparseVector> train;
  bool weighted = false;
  std::size_t dim = 0;

  /// Throws if dims disagree or modes are mixed.
  void validate() const;
  Dataset binarized() const;
};

/// Parses `label idx:val idx:val ...` lines with 1-based strictly increasing
/// indices. Comments after '#', blank lines, and `qid:` tokens are ignored.
/// Zero values are dropped. With `binarize` the values are discarded.
/// dim is max index + 1 unless `dim_override` is given.
Partition parse_svmlight(std::istream& in, bool binarize, std::optional<std::size_t> dim_override = {},
                         const std::string& source = "<stream>");
Partition load_svmlight(const std::filesystem::path& path, bool binarize,
                        std::optional<std::size_t> dim_override = {});

/// Writes 1-based lines with label 0; binary points get value 1.
void write_svmlight(std::ostream& out, std::span<const SparseVector> points);
void write_svmlight(const std::filesystem::path& path, std::span<const SparseVector> points);

/// Combines two partitions, widening every vector to the larger dim.
Dataset make_dataset(std::string name, Partition query, Partition train);

struct ManifestEntry {
  std::string_view name;
  std::size_t n_query;
  std::size_t n_train;
  std::size_t dim;
};

/// Sizes of the public benchmark corpora (not bundled).
std::span<const ManifestEntry> dataset_manifest();
const ManifestEntry& manifest_entry(std::string_view name);
/// Throws std::runtime_error describing the first size mismatch.
void check_against_manifest(const Dataset& dataset, const ManifestEntry& entry);

/// One planted neighbor: cosine S with the query and cardinality ratio r = f2/f1.
struct PlantSpec {
  double cosine = 1.0;
  double ratio = 1.0;
};

/// Draws a neighbor of `base` with f2 = round(r f1) and a = round(S sqrt(f1 f2)).
/// Throws std::invalid_argument when a > min(f1, f2) or the union exceeds dim.
SparseVector plant_neighbor(const SparseVector& base, const PlantSpec& spec, std::mt19937_64& rng);

/// Draws a pair with f2 = round(r f1) and a = round(S sqrt(f1 f2)) over [0, dim).
/// Throws std::invalid_argument when a > min(f1, f2) or the union exceeds dim.
std::pair<SparseVector, SparseVector> planted_pair(std::size_t f1, const PlantSpec& spec,
                                                   std::size_t dim, std::mt19937_64& rng);

struct SynthConfig {
  std::size_t n_query = 200;
  std::size_t n_train = 2000;
  std::size_t dim = 5000;
  /// Cardinality range for queries and background points.
  std::size_t f_min = 20;
  std::size_t f_max = 160;
  /// Planted neighbors per query, cycling through `profile`.
  std::size_t neighbors_per_query = 5;
  std::vector<PlantSpec> profile;
  bool weighted = false;
  std::uint64_t seed = 0x5eed'2014'cafe'f00dULL;

  /// The default corpus: graded similarities with a mix of cardinality ratios.
  static SynthConfig default_corpus();
};

/// Queries with planted neighbors plus uniformly drawn background train
/// points; train order is shuffled. Deterministic under the seed.
Dataset synthesize(const SynthConfig& config);

/// Uniform integer in [0, n) from raw engine output, portable across
/// standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

}  // namespace lshbench
